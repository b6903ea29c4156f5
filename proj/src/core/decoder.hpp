#pragma once

#include <string>
#include <vector>

#include "crossmap.hpp"
#include "embedding.hpp"
#include "ngram_lm.hpp"

namespace wbwt {

struct DecoderConfig {
    double lambda_emb = 1.0;
    double lambda_lm = 0.1;
    int beam_size = 10;
    int candidates_per_word = 100;
    int translate_vocab_limit = 50000;  // applied to both source and target sides
    int csls_k = 10;
    bool lexical_csls = false;  // lexical weight from halved CSLS instead of raw cosine
};

struct Candidate {
    std::string word;  // target-side surface form
    int tgt;           // target word row; -1 marks a copy of the source token
    double d;          // similarity in [-1, 1]
    double log_q;      // natural log of q = (d + 1) / 2
};

// Per-position candidate set. copy = true means the token is passed through
// unchanged (OOV, beyond the vocabulary limit, or nothing survived the q > 0
// filter); its single pseudo-candidate has q = 1 and is scored as <unk> by
// the language model.
struct Shortlist {
    std::string source;
    std::vector<Candidate> cands;  // rank order: d descending, index ascending
    bool copy = false;
};

struct Translation {
    std::vector<std::string> tokens;
    double score = 0.0;
};

// Combined per-step score: lambda_emb * ln q + lambda_lm * ln p_lm.
double combined_score(double q, double lm_log10, double lambda_emb, double lambda_lm);

// Exact beam search over the per-position shortlists, tie-broken by rank
// sequence then output words so results are deterministic.
Translation beam_search(const std::vector<Shortlist>& lists, const NgramModel& lm,
                        const DecoderConfig& cfg);

class Translator {
  public:
    Translator(const EmbeddingTable& src, const EmbeddingTable& tgt, const LinearMap& map,
               const NgramModel& lm, const DecoderConfig& cfg, int threads = 1);

    Shortlist shortlist_for(const std::string& token) const;
    Translation translate(const std::vector<std::string>& tokens) const;

    // Reads one sentence per line, writes one translation per line; optional
    // per-line scores file ("index<TAB>score"). Sentences decode in parallel.
    struct FileStats {
        uint64_t sentences = 0;
        uint64_t tokens_out = 0;
        uint64_t copies = 0;
    };
    FileStats translate_file(const std::string& in_path, const std::string& out_path,
                             const std::string& scores_path = "") const;

    const DecoderConfig& config() const { return cfg_; }

  private:
    const EmbeddingTable& src_;
    const EmbeddingTable& tgt_;
    const NgramModel& lm_;
    DecoderConfig cfg_;
    int threads_;
    int src_limit_, tgt_limit_;
    Matrix mapped_src_;               // mapped source rows within the limit
    Matrix tgt_pool_;                 // target rows within the limit
    std::vector<double> mapped_norms_;
    std::vector<double> tgt_norms_;
    std::vector<double> r_tgt_;       // CSLS hub penalties over the pool
};

} // namespace wbwt
