#include "decoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "error.hpp"
#include "parallel.hpp"

namespace wbwt {

double combined_score(double q, double lm_log10, double lambda_emb, double lambda_lm) {
    if (!(q > 0.0)) fail(ErrorKind::invalid_argument, "decoder: q must be positive");
    return lambda_emb * std::log(q) + lambda_lm * lm_log10 * M_LN10;
}

namespace {

struct Hyp {
    double score = 0.0;
    std::vector<int> hist;  // LM ids, starts at <s>
    std::vector<int> ranks;
    std::vector<std::string> words;
};

bool better(const Hyp& a, const Hyp& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.ranks != b.ranks) return a.ranks < b.ranks;
    return a.words < b.words;
}

} // namespace

Translation beam_search(const std::vector<Shortlist>& lists, const NgramModel& lm,
                        const DecoderConfig& cfg) {
    if (cfg.beam_size < 1) fail(ErrorKind::invalid_argument, "decoder: beam size must be >= 1");
    if (lists.empty()) return {};

    std::vector<Hyp> beam(1);
    beam[0].hist.push_back(kBosId);

    std::vector<Hyp> next;
    for (const Shortlist& list : lists) {
        next.clear();
        for (const Hyp& h : beam) {
            auto expand = [&](int rank, const std::string& word, int lm_id, double log_q) {
                Hyp e = h;
                e.score += cfg.lambda_emb * log_q +
                           cfg.lambda_lm * lm.score(e.hist, lm_id) * M_LN10;
                e.hist.push_back(lm_id);
                e.ranks.push_back(rank);
                e.words.push_back(word);
                next.push_back(std::move(e));
            };
            if (list.copy) {
                expand(0, list.source, kUnkId, 0.0);
            } else {
                if (list.cands.empty())
                    fail(ErrorKind::invalid_argument, "decoder: empty shortlist");
                for (int r = 0; r < (int)list.cands.size(); ++r) {
                    const Candidate& c = list.cands[r];
                    expand(r, c.word, lm.vocab.find_or_unk(c.word), c.log_q);
                }
            }
        }
        std::sort(next.begin(), next.end(), better);
        if ((int)next.size() > cfg.beam_size) next.resize(cfg.beam_size);
        beam.swap(next);
    }

    for (Hyp& h : beam) h.score += cfg.lambda_lm * lm.score(h.hist, kEosId) * M_LN10;
    const Hyp* best = &beam[0];
    for (const Hyp& h : beam)
        if (better(h, *best)) best = &h;
    return {best->words, best->score};
}

Translator::Translator(const EmbeddingTable& src, const EmbeddingTable& tgt, const LinearMap& map,
                       const NgramModel& lm, const DecoderConfig& cfg, int threads)
    : src_(src), tgt_(tgt), lm_(lm), cfg_(cfg), threads_(std::max(1, threads)) {
    if (src.dim != tgt.dim || src.dim != map.dim())
        fail(ErrorKind::invalid_argument, "decoder: dimension mismatch");
    if (cfg.candidates_per_word < 1)
        fail(ErrorKind::invalid_argument, "decoder: candidates_per_word must be >= 1");
    int limit = cfg.translate_vocab_limit;
    src_limit_ = limit > 0 ? std::min<int>(limit, (int)src.size()) : (int)src.size();
    tgt_limit_ = limit > 0 ? std::min<int>(limit, (int)tgt.size()) : (int)tgt.size();
    if (tgt_limit_ < 1) fail(ErrorKind::invalid_argument, "decoder: empty target vocabulary");

    mapped_src_ = map_rows(src, map, src_limit_);
    tgt_pool_ = Matrix(tgt_limit_, tgt.dim);
    std::copy_n(tgt.data.begin(), (size_t)tgt_limit_ * tgt.dim, tgt_pool_.a.begin());
    mapped_norms_ = matrix_row_norms(mapped_src_);
    tgt_norms_ = matrix_row_norms(tgt_pool_);
    int k = std::min(cfg.csls_k, std::min(src_limit_, tgt_limit_));
    if (k < 1) k = 1;
    r_tgt_ = mean_topk_cosine(tgt_pool_, mapped_src_, k, threads_);
}

Shortlist Translator::shortlist_for(const std::string& token) const {
    Shortlist out;
    out.source = token;
    int idx = src_.find(token);
    if (idx < 0 || idx >= src_limit_) {
        out.copy = true;
        return out;
    }
    std::vector<double> cos;
    cosines_vs_rows(mapped_src_.row(idx), mapped_norms_[idx], tgt_pool_, tgt_norms_, cos);

    // Rank candidates by CSLS; the query-side penalty shifts every score
    // equally, so ranking only needs 2 cos - r_tgt.
    std::vector<double> sel(tgt_limit_);
    for (int j = 0; j < tgt_limit_; ++j) sel[j] = 2.0 * cos[j] - r_tgt_[j];

    int n = std::min(cfg_.candidates_per_word, tgt_limit_);
    std::vector<int> order(tgt_limit_);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + n, order.end(), [&](int a, int b) {
        if (sel[a] != sel[b]) return sel[a] > sel[b];
        return a < b;
    });

    double r_src = 0.0;
    if (cfg_.lexical_csls) {
        int k = std::min(cfg_.csls_k, tgt_limit_);
        r_src = mean_topk(cos, k < 1 ? 1 : k);
    }
    out.cands.reserve(n);
    for (int r = 0; r < n; ++r) {
        int j = order[r];
        double d = cfg_.lexical_csls ? std::clamp((sel[j] - r_src) / 2.0, -1.0, 1.0) : cos[j];
        double q = (d + 1.0) / 2.0;
        if (q <= 0.0) continue;  // q = 0 can never win; drop it here
        out.cands.push_back({tgt_.words[j], j, d, std::log(q)});
    }
    if (out.cands.empty()) {
        out.copy = true;
        out.cands.clear();
    }
    return out;
}

Translation Translator::translate(const std::vector<std::string>& tokens) const {
    if (tokens.empty()) return {};
    std::vector<Shortlist> lists;
    lists.reserve(tokens.size());
    for (const auto& tok : tokens) lists.push_back(shortlist_for(tok));
    return beam_search(lists, lm_, cfg_);
}

Translator::FileStats Translator::translate_file(const std::string& in_path,
                                                 const std::string& out_path,
                                                 const std::string& scores_path) const {
    std::ifstream in(in_path);
    if (!in) fail(ErrorKind::io, "cannot open input file: " + in_path);
    std::vector<std::vector<std::string>> sentences;
    std::unordered_map<std::string, int> tok_id;
    std::vector<std::string> toks;
    std::string line, tok;
    while (std::getline(in, line)) {
        sentences.emplace_back();
        std::istringstream ls(line);
        while (ls >> tok) {
            sentences.back().push_back(tok);
            if (tok_id.emplace(tok, (int)toks.size()).second) toks.push_back(tok);
        }
    }

    // Shortlists once per distinct token, then sentences decode in parallel.
    std::vector<Shortlist> lists(toks.size());
    parallel_for((int)toks.size(), threads_, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) lists[i] = shortlist_for(toks[i]);
    });

    std::vector<Translation> results(sentences.size());
    parallel_for((int)sentences.size(), threads_, [&](int begin, int end) {
        std::vector<Shortlist> sl;
        for (int s = begin; s < end; ++s) {
            if (sentences[s].empty()) continue;
            sl.clear();
            for (const auto& t : sentences[s]) sl.push_back(lists[tok_id[t]]);
            results[s] = beam_search(sl, lm_, cfg_);
        }
    });

    std::ofstream out(out_path);
    if (!out) fail(ErrorKind::io, "cannot write output file: " + out_path);
    FileStats stats;
    stats.sentences = sentences.size();
    for (size_t s = 0; s < sentences.size(); ++s) {
        for (size_t i = 0; i < results[s].tokens.size(); ++i)
            out << (i ? " " : "") << results[s].tokens[i];
        out << "\n";
        stats.tokens_out += results[s].tokens.size();
        for (const auto& t : sentences[s])
            if (lists[tok_id[t]].copy) ++stats.copies;
    }
    if (!out) fail(ErrorKind::io, "write failed: " + out_path);

    if (!scores_path.empty()) {
        std::ofstream sc(scores_path);
        if (!sc) fail(ErrorKind::io, "cannot write scores file: " + scores_path);
        char buf[48];
        for (size_t s = 0; s < results.size(); ++s) {
            std::snprintf(buf, sizeof buf, "%zu\t%.6f", s, results[s].score);
            sc << buf << "\n";
        }
        if (!sc) fail(ErrorKind::io, "write failed: " + scores_path);
    }
    return stats;
}

} // namespace wbwt
