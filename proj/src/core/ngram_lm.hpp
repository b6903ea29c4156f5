#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace wbwt {

using Gram = std::vector<int>;

struct GramHash {
    size_t operator()(const Gram& g) const {
        uint64_t h = 0x9E3779B97F4A7C15ull ^ g.size();
        for (int x : g) {
            h ^= (uint64_t)(uint32_t)x;
            h *= 0x100000001B3ull;
            h ^= h >> 29;
        }
        return (size_t)h;
    }
};

using GramCounts = std::unordered_map<Gram, uint64_t, GramHash>;

inline constexpr int kUnkId = 0;
inline constexpr int kBosId = 1;
inline constexpr int kEosId = 2;

struct LmVocab {
    std::vector<std::string> tokens;  // id -> token
    std::unordered_map<std::string, int> ids;

    static LmVocab base();            // just <unk>, <s>, </s>
    int add(const std::string& tok);  // existing id if already present
    int find(const std::string& tok) const;            // -1 when absent
    int find_or_unk(const std::string& tok) const;
    size_t size() const { return tokens.size(); }
};

// Raw windows per order over <s>-padded sentences (windows ending in <s> are
// skipped, so order-1 counts never include <s>), plus the counts estimation
// actually uses: continuation counts below the top order, except <s>-initial
// grams which keep their raw counts.
struct CountSet {
    int order = 0;
    std::vector<GramCounts> raw;   // [n-1] for n = 1..order
    std::vector<GramCounts> used;  // same layout
};

CountSet count_ngrams(const std::vector<std::vector<int>>& sentences, int order);

// Count-of-counts discounts D1, D2, D3+ for one order. Falls back to a flat
// 0.5 (flat = true) when the count-of-counts are too sparse to estimate
// (any of t1..t4 zero) or a discount comes out negative.
struct Discounts {
    double d1 = 0.5, d2 = 0.5, d3 = 0.5;
    bool flat = false;

    double of(uint64_t c) const {
        if (c == 0) return 0.0;
        if (flat) return 0.5;
        return c == 1 ? d1 : c == 2 ? d2 : d3;
    }
};

Discounts estimate_discounts(const GramCounts& counts);

using WarnFn = std::function<void(const std::string&)>;

struct NgramModel {
    struct Entry {
        double logp = 0.0;     // log10 of the fully interpolated probability
        double backoff = 0.0;  // log10 backoff weight; meaningful below top order
    };

    int order = 0;
    LmVocab vocab;
    std::vector<std::unordered_map<Gram, Entry, GramHash>> grams;  // [n-1]

    // log10 p(word | history); history may be any length and is truncated to
    // the last order-1 ids. Unknown ids must already be mapped to kUnkId.
    double score(std::span<const int> history, int word) const;
    double score_tokens(const std::vector<std::string>& history, const std::string& word) const;

    // log10 probability of a sentence (ids without pads), including </s>.
    double sentence_logprob(std::span<const int> sentence) const;
};

NgramModel train_lm(const std::vector<std::vector<std::string>>& corpus, int order,
                    const WarnFn& warn = {});

double corpus_perplexity(const NgramModel& model,
                         const std::vector<std::vector<std::string>>& corpus);

void write_arpa(const NgramModel& model, const std::string& path);
NgramModel read_arpa(const std::string& path);

} // namespace wbwt
