#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rng.hpp"

namespace wbwt {

struct NoiseSpec {
    int d_per = 3;        // max local displacement for the permutation
    double p_del = 0.1;   // per-token deletion probability
    double p_ins = 0.1;   // per-position insertion probability
    int v_ins = 50;       // insertions draw from the first v_ins vocabulary words
};

// Each token i moves to sorted position by key i + delta_i with delta_i drawn
// uniformly from {0, ..., d_per}; the sort is stable so ties keep source
// order. One draw is consumed per token even when d_per = 0.
std::vector<std::string> noise_permute(const std::vector<std::string>& tokens, int d_per,
                                       RandomSource& rng);

// Drops token i when its draw falls below p_del (one draw per token).
std::vector<std::string> noise_delete(const std::vector<std::string>& tokens, double p_del,
                                      RandomSource& rng);

// Before each existing token (never after the last) a draw below p_ins
// inserts vocab[r], r drawn uniformly from the first min(v_ins, |vocab|)
// entries. Empty input consumes no draws.
std::vector<std::string> noise_insert(const std::vector<std::string>& tokens, double p_ins,
                                      int v_ins, const std::vector<std::string>& vocab,
                                      RandomSource& rng);

// permute, then delete, then insert, all on one stream seeded with seed.
std::vector<std::string> corrupt(const std::vector<std::string>& tokens, const NoiseSpec& spec,
                                 const std::vector<std::string>& vocab, uint64_t seed);

struct NoisePair {
    std::vector<std::string> noisy;
    std::vector<std::string> clean;
};

// epochs passes over the corpus, each sentence corrupted with an independent
// per-pair seed derived from (seed, epoch, sentence index), so any pair can
// be regenerated without replaying the stream.
std::vector<NoisePair> make_denoising_corpus(const std::vector<std::vector<std::string>>& corpus,
                                             const NoiseSpec& spec,
                                             const std::vector<std::string>& vocab, uint64_t seed,
                                             int epochs);

// Identity pairs (noisy = clean) for validation.
std::vector<NoisePair> make_validation_pairs(const std::vector<std::vector<std::string>>& corpus);

void write_pairs_tsv(const std::vector<NoisePair>& pairs, const std::string& path);
void write_pairs_files(const std::vector<NoisePair>& pairs, const std::string& noisy_path,
                       const std::string& clean_path);

} // namespace wbwt
