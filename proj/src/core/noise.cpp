#include "noise.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "error.hpp"

namespace wbwt {

std::vector<std::string> noise_permute(const std::vector<std::string>& tokens, int d_per,
                                       RandomSource& rng) {
    if (d_per < 0) fail(ErrorKind::invalid_argument, "noise: d_per must be >= 0");
    int n = (int)tokens.size();
    std::vector<double> key(n);
    for (int i = 0; i < n; ++i)
        key[i] = i + (double)rng.uniform_int((uint64_t)d_per + 1);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
    std::vector<std::string> out(n);
    for (int i = 0; i < n; ++i) out[i] = tokens[order[i]];
    return out;
}

std::vector<std::string> noise_delete(const std::vector<std::string>& tokens, double p_del,
                                      RandomSource& rng) {
    if (p_del < 0.0 || p_del >= 1.0)
        fail(ErrorKind::invalid_argument, "noise: p_del must be in [0, 1)");
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens)
        if (rng.uniform() >= p_del) out.push_back(tok);
    return out;
}

std::vector<std::string> noise_insert(const std::vector<std::string>& tokens, double p_ins,
                                      int v_ins, const std::vector<std::string>& vocab,
                                      RandomSource& rng) {
    if (p_ins < 0.0 || p_ins >= 1.0)
        fail(ErrorKind::invalid_argument, "noise: p_ins must be in [0, 1)");
    if (v_ins < 1) fail(ErrorKind::invalid_argument, "noise: v_ins must be >= 1");
    int pool = std::min<int>(v_ins, (int)vocab.size());
    std::vector<std::string> out;
    out.reserve(tokens.size() + 2);
    for (const auto& tok : tokens) {
        if (rng.uniform() < p_ins) {
            if (pool == 0) fail(ErrorKind::invalid_argument, "noise: empty insertion vocabulary");
            out.push_back(vocab[(size_t)rng.uniform_int((uint64_t)pool)]);
        }
        out.push_back(tok);
    }
    return out;
}

std::vector<std::string> corrupt(const std::vector<std::string>& tokens, const NoiseSpec& spec,
                                 const std::vector<std::string>& vocab, uint64_t seed) {
    SplitMix64 rng(seed);
    auto out = noise_permute(tokens, spec.d_per, rng);
    out = noise_delete(out, spec.p_del, rng);
    return noise_insert(out, spec.p_ins, spec.v_ins, vocab, rng);
}

std::vector<NoisePair> make_denoising_corpus(const std::vector<std::vector<std::string>>& corpus,
                                             const NoiseSpec& spec,
                                             const std::vector<std::string>& vocab, uint64_t seed,
                                             int epochs) {
    if (epochs < 1) fail(ErrorKind::invalid_argument, "noise: epochs must be >= 1");
    std::vector<NoisePair> pairs;
    pairs.reserve(corpus.size() * (size_t)epochs);
    uint64_t root = mix64(seed);
    for (int e = 0; e < epochs; ++e) {
        uint64_t epoch_key = mix64(root ^ (uint64_t)e);
        for (size_t s = 0; s < corpus.size(); ++s) {
            uint64_t pair_seed = mix64(epoch_key ^ (uint64_t)s);
            pairs.push_back({corrupt(corpus[s], spec, vocab, pair_seed), corpus[s]});
        }
    }
    return pairs;
}

std::vector<NoisePair> make_validation_pairs(const std::vector<std::vector<std::string>>& corpus) {
    std::vector<NoisePair> pairs;
    pairs.reserve(corpus.size());
    for (const auto& sent : corpus) pairs.push_back({sent, sent});
    return pairs;
}

namespace {

std::string join(const std::vector<std::string>& toks) {
    std::string s;
    for (size_t i = 0; i < toks.size(); ++i) {
        if (i) s += ' ';
        s += toks[i];
    }
    return s;
}

} // namespace

void write_pairs_tsv(const std::vector<NoisePair>& pairs, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot write pairs file: " + path);
    for (const auto& p : pairs) out << join(p.noisy) << "\t" << join(p.clean) << "\n";
    if (!out) fail(ErrorKind::io, "write failed: " + path);
}

void write_pairs_files(const std::vector<NoisePair>& pairs, const std::string& noisy_path,
                       const std::string& clean_path) {
    std::ofstream noisy(noisy_path), clean(clean_path);
    if (!noisy) fail(ErrorKind::io, "cannot write noisy file: " + noisy_path);
    if (!clean) fail(ErrorKind::io, "cannot write clean file: " + clean_path);
    for (const auto& p : pairs) {
        noisy << join(p.noisy) << "\n";
        clean << join(p.clean) << "\n";
    }
    if (!noisy || !clean) fail(ErrorKind::io, "write failed: " + noisy_path);
}

} // namespace wbwt
