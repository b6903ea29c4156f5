#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "embedding.hpp"
#include "matrix.hpp"

namespace wbwt {

// d x d map from source embedding space into target embedding space, applied
// to row vectors as x * W. Orthogonal after a Procrustes solve.
struct LinearMap {
    Matrix w;
    bool orthogonal = false;

    int dim() const { return w.rows; }
    static LinearMap identity(int d) { return LinearMap{Matrix::identity(d), false}; }

    // Maps a source row vector: out = x * W.
    std::vector<double> apply(std::span<const double> x) const;
};

struct DictPair {
    int src;
    int tgt;
};

struct BilingualDictionary {
    std::vector<DictPair> pairs;  // sorted by source index
    int source_vocab_limit = 0;
    int target_vocab_limit = 0;
};

struct AdversarialConfig {
    int discriminator_hidden = 512;
    int epochs = 40;
    int batch_size = 32;
    double learning_rate = 0.5;
    double smoothing = 0.1;   // label smoothing in [0, 0.5)
    double beta_ortho = 0.01; // strength of the orthogonalization update
    uint64_t seed = 0;
};

struct CrossmapConfig {
    int v_cross_train = 100000;
    int refinement_iters = 10;
    int csls_k = 10;
    bool mutual_nn_cosine = false;  // mutual neighbors use CSLS unless set
    AdversarialConfig adversarial;
};

struct RefineStats {
    struct Iteration {
        int dict_size;
        double mean_csls;
    };
    std::vector<Iteration> iterations;
};

using LogFn = std::function<void(const std::string&)>;

// Rows i < limit of src mapped through W (x * W); limit <= 0 means all rows.
Matrix map_rows(const EmbeddingTable& src, const LinearMap& map, int limit = 0);

// For each row of queries, the mean cosine to its k nearest rows of pool.
// This is the hub penalty r(.) used by CSLS on both sides.
std::vector<double> mean_topk_cosine(const Matrix& queries, const Matrix& pool, int k,
                                     int threads = 1);

std::vector<double> matrix_row_norms(const Matrix& m);

// Cosines of x against every row of pool; out is resized to pool.rows.
void cosines_vs_rows(std::span<const double> x, double x_norm, const Matrix& pool,
                     std::span<const double> pool_norms, std::vector<double>& out);

// Mean of the k largest entries (all of them when k >= size).
double mean_topk(const std::vector<double>& scores, int k);

// CSLS-adjusted scores of one mapped source vector against every target word:
// score[j] = 2 cos(x, y_j) - r_src(x) - r_tgt[j], with r_src computed on the
// fly as the mean cosine of x to its k nearest target rows.
std::vector<double> csls_scores(std::span<const double> mapped_src_vec,
                                const EmbeddingTable& tgt, int k,
                                std::span<const double> r_tgt);

// Pairs (i, j) such that j is the best target for source i AND i is the best
// source for target j, both sides restricted to the top v_cross_train words.
BilingualDictionary build_mutual_nn_dictionary(const EmbeddingTable& src,
                                               const EmbeddingTable& tgt,
                                               const LinearMap& map,
                                               const CrossmapConfig& cfg,
                                               double* mean_csls_out = nullptr,
                                               int threads = 1);

// Orthogonal W minimizing |X W - Y|_F over the dictionary pairs, via SVD of
// X^T Y (row-vector convention).
LinearMap procrustes_solve(const BilingualDictionary& dict, const EmbeddingTable& src,
                           const EmbeddingTable& tgt);

// Unsupervised initialization: a discriminator learns to tell mapped source
// vectors from target vectors while W is updated to fool it, with an
// orthogonalization step after every mapping update. Keeps the W that scores
// best under the unsupervised criterion (mean CSLS of mutual pairs).
LinearMap adversarial_init(const EmbeddingTable& src, const EmbeddingTable& tgt,
                           const CrossmapConfig& cfg, const LogFn& log = {});

// Alternates dictionary induction and Procrustes for cfg.refinement_iters
// rounds.
LinearMap refine(const EmbeddingTable& src, const EmbeddingTable& tgt, const LinearMap& w0,
                 const CrossmapConfig& cfg, RefineStats* stats = nullptr, const LogFn& log = {},
                 int threads = 1);

void save_map(const LinearMap& map, const std::string& path);
LinearMap load_map(const std::string& path);

void save_dictionary(const BilingualDictionary& dict, const EmbeddingTable& src,
                     const EmbeddingTable& tgt, const std::string& path);

// Fraction of gold source words whose best target (by the dictionary metric)
// matches gold; gold pairs given as word-index pairs.
double word_translation_precision(const EmbeddingTable& src, const EmbeddingTable& tgt,
                                  const LinearMap& map, const CrossmapConfig& cfg,
                                  const std::vector<DictPair>& gold, int threads = 1);

} // namespace wbwt
