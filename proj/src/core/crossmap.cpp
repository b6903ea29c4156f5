#include "crossmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "svd.hpp"

namespace wbwt {

std::vector<double> LinearMap::apply(std::span<const double> x) const {
    if ((int)x.size() != w.rows) fail(ErrorKind::invalid_argument, "map: dimension mismatch");
    std::vector<double> out(w.cols, 0.0);
    for (int i = 0; i < w.rows; ++i) {
        double xi = x[i];
        if (xi == 0.0) continue;
        const double* wr = &w.a[(size_t)i * w.cols];
        for (int j = 0; j < w.cols; ++j) out[j] += xi * wr[j];
    }
    return out;
}

Matrix map_rows(const EmbeddingTable& src, const LinearMap& map, int limit) {
    if (src.dim != map.dim()) fail(ErrorKind::invalid_argument, "map: dimension mismatch");
    int n = (int)src.size();
    if (limit > 0 && limit < n) n = limit;
    Matrix x(n, src.dim);
    std::memcpy(x.a.data(), src.data.data(), (size_t)n * src.dim * sizeof(double));
    return matmul(x, map.w);
}

namespace {

// Cosines of one vector against rows of a row-major block.
void cosine_row_raw(std::span<const double> x, double xnorm, const double* data, int m, int d,
                    std::span<const double> norms, std::vector<double>& out) {
    out.assign(m, 0.0);
    for (int c = 0; c < d; ++c) {
        double xc = x[c];
        if (xc == 0.0) continue;
        const double* col = data + c;
        for (int j = 0; j < m; ++j) out[j] += xc * col[(size_t)j * d];
    }
    for (int j = 0; j < m; ++j) {
        double den = xnorm * norms[j];
        double v = den > 0.0 ? out[j] / den : 0.0;
        out[j] = std::clamp(v, -1.0, 1.0);
    }
}

Matrix limited_rows(const EmbeddingTable& t, int limit) {
    int n = (int)t.size();
    if (limit > 0 && limit < n) n = limit;
    Matrix m(n, t.dim);
    std::memcpy(m.a.data(), t.data.data(), (size_t)n * t.dim * sizeof(double));
    return m;
}

} // namespace

std::vector<double> matrix_row_norms(const Matrix& m) {
    std::vector<double> out(m.rows);
    for (int i = 0; i < m.rows; ++i) out[i] = norm2(m.row(i));
    return out;
}

void cosines_vs_rows(std::span<const double> x, double x_norm, const Matrix& pool,
                     std::span<const double> pool_norms, std::vector<double>& out) {
    cosine_row_raw(x, x_norm, pool.a.data(), pool.rows, pool.cols, pool_norms, out);
}

double mean_topk(const std::vector<double>& scores, int k) {
    int m = (int)scores.size();
    if (k >= m) return m ? std::accumulate(scores.begin(), scores.end(), 0.0) / m : 0.0;
    // Small fixed min-heap holding the running top k.
    std::vector<double> heap(scores.begin(), scores.begin() + k);
    std::make_heap(heap.begin(), heap.end(), std::greater<>());
    for (int j = k; j < m; ++j) {
        if (scores[j] > heap.front()) {
            std::pop_heap(heap.begin(), heap.end(), std::greater<>());
            heap.back() = scores[j];
            std::push_heap(heap.begin(), heap.end(), std::greater<>());
        }
    }
    return std::accumulate(heap.begin(), heap.end(), 0.0) / k;
}

std::vector<double> mean_topk_cosine(const Matrix& queries, const Matrix& pool, int k,
                                     int threads) {
    if (queries.cols != pool.cols) fail(ErrorKind::invalid_argument, "cosine: dimension mismatch");
    if (pool.rows == 0) fail(ErrorKind::invalid_argument, "cosine: empty pool");
    if (k <= 0) fail(ErrorKind::invalid_argument, "cosine: k must be positive");
    auto qn = matrix_row_norms(queries);
    auto pn = matrix_row_norms(pool);
    std::vector<double> r(queries.rows);
    parallel_for(queries.rows, threads, [&](int begin, int end) {
        std::vector<double> cos;
        for (int i = begin; i < end; ++i) {
            cosines_vs_rows(queries.row(i), qn[i], pool, pn, cos);
            r[i] = mean_topk(cos, k);
        }
    });
    return r;
}

std::vector<double> csls_scores(std::span<const double> mapped_src_vec,
                                const EmbeddingTable& tgt, int k,
                                std::span<const double> r_tgt) {
    if ((int)r_tgt.size() != (int)tgt.size())
        fail(ErrorKind::invalid_argument, "csls: penalty size mismatch");
    Matrix pool = limited_rows(tgt, 0);
    auto pn = matrix_row_norms(pool);
    std::vector<double> cos;
    cosines_vs_rows(mapped_src_vec, norm2(mapped_src_vec), pool, pn, cos);
    double r_src = mean_topk(cos, std::min<int>(k, pool.rows));
    std::vector<double> out(cos.size());
    for (size_t j = 0; j < cos.size(); ++j) out[j] = 2.0 * cos[j] - r_src - r_tgt[j];
    return out;
}

BilingualDictionary build_mutual_nn_dictionary(const EmbeddingTable& src,
                                               const EmbeddingTable& tgt,
                                               const LinearMap& map, const CrossmapConfig& cfg,
                                               double* mean_csls_out, int threads) {
    if (src.size() == 0 || tgt.size() == 0)
        fail(ErrorKind::invalid_argument, "dictionary: empty vocabulary");
    Matrix x = map_rows(src, map, cfg.v_cross_train);
    Matrix y = limited_rows(tgt, cfg.v_cross_train);
    int ns = x.rows, nt = y.rows;
    int k = std::min(cfg.csls_k, std::min(ns, nt));
    if (k < 1) k = 1;

    std::vector<double> r_src = mean_topk_cosine(x, y, k, threads);
    std::vector<double> r_tgt = mean_topk_cosine(y, x, k, threads);

    bool plain = cfg.mutual_nn_cosine;
    std::vector<int> best_tgt(ns, -1);
    std::vector<double> best_tgt_cos(ns, 0.0);

    int workers = std::max(1, std::min(threads, ns));
    int chunk = (ns + workers - 1) / workers;
    // Per-worker column argmax so the merge can keep the lowest source index
    // on ties.
    std::vector<std::vector<double>> col_best(workers,
                                              std::vector<double>(nt, -1e300));
    std::vector<std::vector<int>> col_idx(workers, std::vector<int>(nt, -1));

    auto xn = matrix_row_norms(x);
    auto yn = matrix_row_norms(y);
    parallel_for(ns, threads, [&](int begin, int end) {
        int w = begin / chunk;
        auto& cb = col_best[w];
        auto& ci = col_idx[w];
        std::vector<double> cos;
        for (int i = begin; i < end; ++i) {
            cosines_vs_rows(x.row(i), xn[i], y, yn, cos);
            double best = -1e300;
            int bj = -1;
            for (int j = 0; j < nt; ++j) {
                double row_score = plain ? cos[j] : 2.0 * cos[j] - r_tgt[j];
                if (row_score > best) {
                    best = row_score;
                    bj = j;
                }
                double col_score = plain ? cos[j] : 2.0 * cos[j] - r_src[i];
                if (col_score > cb[j]) {
                    cb[j] = col_score;
                    ci[j] = i;
                }
            }
            best_tgt[i] = bj;
            best_tgt_cos[i] = cos[bj];
        }
    });

    std::vector<int> best_src(nt, -1);
    {
        std::vector<double> best(nt, -1e300);
        for (int w = 0; w < workers; ++w)
            for (int j = 0; j < nt; ++j)
                if (col_idx[w][j] >= 0 && col_best[w][j] > best[j]) {
                    best[j] = col_best[w][j];
                    best_src[j] = col_idx[w][j];
                }
    }

    BilingualDictionary dict;
    dict.source_vocab_limit = ns;
    dict.target_vocab_limit = nt;
    double csls_sum = 0.0;
    for (int i = 0; i < ns; ++i) {
        int j = best_tgt[i];
        if (j >= 0 && best_src[j] == i) {
            dict.pairs.push_back({i, j});
            csls_sum += 2.0 * best_tgt_cos[i] - r_src[i] - r_tgt[j];
        }
    }
    if (mean_csls_out)
        *mean_csls_out = dict.pairs.empty() ? 0.0 : csls_sum / (double)dict.pairs.size();
    return dict;
}

LinearMap procrustes_solve(const BilingualDictionary& dict, const EmbeddingTable& src,
                           const EmbeddingTable& tgt) {
    if (dict.pairs.empty()) fail(ErrorKind::invalid_argument, "procrustes: empty dictionary");
    if (src.dim != tgt.dim) fail(ErrorKind::invalid_argument, "procrustes: dimension mismatch");
    int n = (int)dict.pairs.size(), d = src.dim;
    Matrix x(n, d), y(n, d);
    for (int r = 0; r < n; ++r) {
        const auto& p = dict.pairs[r];
        if (p.src < 0 || p.src >= (int)src.size() || p.tgt < 0 || p.tgt >= (int)tgt.size())
            fail(ErrorKind::invalid_argument, "procrustes: dictionary index out of range");
        std::memcpy(&x.a[(size_t)r * d], src.row(p.src).data(), d * sizeof(double));
        std::memcpy(&y.a[(size_t)r * d], tgt.row(p.tgt).data(), d * sizeof(double));
    }
    Matrix m = matmul_tA(x, y);  // X^T Y, d x d
    SvdResult s = svd(m);
    LinearMap out{matmul_tB(s.u, s.v), true};  // U V^T
    return out;
}

namespace {

// One-hidden-layer discriminator trained with plain SGD and manual
// gradients; predicts the probability its input is a mapped source vector.
struct Discriminator {
    int d, h;
    std::vector<double> w1;  // h x d
    std::vector<double> b1;  // h
    std::vector<double> w2;  // h
    double b2 = 0.0;

    Discriminator(int dim, int hidden, RandomSource& rng) : d(dim), h(hidden) {
        w1.resize((size_t)h * d);
        b1.assign(h, 0.0);
        w2.resize(h);
        double s1 = 1.0 / std::sqrt((double)d);
        for (auto& v : w1) v = (2.0 * rng.uniform() - 1.0) * s1;
        double s2 = 1.0 / std::sqrt((double)h);
        for (auto& v : w2) v = (2.0 * rng.uniform() - 1.0) * s2;
    }

    // Forward pass keeping pre-activations for backprop.
    double forward(const double* x, std::vector<double>& z1, std::vector<double>& a1) const {
        z1.resize(h);
        a1.resize(h);
        for (int i = 0; i < h; ++i) {
            double s = b1[i];
            const double* wr = &w1[(size_t)i * d];
            for (int c = 0; c < d; ++c) s += wr[c] * x[c];
            z1[i] = s;
            a1[i] = s > 0.0 ? s : 0.2 * s;
        }
        double z2 = b2;
        for (int i = 0; i < h; ++i) z2 += w2[i] * a1[i];
        return 1.0 / (1.0 + std::exp(-z2));
    }
};

double bce(double p, double y) {
    const double eps = 1e-12;
    return -(y * std::log(std::max(p, eps)) + (1.0 - y) * std::log(std::max(1.0 - p, eps)));
}

} // namespace

LinearMap adversarial_init(const EmbeddingTable& src, const EmbeddingTable& tgt,
                           const CrossmapConfig& cfg, const LogFn& log) {
    if (src.dim != tgt.dim) fail(ErrorKind::invalid_argument, "adversarial: dimension mismatch");
    const AdversarialConfig& ac = cfg.adversarial;
    int d = src.dim;
    LinearMap map = LinearMap::identity(d);
    if (ac.epochs <= 0) return map;
    if (src.size() == 0 || tgt.size() == 0)
        fail(ErrorKind::invalid_argument, "adversarial: empty vocabulary");

    int ns = (int)src.size(), nt = (int)tgt.size();
    if (cfg.v_cross_train > 0) {
        ns = std::min(ns, cfg.v_cross_train);
        nt = std::min(nt, cfg.v_cross_train);
    }
    int bs = std::max(1, ac.batch_size);
    int iters = std::max(1, ns / bs);
    double smooth = ac.smoothing;
    double lr = ac.learning_rate;

    SplitMix64 rng(ac.seed);
    Discriminator disc(d, std::max(1, ac.discriminator_hidden), rng);

    CrossmapConfig sel = cfg;
    sel.v_cross_train = std::min(cfg.v_cross_train > 0 ? cfg.v_cross_train : 10000, 10000);

    LinearMap best = map;
    double best_criterion = -1e300;
    std::vector<double> z1, a1, dz1(disc.h), mapped(d);
    std::vector<double> gw1((size_t)disc.h * d), gb1(disc.h), gw2(disc.h);
    std::vector<double> gmap((size_t)d * d);

    // Several discriminator batches per mapping update: with a strict 1:1
    // alternation the classifier never pulls ahead of the moving mapping and
    // its gradients stay uninformative.
    const int disc_steps = 5;

    for (int epoch = 1; epoch <= ac.epochs; ++epoch) {
        double disc_loss_sum = 0.0, map_loss_sum = 0.0;
        for (int it = 0; it < iters; ++it) {
            // --- discriminator steps: mapped source labeled 1 - s, target s.
            double loss = 0.0;
            for (int step = 0; step < disc_steps; ++step) {
                std::fill(gw1.begin(), gw1.end(), 0.0);
                std::fill(gb1.begin(), gb1.end(), 0.0);
                std::fill(gw2.begin(), gw2.end(), 0.0);
                double gb2 = 0.0;
                for (int b = 0; b < 2 * bs; ++b) {
                    bool fake = b < bs;
                    const double* x;
                    if (fake) {
                        auto row = src.row((int)rng.uniform_int((uint64_t)ns));
                        std::fill(mapped.begin(), mapped.end(), 0.0);
                        for (int i = 0; i < d; ++i) {
                            double xi = row[i];
                            if (xi == 0.0) continue;
                            const double* wr = &map.w.a[(size_t)i * d];
                            for (int j = 0; j < d; ++j) mapped[j] += xi * wr[j];
                        }
                        x = mapped.data();
                    } else {
                        x = tgt.row((int)rng.uniform_int((uint64_t)nt)).data();
                    }
                    double y = fake ? 1.0 - smooth : smooth;
                    double p = disc.forward(x, z1, a1);
                    loss += bce(p, y);
                    double dz2 = p - y;
                    for (int i = 0; i < disc.h; ++i) {
                        double g = disc.w2[i] * dz2 * (z1[i] > 0.0 ? 1.0 : 0.2);
                        dz1[i] = g;
                        gb1[i] += g;
                        gw2[i] += a1[i] * dz2;
                        double* gr = &gw1[(size_t)i * d];
                        for (int c = 0; c < d; ++c) gr[c] += g * x[c];
                    }
                    gb2 += dz2;
                }
                double step_inv = 1.0 / (2.0 * bs);
                for (size_t i = 0; i < gw1.size(); ++i) disc.w1[i] -= lr * gw1[i] * step_inv;
                for (int i = 0; i < disc.h; ++i) {
                    disc.b1[i] -= lr * gb1[i] * step_inv;
                    disc.w2[i] -= lr * gw2[i] * step_inv;
                }
                disc.b2 -= lr * gb2 * step_inv;
            }
            disc_loss_sum += loss / (2.0 * bs * disc_steps);

            // --- mapping step: fool the (frozen) discriminator on fresh
            // mapped source samples, then pull W back toward the orthogonal
            // manifold.
            std::fill(gmap.begin(), gmap.end(), 0.0);
            double mloss = 0.0;
            for (int b = 0; b < bs; ++b) {
                auto row = src.row((int)rng.uniform_int((uint64_t)ns));
                std::fill(mapped.begin(), mapped.end(), 0.0);
                for (int i = 0; i < d; ++i) {
                    double xi = row[i];
                    if (xi == 0.0) continue;
                    const double* wr = &map.w.a[(size_t)i * d];
                    for (int j = 0; j < d; ++j) mapped[j] += xi * wr[j];
                }
                double y = smooth;  // want the discriminator to answer "real"
                double p = disc.forward(mapped.data(), z1, a1);
                mloss += bce(p, y);
                double dz2 = p - y;
                for (int i = 0; i < disc.h; ++i)
                    dz1[i] = disc.w2[i] * dz2 * (z1[i] > 0.0 ? 1.0 : 0.2);
                // d loss / d mapped = W1^T dz1; d loss / d W = x^T (dmapped)
                for (int j = 0; j < d; ++j) {
                    double dm = 0.0;
                    for (int i = 0; i < disc.h; ++i) dm += disc.w1[(size_t)i * d + j] * dz1[i];
                    for (int i = 0; i < d; ++i) gmap[(size_t)i * d + j] += row[i] * dm;
                }
            }
            double minv = 1.0 / bs;
            for (size_t i = 0; i < gmap.size(); ++i) map.w.a[i] -= lr * gmap[i] * minv;
            map_loss_sum += mloss * minv;

            // W <- (1 + beta) W - beta (W W^T) W
            Matrix wwt = matmul_tB(map.w, map.w);
            Matrix wwtw = matmul(wwt, map.w);
            for (size_t i = 0; i < map.w.a.size(); ++i)
                map.w.a[i] = (1.0 + ac.beta_ortho) * map.w.a[i] - ac.beta_ortho * wwtw.a[i];
        }
        double dl = disc_loss_sum / iters, ml = map_loss_sum / iters;
        if (!std::isfinite(dl) || !std::isfinite(ml))
            fail(ErrorKind::numeric, "adversarial: training diverged (non-finite loss)");

        double criterion = 0.0;
        build_mutual_nn_dictionary(src, tgt, map, sel, &criterion, 1);
        if (criterion > best_criterion) {
            best_criterion = criterion;
            best = map;
        }
        if (log) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "adversarial epoch %d/%d disc_loss=%.4f map_loss=%.4f criterion=%.4f",
                          epoch, ac.epochs, dl, ml, criterion);
            log(buf);
        }
    }
    best.orthogonal = false;
    return best;
}

LinearMap refine(const EmbeddingTable& src, const EmbeddingTable& tgt, const LinearMap& w0,
                 const CrossmapConfig& cfg, RefineStats* stats, const LogFn& log, int threads) {
    LinearMap map = w0;
    for (int iter = 1; iter <= cfg.refinement_iters; ++iter) {
        double mean_csls = 0.0;
        BilingualDictionary dict =
            build_mutual_nn_dictionary(src, tgt, map, cfg, &mean_csls, threads);
        if (dict.pairs.empty())
            fail(ErrorKind::numeric, "refine: induced dictionary is empty");
        map = procrustes_solve(dict, src, tgt);
        if (stats) stats->iterations.push_back({(int)dict.pairs.size(), mean_csls});
        if (log) {
            char buf[120];
            std::snprintf(buf, sizeof buf, "refine iter %d/%d dict_size=%d mean_csls=%.4f", iter,
                          cfg.refinement_iters, (int)dict.pairs.size(), mean_csls);
            log(buf);
        }
    }
    return map;
}

void save_map(const LinearMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot write map file: " + path);
    int d = map.w.rows;
    out << d << "\n";
    char buf[32];
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", map.w.at(i, j));
            out << (j ? " " : "") << buf;
        }
        out << "\n";
    }
    if (!out) fail(ErrorKind::io, "write failed: " + path);
}

LinearMap load_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open map file: " + path);
    int d = 0;
    if (!(in >> d) || d <= 0) fail(ErrorKind::parse, "map file: bad dimension header");
    LinearMap map{Matrix(d, d), false};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (!(in >> map.w.at(i, j)))
                fail(ErrorKind::parse, "map file: expected " + std::to_string(d * d) +
                                           " matrix entries");
    double extra;
    if (in >> extra) fail(ErrorKind::parse, "map file: trailing data");
    return map;
}

void save_dictionary(const BilingualDictionary& dict, const EmbeddingTable& src,
                     const EmbeddingTable& tgt, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot write dictionary file: " + path);
    for (const auto& p : dict.pairs) {
        if (p.src < 0 || p.src >= (int)src.size() || p.tgt < 0 || p.tgt >= (int)tgt.size())
            fail(ErrorKind::invalid_argument, "dictionary: index out of range");
        out << src.words[p.src] << "\t" << tgt.words[p.tgt] << "\n";
    }
    if (!out) fail(ErrorKind::io, "write failed: " + path);
}

double word_translation_precision(const EmbeddingTable& src, const EmbeddingTable& tgt,
                                  const LinearMap& map, const CrossmapConfig& cfg,
                                  const std::vector<DictPair>& gold, int threads) {
    if (gold.empty()) fail(ErrorKind::invalid_argument, "precision: empty gold dictionary");
    Matrix x = map_rows(src, map, cfg.v_cross_train);
    Matrix y = limited_rows(tgt, cfg.v_cross_train);
    int k = std::min(cfg.csls_k, std::min(x.rows, y.rows));
    if (k < 1) k = 1;
    std::vector<double> r_tgt;
    if (!cfg.mutual_nn_cosine) r_tgt = mean_topk_cosine(y, x, k, threads);

    // Group the gold targets per source word; a hit is predicting any of them.
    std::vector<int> order(gold.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return gold[a].src < gold[b].src; });

    std::vector<int> srcs;
    std::vector<std::vector<int>> tgts;
    for (int idx : order) {
        if (srcs.empty() || srcs.back() != gold[idx].src) {
            srcs.push_back(gold[idx].src);
            tgts.emplace_back();
        }
        tgts.back().push_back(gold[idx].tgt);
    }

    auto xn = matrix_row_norms(x);
    auto yn = matrix_row_norms(y);
    std::vector<int> hit(srcs.size(), 0);
    parallel_for((int)srcs.size(), threads, [&](int begin, int end) {
        std::vector<double> cos;
        for (int q = begin; q < end; ++q) {
            int i = srcs[q];
            if (i < 0 || i >= x.rows) fail(ErrorKind::invalid_argument, "precision: gold source index out of range");
            cosines_vs_rows(x.row(i), xn[i], y, yn, cos);
            double best = -1e300;
            int bj = -1;
            for (int j = 0; j < y.rows; ++j) {
                double s = cfg.mutual_nn_cosine ? cos[j] : 2.0 * cos[j] - r_tgt[j];
                if (s > best) {
                    best = s;
                    bj = j;
                }
            }
            for (int t : tgts[q])
                if (t == bj) hit[q] = 1;
        }
    });
    double hits = std::accumulate(hit.begin(), hit.end(), 0);
    return hits / (double)srcs.size();
}

} // namespace wbwt
