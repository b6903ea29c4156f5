#include "svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace wbwt {

namespace {

// One-sided Jacobi (Hestenes) on the columns of B (p x q, p >= q).
// On return, columns of B are mutually orthogonal and equal U * diag(sigma);
// V accumulates the applied rotations so that B_in * V = B_out.
void jacobi_orthogonalize(Matrix& B, Matrix& V) {
    const int p = B.rows;
    const int q = B.cols;
    const double tol = 1e-14;
    const int max_sweeps = 60;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (int i = 0; i < q - 1; ++i) {
            for (int j = i + 1; j < q; ++j) {
                double aii = 0.0, ajj = 0.0, aij = 0.0;
                for (int r = 0; r < p; ++r) {
                    double bi = B.at(r, i), bj = B.at(r, j);
                    aii += bi * bi;
                    ajj += bj * bj;
                    aij += bi * bj;
                }
                if (std::abs(aij) <= tol * std::sqrt(aii * ajj)) continue;
                rotated = true;

                double tau = (ajj - aii) / (2.0 * aij);
                double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;

                for (int r = 0; r < p; ++r) {
                    double bi = B.at(r, i), bj = B.at(r, j);
                    B.at(r, i) = c * bi - s * bj;
                    B.at(r, j) = s * bi + c * bj;
                }
                for (int r = 0; r < q; ++r) {
                    double vi = V.at(r, i), vj = V.at(r, j);
                    V.at(r, i) = c * vi - s * vj;
                    V.at(r, j) = s * vi + c * vj;
                }
            }
        }
        if (!rotated) break;
    }
}

// Fill near-null columns of U with unit vectors orthogonal to all other
// columns so U keeps orthonormal columns even for rank-deficient input.
void complete_basis(Matrix& U, const std::vector<bool>& needs_fill) {
    const int p = U.rows;
    const int q = U.cols;
    for (int k = 0; k < q; ++k) {
        if (!needs_fill[k]) continue;
        for (int cand = 0; cand < p; ++cand) {
            std::vector<double> v(p, 0.0);
            v[cand] = 1.0;
            for (int c = 0; c < q; ++c) {
                if (needs_fill[c] && c >= k) continue;  // only project on settled columns
                double d = 0.0;
                for (int r = 0; r < p; ++r) d += v[r] * U.at(r, c);
                for (int r = 0; r < p; ++r) v[r] -= d * U.at(r, c);
            }
            double n = 0.0;
            for (double x : v) n += x * x;
            n = std::sqrt(n);
            if (n > 1e-6) {
                for (int r = 0; r < p; ++r) U.at(r, k) = v[r] / n;
                break;
            }
        }
    }
}

} // namespace

SvdResult svd(const Matrix& m) {
    for (double x : m.a)
        if (!std::isfinite(x)) fail(ErrorKind::numeric, "svd: non-finite input");

    if (m.rows < m.cols) {
        SvdResult t = svd(transpose(m));
        return SvdResult{std::move(t.v), std::move(t.sigma), std::move(t.u)};
    }

    const int p = m.rows;
    const int q = m.cols;
    Matrix B = m;
    Matrix V = Matrix::identity(q);
    jacobi_orthogonalize(B, V);

    std::vector<double> sigma(q);
    for (int j = 0; j < q; ++j) {
        double s = 0.0;
        for (int r = 0; r < p; ++r) s += B.at(r, j) * B.at(r, j);
        sigma[j] = std::sqrt(s);
    }

    std::vector<int> order(q);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sigma[a] > sigma[b]; });

    double smax = 0.0;
    for (double s : sigma) smax = std::max(smax, s);
    const double null_tol = (smax > 0.0 ? smax : 1.0) * 1e-13;

    SvdResult out;
    out.u = Matrix(p, q);
    out.v = Matrix(q, q);
    out.sigma.resize(q);
    std::vector<bool> needs_fill(q, false);
    for (int k = 0; k < q; ++k) {
        int src = order[k];
        out.sigma[k] = sigma[src];
        for (int r = 0; r < q; ++r) out.v.at(r, k) = V.at(r, src);
        if (sigma[src] > null_tol) {
            for (int r = 0; r < p; ++r) out.u.at(r, k) = B.at(r, src) / sigma[src];
        } else {
            needs_fill[k] = true;
        }
    }
    complete_basis(out.u, needs_fill);

    // Deterministic signs: largest-magnitude entry of each U column positive.
    for (int k = 0; k < q; ++k) {
        int arg = 0;
        double best = -1.0;
        for (int r = 0; r < p; ++r) {
            double v = std::abs(out.u.at(r, k));
            if (v > best) {
                best = v;
                arg = r;
            }
        }
        if (out.u.at(arg, k) < 0.0) {
            for (int r = 0; r < p; ++r) out.u.at(r, k) = -out.u.at(r, k);
            for (int r = 0; r < q; ++r) out.v.at(r, k) = -out.v.at(r, k);
        }
    }
    return out;
}

} // namespace wbwt
