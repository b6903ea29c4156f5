#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/matrix.hpp"
#include "core/rng.hpp"
#include "core/svd.hpp"

using namespace wbwt;

namespace {

Matrix random_matrix(int rows, int cols, uint64_t seed) {
    SplitMix64 rng(seed);
    Matrix m(rows, cols);
    for (auto& v : m.a) v = rng.gaussian();
    return m;
}

// Reassembles U diag(sigma) V^T.
Matrix reconstruct(const SvdResult& s) {
    Matrix us = s.u;
    for (int i = 0; i < us.rows; ++i)
        for (int j = 0; j < us.cols; ++j) us.at(i, j) *= s.sigma[j];
    return matmul_tB(us, s.v);
}

void check_orthonormal_columns(const Matrix& m, double tol = 1e-10) {
    Matrix g = matmul_tA(m, m);
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j)
            CHECK(std::abs(g.at(i, j) - (i == j ? 1.0 : 0.0)) < tol);
}

} // namespace

TEST_CASE("reconstruction of random matrices") {
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        for (auto [p, q] : {std::pair{6, 4}, std::pair{4, 6}, std::pair{5, 5}}) {
            Matrix m = random_matrix(p, q, seed * 100 + p * 10 + q);
            SvdResult s = svd(m);
            int r = std::min(p, q);
            CHECK(s.u.rows == p);
            CHECK(s.u.cols == r);
            CHECK(s.v.rows == q);
            CHECK(s.v.cols == r);
            CHECK(frob_dist(reconstruct(s), m) < 1e-10);
            check_orthonormal_columns(s.u);
            check_orthonormal_columns(s.v);
            for (int i = 1; i < r; ++i) CHECK(s.sigma[i - 1] >= s.sigma[i]);
            for (int i = 0; i < r; ++i) CHECK(s.sigma[i] >= 0.0);
        }
    }
}

TEST_CASE("diagonal matrix has its entries as singular values") {
    Matrix m(3, 3);
    m.a = {3, 0, 0, 0, 5, 0, 0, 0, 2};
    SvdResult s = svd(m);
    CHECK(s.sigma[0] == doctest::Approx(5.0));
    CHECK(s.sigma[1] == doctest::Approx(3.0));
    CHECK(s.sigma[2] == doctest::Approx(2.0));
}

TEST_CASE("rank-deficient matrix still yields orthonormal factors") {
    Matrix m(4, 3);
    // rank 1: every row is a multiple of (1, 2, 3)
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) m.at(i, j) = (i + 1.0) * (j + 1.0);
    SvdResult s = svd(m);
    CHECK(frob_dist(reconstruct(s), m) < 1e-10);
    check_orthonormal_columns(s.u);
    check_orthonormal_columns(s.v);
    CHECK(s.sigma[1] < 1e-10);
    CHECK(s.sigma[2] < 1e-10);
}

TEST_CASE("zero matrix") {
    Matrix m(3, 2);
    SvdResult s = svd(m);
    CHECK(s.sigma[0] == doctest::Approx(0.0));
    CHECK(s.sigma[1] == doctest::Approx(0.0));
    check_orthonormal_columns(s.u);
    check_orthonormal_columns(s.v);
}

TEST_CASE("largest entry of each left singular column is positive") {
    for (uint64_t seed = 10; seed < 20; ++seed) {
        Matrix m = random_matrix(5, 5, seed);
        SvdResult s = svd(m);
        for (int j = 0; j < 5; ++j) {
            double best = 0.0;
            for (int i = 0; i < 5; ++i)
                if (std::abs(s.u.at(i, j)) > std::abs(best)) best = s.u.at(i, j);
            CHECK(best >= 0.0);
        }
    }
}

TEST_CASE("non-finite input is rejected") {
    Matrix m(2, 2);
    m.a = {1, 2, 3, std::nan("")};
    CHECK_THROWS_AS(svd(m), Error);
}
