#include "matrix.hpp"

#include <cmath>

#include "error.hpp"

namespace wbwt {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Matrix matmul(const Matrix& A, const Matrix& B) {
    if (A.cols != B.rows) fail(ErrorKind::invalid_argument, "matmul: shape mismatch");
    Matrix C(A.rows, B.cols);
    // ikj order keeps the inner loop streaming over rows of B.
    for (int i = 0; i < A.rows; ++i) {
        const double* ai = A.a.data() + static_cast<size_t>(i) * A.cols;
        double* ci = C.a.data() + static_cast<size_t>(i) * C.cols;
        for (int k = 0; k < A.cols; ++k) {
            double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = B.a.data() + static_cast<size_t>(k) * B.cols;
            for (int j = 0; j < B.cols; ++j) ci[j] += aik * bk[j];
        }
    }
    return C;
}

Matrix matmul_tA(const Matrix& A, const Matrix& B) {
    if (A.rows != B.rows) fail(ErrorKind::invalid_argument, "matmul_tA: shape mismatch");
    Matrix C(A.cols, B.cols);
    for (int k = 0; k < A.rows; ++k) {
        const double* ak = A.a.data() + static_cast<size_t>(k) * A.cols;
        const double* bk = B.a.data() + static_cast<size_t>(k) * B.cols;
        for (int i = 0; i < A.cols; ++i) {
            double aki = ak[i];
            if (aki == 0.0) continue;
            double* ci = C.a.data() + static_cast<size_t>(i) * C.cols;
            for (int j = 0; j < B.cols; ++j) ci[j] += aki * bk[j];
        }
    }
    return C;
}

Matrix matmul_tB(const Matrix& A, const Matrix& B) {
    if (A.cols != B.cols) fail(ErrorKind::invalid_argument, "matmul_tB: shape mismatch");
    Matrix C(A.rows, B.rows);
    for (int i = 0; i < A.rows; ++i) {
        const double* ai = A.a.data() + static_cast<size_t>(i) * A.cols;
        double* ci = C.a.data() + static_cast<size_t>(i) * C.cols;
        for (int j = 0; j < B.rows; ++j) {
            const double* bj = B.a.data() + static_cast<size_t>(j) * B.cols;
            double s = 0.0;
            for (int k = 0; k < A.cols; ++k) s += ai[k] * bj[k];
            ci[j] = s;
        }
    }
    return C;
}

Matrix transpose(const Matrix& A) {
    Matrix T(A.cols, A.rows);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
    return T;
}

double frob_norm(const Matrix& A) {
    double s = 0.0;
    for (double v : A.a) s += v * v;
    return std::sqrt(s);
}

double frob_dist(const Matrix& A, const Matrix& B) {
    if (A.rows != B.rows || A.cols != B.cols)
        fail(ErrorKind::invalid_argument, "frob_dist: shape mismatch");
    double s = 0.0;
    for (size_t i = 0; i < A.a.size(); ++i) {
        double d = A.a[i] - B.a[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double dot(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

double norm2(std::span<const double> u) {
    return std::sqrt(dot(u, u));
}

} // namespace wbwt
