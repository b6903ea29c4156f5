#pragma once

#include <span>
#include <vector>

namespace wbwt {

// Dense row-major double matrix. Small on purpose: the toolkit only needs
// products, transposes and norms at desk scale.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    std::span<double> row(int r) { return {a.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)}; }
    std::span<const double> row(int r) const { return {a.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)}; }

    static Matrix identity(int n);
};

Matrix matmul(const Matrix& A, const Matrix& B);          // A * B
Matrix matmul_tA(const Matrix& A, const Matrix& B);       // A^T * B
Matrix matmul_tB(const Matrix& A, const Matrix& B);       // A * B^T
Matrix transpose(const Matrix& A);
double frob_norm(const Matrix& A);
double frob_dist(const Matrix& A, const Matrix& B);

double dot(std::span<const double> u, std::span<const double> v);
double norm2(std::span<const double> u);

} // namespace wbwt
