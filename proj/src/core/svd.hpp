#pragma once

#include <vector>

#include "matrix.hpp"

namespace wbwt {

// Thin SVD: m = U * diag(sigma) * V^T with U (p x r), V (q x r), r = min(p, q).
// sigma is non-negative and non-increasing. Sign ambiguity is resolved by
// making the largest-magnitude entry of each column of U positive.
struct SvdResult {
    Matrix u;
    std::vector<double> sigma;
    Matrix v;
};

SvdResult svd(const Matrix& m);

} // namespace wbwt
