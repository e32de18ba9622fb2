#pragma once

#include <cstddef>

#include "tsgresp/netcore.hpp"

namespace tsg::detail {

struct TopSvd {
    Matrix U;      // rows(a) x d
    Vector sigma;  // d, descending, nonnegative
    Matrix V;      // cols(a) x d
};

/// Golub-Kahan-Reinsch SVD: Householder bidiagonalization followed by
/// implicit-shift QR on the bidiagonal. Rotations are logged rather than
/// accumulated so that only the d requested singular vectors are formed.
TopSvd golub_kahan_svd(const Matrix& a, std::size_t d);

}  // namespace tsg::detail
