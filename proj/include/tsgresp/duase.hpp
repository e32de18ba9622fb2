#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "tsgresp/netcore.hpp"

namespace tsg {

/// Top-d singular triplets. Columns of U and V are orthonormal, sigma is
/// descending. Signs are fixed so that the largest-magnitude entry of each
/// left singular vector is positive (lowest index wins ties).
struct SvdTriple {
    Matrix U;
    Vector sigma;
    Matrix V;
};

enum class RankMode {
    permissive,  // trailing zero singular values are returned as-is
    strict,      // throws `degenerate` if the matrix has rank below d
};

SvdTriple truncated_svd(const Matrix& m, std::size_t d, RankMode mode = RankMode::permissive);

/// Left (and right) spectral embeddings of a collection: X = U Sigma^{1/2}
/// split into N blocks of n rows, Y = V Sigma^{1/2} split into M blocks.
struct EmbeddingStack {
    std::size_t nodes = 0;
    std::size_t dim = 0;
    std::vector<Matrix> left;   // X^(k), n x d each
    std::vector<Matrix> right;  // Y^(l), n x d each; empty when not retained
    Vector sigma;               // top-d singular values of the grand matrix

    std::size_t num_series() const noexcept { return left.size(); }
    Matrix stacked_left() const;
    Matrix stacked_right() const;
};

EmbeddingStack duase(const LayerStack& collection, std::size_t d,
                     RankMode mode = RankMode::permissive);

/// X Y^T; throws `invalid_argument` when the right embeddings were not kept.
Matrix reconstruct(const EmbeddingStack& stack);

// Embedding container: <dir>/meta.json (kind "embedding", N, n, d, dtype f64,
// endianness, version, singular_values) and <dir>/embeddings.bin with the
// row-major X^(k) blocks in series order. Right embeddings are not stored.
void save_embeddings(const EmbeddingStack& stack, const std::filesystem::path& dir);
EmbeddingStack load_embeddings(const std::filesystem::path& dir);

}  // namespace tsg
