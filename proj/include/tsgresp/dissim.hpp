#pragma once

#include <cstddef>
#include <filesystem>

#include "tsgresp/duase.hpp"

namespace tsg {

/// Symmetric N x N matrix with zero diagonal and nonnegative entries. The
/// triangle inequality is not required.
class DissimilarityMatrix {
public:
    DissimilarityMatrix() = default;
    /// Validates symmetry (exact), zero diagonal, nonnegative finite entries.
    explicit DissimilarityMatrix(Matrix values);

    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Matrix& values() const noexcept { return values_; }
    double max_entry() const { return size() ? values_.maxCoeff() : 0.0; }

private:
    Matrix values_;
};

/// Largest Euclidean row norm of (a - b).
double two_inf_distance(const Matrix& a, const Matrix& b);

/// Entry (k1, k2) is two_inf_distance(X^(k1), X^(k2)); each unordered pair is
/// computed once and mirrored.
DissimilarityMatrix pairwise_dissimilarity(const EmbeddingStack& stack);

void save_dissimilarity_csv(const DissimilarityMatrix& delta, const std::filesystem::path& file);
DissimilarityMatrix load_dissimilarity_csv(const std::filesystem::path& file);

}  // namespace tsg
