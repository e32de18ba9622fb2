#include "tsgresp/dissim.hpp"

#include <cmath>

#include "tsgresp/error.hpp"
#include "tsgresp/io.hpp"

namespace tsg {

DissimilarityMatrix::DissimilarityMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols())
        fail(ErrorCode::shape_mismatch, "dissimilarity matrix is not square");
    const Eigen::Index n = values_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        require(values_(i, i) == 0.0, "dissimilarity matrix has a nonzero diagonal entry at " +
                                          std::to_string(i));
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = values_(i, j);
            require(std::isfinite(v) && v >= 0.0,
                    "dissimilarity entry (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") is negative or not finite");
            require(v == values_(j, i), "dissimilarity matrix is not symmetric at (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
        }
    }
}

double two_inf_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(ErrorCode::shape_mismatch, "two_inf_distance: operand shapes differ");
    if (a.size() == 0)
        return 0.0;
    return (a - b).rowwise().norm().maxCoeff();
}

DissimilarityMatrix pairwise_dissimilarity(const EmbeddingStack& stack) {
    const auto N = static_cast<Eigen::Index>(stack.left.size());
    Matrix values = Matrix::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = i + 1; j < N; ++j) {
            const double v = two_inf_distance(stack.left[static_cast<std::size_t>(i)],
                                              stack.left[static_cast<std::size_t>(j)]);
            values(i, j) = v;
            values(j, i) = v;
        }
    return DissimilarityMatrix(std::move(values));
}

void save_dissimilarity_csv(const DissimilarityMatrix& delta, const std::filesystem::path& file) {
    io::write_text_atomic(file, io::matrix_csv(delta.values()));
}

DissimilarityMatrix load_dissimilarity_csv(const std::filesystem::path& file) {
    const auto rows = io::read_numeric_csv(file);
    if (rows.empty())
        fail(ErrorCode::format, file.string() + " holds no rows");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != n)
            fail(ErrorCode::shape_mismatch, file.string() + ": row " + std::to_string(i + 1) +
                                                " has " + std::to_string(row.size()) +
                                                " columns, expected " + std::to_string(n));
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = row[static_cast<std::size_t>(j)];
    }
    return DissimilarityMatrix(std::move(m));
}

}  // namespace tsg
