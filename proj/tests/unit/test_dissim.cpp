#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "errors.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"
#include "tsgresp/dissim.hpp"
#include "tsgresp/io.hpp"
#include "tsgresp/simlab.hpp"

using namespace tsg;
using testutil::caught;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    Matrix m(r, c);
    for (double& v : m.reshaped())
        v = nd(gen);
    return m;
}

oracle::Dense to_dense(const Matrix& m) {
    oracle::Dense d(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            d[static_cast<std::size_t>(i)].push_back(m(i, j));
    return d;
}

EmbeddingStack stack_of_blocks(std::vector<Matrix> blocks) {
    EmbeddingStack e;
    e.nodes = static_cast<std::size_t>(blocks.front().rows());
    e.dim = static_cast<std::size_t>(blocks.front().cols());
    e.left = std::move(blocks);
    return e;
}

}  // namespace

TEST_SUITE("dissim") {

TEST_CASE("two_inf_distance examples") {
    std::mt19937_64 gen(1);
    const Matrix a = random_matrix(4, 2, gen);
    CHECK(two_inf_distance(a, a) == 0.0);

    Matrix x1(2, 2);
    x1 << 0, 0, 3, 4;
    CHECK(two_inf_distance(x1, Matrix::Zero(2, 2)) == 5.0);

    CHECK(caught([&] { two_inf_distance(a, Matrix::Zero(4, 3)); })->code ==
          ErrorCode::shape_mismatch);
}

TEST_CASE("two_inf_distance matches the loop oracle") {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = random_matrix(7, 3, gen);
        const Matrix b = random_matrix(7, 3, gen);
        CHECK(std::abs(two_inf_distance(a, b) -
                       oracle::max_row_norm_of_difference(to_dense(a), to_dense(b))) < 1e-12);
    }
}

TEST_CASE("pairwise_dissimilarity: identical blocks and N = 2") {
    std::mt19937_64 gen(3);
    const Matrix x = random_matrix(5, 2, gen);
    const DissimilarityMatrix zero = pairwise_dissimilarity(stack_of_blocks({x, x, x}));
    CHECK(zero.values().isZero(0.0));

    const Matrix y = random_matrix(5, 2, gen);
    const DissimilarityMatrix two = pairwise_dissimilarity(stack_of_blocks({x, y}));
    const double delta = two_inf_distance(x, y);
    CHECK(two(0, 0) == 0.0);
    CHECK(two(1, 1) == 0.0);
    CHECK(two(0, 1) == delta);
    CHECK(two(1, 0) == delta);
}

TEST_CASE("pairwise_dissimilarity invariants") {
    std::mt19937_64 gen(4);
    std::vector<Matrix> blocks;
    for (int k = 0; k < 6; ++k)
        blocks.push_back(random_matrix(8, 3, gen));
    const DissimilarityMatrix d = pairwise_dissimilarity(stack_of_blocks(blocks));
    CHECK(d.values() == d.values().transpose());
    CHECK(d.values().diagonal().isZero(0.0));
    CHECK(d.values().minCoeff() >= 0.0);

    const Eigen::HouseholderQR<Matrix> qr(random_matrix(3, 3, gen));
    const Matrix q = qr.householderQ();
    std::vector<Matrix> rotated, scaled;
    for (const Matrix& b : blocks) {
        rotated.push_back(b * q);
        scaled.push_back(2.5 * b);
    }
    const DissimilarityMatrix dr = pairwise_dissimilarity(stack_of_blocks(rotated));
    const DissimilarityMatrix ds = pairwise_dissimilarity(stack_of_blocks(scaled));
    CHECK((dr.values() - d.values()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ds.values() - 2.5 * d.values()).cwiseAbs().maxCoeff() <=
          4.0 * std::numeric_limits<double>::epsilon() * ds.max_entry());
}

TEST_CASE("population dissimilarities track scaled latent gaps") {
    // Rows of the probability matrix are constant within a series block, so the
    // leading embedding column is proportional to t and the gap is |t_k1 - t_k2|
    // up to the second, near-null column.
    const SimInstance inst = gen_instance({3}, GeneratorParams{}, 2);
    const EmbeddingStack e = duase(inst.probs.stack(), 2);
    const DissimilarityMatrix d = pairwise_dissimilarity(e);
    const std::size_t N = inst.t.size();
    std::size_t pa = 0, pb = 1;
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b)
            if (std::abs(inst.t[a] - inst.t[b]) > std::abs(inst.t[pa] - inst.t[pb])) {
                pa = a;
                pb = b;
            }
    const double scale = d(pa, pb) / std::abs(inst.t[pa] - inst.t[pb]);
    // Entries of the second embedding column are bounded by sqrt(sigma_2).
    const double tol = 1e-12 + 4.0 * std::sqrt(e.sigma(1));
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b)
            CHECK(std::abs(d(a, b) - scale * std::abs(inst.t[a] - inst.t[b])) <= tol);
    CHECK(tol < 1e-5 * d.max_entry());
}

TEST_CASE("DissimilarityMatrix validation") {
    Matrix ok(2, 2);
    ok << 0, 1, 1, 0;
    CHECK_FALSE(caught([&] { DissimilarityMatrix d(ok); }));
    Matrix asym = ok;
    asym(0, 1) = 1.0000001;
    CHECK(caught([&] { DissimilarityMatrix d(asym); })->code == ErrorCode::invalid_argument);
    Matrix diag = ok;
    diag(1, 1) = 0.5;
    CHECK(caught([&] { DissimilarityMatrix d(diag); })->code == ErrorCode::invalid_argument);
    Matrix neg = ok;
    neg(0, 1) = neg(1, 0) = -1;
    CHECK(caught([&] { DissimilarityMatrix d(neg); })->code == ErrorCode::invalid_argument);
    CHECK(caught([&] { DissimilarityMatrix d(Matrix::Zero(2, 3)); })->code ==
          ErrorCode::shape_mismatch);
}

TEST_CASE("dissimilarity CSV round-trips bit-exactly") {
    testutil::TempDir tmp;
    std::mt19937_64 gen(6);
    std::vector<Matrix> blocks;
    for (int k = 0; k < 5; ++k)
        blocks.push_back(random_matrix(4, 2, gen));
    const DissimilarityMatrix d = pairwise_dissimilarity(stack_of_blocks(blocks));
    save_dissimilarity_csv(d, tmp / "d.csv");
    CHECK(load_dissimilarity_csv(tmp / "d.csv").values() == d.values());

    io::write_text_atomic(tmp / "ragged.csv", "0,1\n1\n");
    CHECK(caught([&] { load_dissimilarity_csv(tmp / "ragged.csv"); })->code ==
          ErrorCode::shape_mismatch);
    io::write_text_atomic(tmp / "asym.csv", "0,1\n2,0\n");
    CHECK(caught([&] { load_dissimilarity_csv(tmp / "asym.csv"); })->code ==
          ErrorCode::invalid_argument);
}

}  // TEST_SUITE
