#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "errors.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"
#include "tsgresp/dissim.hpp"
#include "tsgresp/duase.hpp"
#include "tsgresp/simlab.hpp"

using namespace tsg;
using testutil::caught;

namespace {

oracle::Dense to_dense(const Matrix& m) {
    oracle::Dense d(static_cast<std::size_t>(m.rows()),
                    std::vector<double>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    return d;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    Matrix m(r, c);
    for (double& v : m.reshaped())
        v = nd(gen);
    return m;
}

Matrix random_low_rank(Eigen::Index r, Eigen::Index c, Eigen::Index rank, std::mt19937_64& gen) {
    return random_matrix(r, rank, gen) * random_matrix(rank, c, gen);
}

double orthonormality_error(const Matrix& q) {
    return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

void check_sign_convention(const Matrix& u) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < u.rows(); ++i)
            if (std::abs(u(i, c)) > std::abs(u(best, c)))
                best = i;
        CHECK(u(best, c) > 0.0);
    }
}

LayerStack stack_from_grand(const Matrix& g, std::size_t N, std::size_t M) {
    return disassemble_grand(g, N, M);
}

}  // namespace

TEST_SUITE("duase") {

TEST_CASE("truncated_svd: all-ones 2x2") {
    const Matrix m = Matrix::Ones(2, 2);
    const SvdTriple t = truncated_svd(m, 1);
    CHECK(t.sigma(0) == doctest::Approx(2.0).epsilon(1e-14));
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(t.U(0, 0) == doctest::Approx(h).epsilon(1e-14));
    CHECK(t.U(1, 0) == doctest::Approx(h).epsilon(1e-14));
    CHECK(t.V(0, 0) == doctest::Approx(h).epsilon(1e-14));
    CHECK(t.V(1, 0) == doctest::Approx(h).epsilon(1e-14));
}

TEST_CASE("truncated_svd: diagonal matrix") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 3;
    m(1, 1) = 2;
    const SvdTriple t = truncated_svd(m, 2);
    CHECK(t.sigma(0) == doctest::Approx(3.0));
    CHECK(t.sigma(1) == doctest::Approx(2.0));
    CHECK((t.U - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((t.V - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("truncated_svd: random 12x9 against the Jacobi oracle") {
    std::mt19937_64 gen(129);
    const Matrix m = random_matrix(12, 9, gen);
    const SvdTriple t = truncated_svd(m, 4);
    const auto want = oracle::singular_values(to_dense(m));
    for (Eigen::Index i = 0; i < 4; ++i)
        CHECK(std::abs(t.sigma(i) - want[static_cast<std::size_t>(i)]) < 1e-8);
}

TEST_CASE("truncated_svd invariants over many shapes") {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 60; ++trial) {
        const auto r = static_cast<Eigen::Index>(1 + gen() % 30);
        const auto c = static_cast<Eigen::Index>(1 + gen() % 30);
        const Eigen::Index lim = std::min(r, c);
        Matrix m = trial % 3 == 0 ? random_low_rank(r, c, 1 + static_cast<Eigen::Index>(gen() % lim), gen)
                                  : random_matrix(r, c, gen);
        if (trial % 7 == 0 && r > 1)
            m.row(r / 2).setZero();
        const auto d = static_cast<std::size_t>(1 + gen() % static_cast<std::uint64_t>(lim));
        const SvdTriple t = truncated_svd(m, d);
        CAPTURE(trial);
        REQUIRE(t.U.rows() == r);
        REQUIRE(t.V.rows() == c);
        REQUIRE(t.sigma.size() == static_cast<Eigen::Index>(d));
        CHECK(orthonormality_error(t.U) < 1e-10);
        CHECK(orthonormality_error(t.V) < 1e-10);
        for (Eigen::Index i = 0; i < t.sigma.size(); ++i) {
            CHECK(t.sigma(i) >= 0.0);
            if (i > 0)
                CHECK(t.sigma(i) <= t.sigma(i - 1));
        }
        check_sign_convention(t.U);

        const auto sv = oracle::singular_values(to_dense(m));
        double tail = 0.0;
        for (std::size_t i = d; i < sv.size(); ++i)
            tail += sv[i] * sv[i];
        const double resid = (m - t.U * t.sigma.asDiagonal() * t.V.transpose()).squaredNorm();
        CHECK(std::abs(resid - tail) <= 1e-6 * tail + 1e-12 * m.squaredNorm());
    }
}

TEST_CASE("truncated_svd: singular vectors satisfy m v = sigma u") {
    std::mt19937_64 gen(5);
    const Matrix m = random_matrix(25, 18, gen);
    const SvdTriple t = truncated_svd(m, 6);
    CHECK((m * t.V - t.U * t.sigma.asDiagonal()).cwiseAbs().maxCoeff() < 1e-12 * t.sigma(0) * 25);
    CHECK((m.transpose() * t.U - t.V * t.sigma.asDiagonal()).cwiseAbs().maxCoeff() <
          1e-12 * t.sigma(0) * 25);
}

TEST_CASE("truncated_svd: wide and tall orientations agree") {
    std::mt19937_64 gen(31);
    const Matrix m = random_matrix(7, 19, gen);
    const SvdTriple wide = truncated_svd(m, 5);
    const SvdTriple tall = truncated_svd(m.transpose(), 5);
    CHECK((wide.sigma - tall.sigma).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("truncated_svd: large exactly rank-one matrix stays finite") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.2, 0.5);
    Vector a(300), b(260);
    for (double& v : a)
        v = u(gen);
    for (double& v : b)
        v = u(gen);
    const Matrix m = a * b.transpose();
    const SvdTriple t = truncated_svd(m, 2);
    CHECK(t.U.allFinite());
    CHECK(t.V.allFinite());
    CHECK(t.sigma(0) == doctest::Approx(a.norm() * b.norm()).epsilon(1e-12));
    CHECK(t.sigma(1) < 1e-12 * t.sigma(0));
    CHECK(orthonormality_error(t.U) < 1e-10);
    CHECK(orthonormality_error(t.V) < 1e-10);
}

TEST_CASE("truncated_svd: zero matrix and repeated singular values") {
    const SvdTriple z = truncated_svd(Matrix::Zero(5, 4), 3);
    CHECK(z.sigma.isZero(0.0));
    CHECK(orthonormality_error(z.U) < 1e-12);
    CHECK(orthonormality_error(z.V) < 1e-12);

    const SvdTriple id = truncated_svd(Matrix::Identity(6, 6) * 2.5, 6);
    for (Eigen::Index i = 0; i < 6; ++i)
        CHECK(id.sigma(i) == doctest::Approx(2.5));
    CHECK(orthonormality_error(id.U) < 1e-12);
}

TEST_CASE("truncated_svd: argument and rank errors") {
    std::mt19937_64 gen(4);
    const Matrix m = random_matrix(4, 3, gen);
    CHECK(caught([&] { truncated_svd(m, 0); })->code == ErrorCode::invalid_argument);
    CHECK(caught([&] { truncated_svd(m, 4); })->code == ErrorCode::invalid_argument);
    Matrix bad = m;
    bad(1, 1) = std::nan("");
    CHECK(caught([&] { truncated_svd(bad, 1); })->code == ErrorCode::numerical);

    const Matrix low = random_low_rank(6, 5, 2, gen);
    CHECK_FALSE(caught([&] { truncated_svd(low, 3); }));
    CHECK(truncated_svd(low, 3).sigma(2) < 1e-12);
    CHECK(caught([&] { truncated_svd(low, 3, RankMode::strict); })->code == ErrorCode::degenerate);
    CHECK_FALSE(caught([&] { truncated_svd(low, 2, RankMode::strict); }));
}

TEST_CASE("truncated_svd is bit-deterministic") {
    std::mt19937_64 gen(8);
    const Matrix m = random_matrix(40, 33, gen);
    const SvdTriple a = truncated_svd(m, 5);
    const SvdTriple b = truncated_svd(m, 5);
    CHECK(a.U == b.U);
    CHECK(a.V == b.V);
    CHECK(a.sigma == b.sigma);
}

TEST_CASE("duase: constant 0.5 matrix closed form") {
    const LayerStack s(1, 1, 2, {0.5, 0.5, 0.5, 0.5});
    const EmbeddingStack e = duase(s, 1);
    CHECK(e.sigma(0) == doctest::Approx(1.0).epsilon(1e-14));
    REQUIRE(e.left.size() == 1);
    CHECK(std::abs(e.left[0](0, 0) - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(e.left[0](1, 0) - std::sqrt(0.5)) < 1e-12);
}

TEST_CASE("duase: slices are the rows of U sqrt(Sigma)") {
    std::mt19937_64 gen(10);
    const std::size_t N = 3, M = 2, n = 4, d = 3;
    const Matrix g = random_matrix(12, 8, gen);
    const EmbeddingStack e = duase(stack_from_grand(g, N, M), d);
    REQUIRE(e.left.size() == N);
    REQUIRE(e.right.size() == M);
    const SvdTriple t = truncated_svd(g, d);
    const Matrix x = t.U * t.sigma.cwiseSqrt().asDiagonal();
    const Matrix y = t.V * t.sigma.cwiseSqrt().asDiagonal();
    CHECK(e.stacked_left() == x);
    CHECK(e.stacked_right() == y);
    for (std::size_t k = 0; k < N; ++k)
        CHECK(e.left[k] == x.middleRows(static_cast<Eigen::Index>(k * n), n));
}

TEST_CASE("duase: full rank reconstructs the grand matrix") {
    std::mt19937_64 gen(12);
    for (auto [N, M, n] : {std::array<std::size_t, 3>{2, 3, 3}, {3, 1, 4}, {1, 1, 5}}) {
        const Matrix g = random_matrix(static_cast<Eigen::Index>(N * n),
                                       static_cast<Eigen::Index>(M * n), gen);
        const std::size_t d = static_cast<std::size_t>(std::min(g.rows(), g.cols()));
        const EmbeddingStack e = duase(stack_from_grand(g, N, M), d);
        CHECK((reconstruct(e) - g).norm() / g.norm() < 1e-8);
    }
}

TEST_CASE("duase: generator probability matrix is reconstructed at d = 2") {
    for (std::size_t K : {1u, 2u, 3u}) {
        const SimInstance inst = gen_instance({K}, GeneratorParams{}, 0);
        const Matrix p = assemble_grand(inst.probs.stack());
        const EmbeddingStack e = duase(inst.probs.stack(), 2);
        CHECK((reconstruct(e) - p).norm() / p.norm() < 1e-8);
    }
}

TEST_CASE("duase: rank d+1 input leaves the oracle tail") {
    std::mt19937_64 gen(14);
    const Matrix g = random_low_rank(12, 9, 3, gen);
    const EmbeddingStack e = duase(stack_from_grand(g, 4, 3), 2);
    const auto sv = oracle::singular_values(to_dense(g));
    CHECK((reconstruct(e) - g).norm() == doctest::Approx(sv[2]).epsilon(1e-6));
}

TEST_CASE("duase: orthogonal alignment leaves 2,inf distances unchanged") {
    std::mt19937_64 gen(16);
    const EmbeddingStack e = duase(stack_from_grand(random_matrix(15, 10, gen), 3, 2), 3);
    const Eigen::HouseholderQR<Matrix> qr(random_matrix(3, 3, gen));
    const Matrix q = qr.householderQ();
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            const double plain = two_inf_distance(e.left[a], e.left[b]);
            const double rotated = two_inf_distance(e.left[a] * q, e.left[b] * q);
            CHECK(std::abs(plain - rotated) < 1e-12);
        }
}

TEST_CASE("reconstruct requires right embeddings") {
    std::mt19937_64 gen(18);
    EmbeddingStack e = duase(stack_from_grand(random_matrix(4, 4, gen), 2, 2), 1);
    e.right.clear();
    CHECK(caught([&] { reconstruct(e); })->code == ErrorCode::invalid_argument);
}

TEST_CASE("embedding container round-trips") {
    testutil::TempDir tmp;
    std::mt19937_64 gen(20);
    const EmbeddingStack e = duase(stack_from_grand(random_matrix(12, 6, gen), 4, 2), 2);
    save_embeddings(e, tmp / "emb");
    const EmbeddingStack back = load_embeddings(tmp / "emb");
    REQUIRE(back.left.size() == e.left.size());
    for (std::size_t k = 0; k < e.left.size(); ++k)
        CHECK(back.left[k] == e.left[k]);
    CHECK(back.sigma == e.sigma);
    CHECK(caught([&] { load_embeddings(tmp / "missing"); }));
}

}  // TEST_SUITE
