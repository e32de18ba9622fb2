#include "tsgresp/rawstress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "summation.hpp"
#include "tsgresp/error.hpp"
#include "tsgresp/rng.hpp"

namespace tsg {

namespace {

constexpr double kStressFloor = 1e-300;

void require_length(std::size_t got, const DissimilarityMatrix& delta) {
    if (got != delta.size())
        fail(ErrorCode::shape_mismatch, "embedding has " + std::to_string(got) +
                                            " points but the dissimilarity matrix is " +
                                            std::to_string(delta.size()) + " x " +
                                            std::to_string(delta.size()));
}

// 1-D Guttman transform with unit weights. B(z) z reduces to
// sum_j delta_ij * sign(z_i - z_j), with ties contributing nothing.
void guttman_step(const DissimilarityMatrix& delta, const std::vector<double>& z,
                  std::vector<double>& next) {
    const std::size_t n = z.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (z[i] > z[j])
                acc += delta(i, j);
            else if (z[i] < z[j])
                acc -= delta(i, j);
        }
        next[i] = acc * inv_n;
    }
}

}  // namespace

void StressConfig::validate() const {
    require(max_iters >= 1, "max_iters must be at least 1");
    require(rel_tol > 0.0 && std::isfinite(rel_tol), "rel_tol must be positive");
}

double raw_stress(std::span<const double> z, const DissimilarityMatrix& delta) {
    require_length(z.size(), delta);
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double r = std::abs(z[i] - z[j]) - delta(i, j);
            total += r * r;
        }
    return total;
}

std::vector<double> classical_mds_1d(const DissimilarityMatrix& delta) {
    const std::size_t n = delta.size();
    require(n >= 2, "classical MDS needs at least 2 points");
    const auto ni = static_cast<Eigen::Index>(n);
    const Matrix sq = delta.values().cwiseProduct(delta.values());
    const Matrix centering =
        Matrix::Identity(ni, ni) - Matrix::Constant(ni, ni, 1.0 / static_cast<double>(n));
    Matrix b = -0.5 * centering * sq * centering;
    b = 0.5 * (b + b.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
    if (eig.info() != Eigen::Success)
        fail(ErrorCode::numerical, "eigen-decomposition failed in classical MDS");
    const double lambda = eig.eigenvalues()(ni - 1);
    std::vector<double> z(n, 0.0);
    if (!(lambda > 0.0))
        return z;
    const double scale = std::sqrt(lambda);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = scale * eig.eigenvectors()(static_cast<Eigen::Index>(i), ni - 1);
    return z;
}

StressResult smacof_chain(const DissimilarityMatrix& delta, std::vector<double> start,
                          const StressConfig& config) {
    config.validate();
    require(delta.size() >= 2, "stress minimization needs at least 2 points");
    require_length(start.size(), delta);

    StressResult r;
    r.z = std::move(start);
    r.stress = raw_stress(r.z, delta);
    r.trace.push_back(r.stress);

    std::vector<double> next(r.z.size());
    while (r.iterations < config.max_iters) {
        guttman_step(delta, r.z, next);
        const double s = raw_stress(next, delta);
        ++r.iterations;
        const double prev = r.stress;
        r.z.swap(next);
        r.stress = s;
        r.trace.push_back(s);
        if ((prev - s) / std::max(prev, kStressFloor) < config.rel_tol) {
            r.converged = true;
            break;
        }
    }
    return r;
}

StressResult smacof_minimize(const DissimilarityMatrix& delta, const StressConfig& config) {
    config.validate();
    const std::size_t n = delta.size();
    require(n >= 2, "stress minimization needs at least 2 points");

    StressResult best = smacof_chain(delta, classical_mds_1d(delta), config);
    const double radius = delta.max_entry();
    for (std::size_t r = 1; r <= config.restarts; ++r) {
        const auto rng = CounterRng::from(config.seed, {r});
        std::vector<double> start(n);
        for (std::size_t i = 0; i < n; ++i)
            start[i] = rng.uniform(i, -radius, radius);
        StressResult cand = smacof_chain(delta, std::move(start), config);
        if (cand.stress < best.stress) {
            cand.restart_index = r;
            best = std::move(cand);
        }
    }
    best.z = canonicalize(std::move(best.z));
    return best;
}

std::vector<double> canonicalize(std::vector<double> z) {
    if (z.empty())
        return z;
    // Centre until the mean is at rounding level of the entries; the exit test
    // is what a second call evaluates first, which makes this idempotent.
    for (int pass = 0; pass < 8; ++pass) {
        double biggest = 0.0;
        for (double v : z)
            biggest = std::max(biggest, std::abs(v));
        const double mean = detail::compensated_sum(z) / static_cast<double>(z.size());
        const double noise = 4.0 * static_cast<double>(z.size()) *
                             std::numeric_limits<double>::epsilon() * biggest;
        if (std::abs(mean) <= noise)
            break;
        for (double& v : z)
            v -= mean;
    }

    double moment = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        moment += static_cast<double>(i + 1) * z[i];
    if (moment < 0.0)
        for (double& v : z)
            v = -v;
    return z;
}

}  // namespace tsg
