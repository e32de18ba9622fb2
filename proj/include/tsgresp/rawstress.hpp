#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tsgresp/dissim.hpp"

namespace tsg {

struct StressConfig {
    std::size_t max_iters = 1000;
    double rel_tol = 1e-10;      // stop when the relative stress decrease falls below this
    std::size_t restarts = 4;    // random starts in addition to the classical-MDS start
    std::uint64_t seed = 0;      // drives the random starts

    void validate() const;
};

struct StressResult {
    std::vector<double> z;       // canonicalized
    double stress = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::size_t restart_index = 0;  // 0 is the classical-MDS start
    std::vector<double> trace;      // stress before the first and after every iteration
};

/// Sum over all ordered pairs (i, j) of (|z_i - z_j| - delta_ij)^2, unit weights.
double raw_stress(std::span<const double> z, const DissimilarityMatrix& delta);

/// sqrt(lambda_1) v_1 of B = -1/2 H (delta o delta) H, or zeros when lambda_1 <= 0.
std::vector<double> classical_mds_1d(const DissimilarityMatrix& delta);

/// One majorization chain from `start`. The result is not canonicalized and
/// restart_index is left at 0.
StressResult smacof_chain(const DissimilarityMatrix& delta, std::vector<double> start,
                          const StressConfig& config);

/// Classical-MDS chain plus `config.restarts` random chains; the lowest
/// (stress, restart index) wins.
StressResult smacof_minimize(const DissimilarityMatrix& delta, const StressConfig& config = {});

/// Zero mean, then sign chosen so that sum_i i * z_i >= 0 (1-based i).
/// Idempotent bit-for-bit.
std::vector<double> canonicalize(std::vector<double> z);

}  // namespace tsg
