#pragma once

// Synthetic time series of networks with a latent scalar per series, and the
// Monte Carlo experiments that track how far embedding-based regression is
// from regression on the latent scalars as the networks grow.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tsgresp/netcore.hpp"
#include "tsgresp/rawstress.hpp"

namespace tsg {

/// Sizes at growth index K >= 1: n = 15 + floor((K-1)^1.5), N = 10 + (K-1),
/// M = 8 + (K-1).
struct GrowthSchedule {
    std::size_t K = 1;

    std::size_t nodes() const;
    std::size_t series() const;
    std::size_t layers() const;
};

struct GeneratorParams {
    std::size_t labeled = 5;     // s
    double alpha = 2.0;          // intercept
    double beta = 8.0;           // slope
    double noise_sd = 0.01;      // sigma_epsilon
    std::size_t dim = 2;         // d
    double right_lo = 0.2;       // right latent entries ~ Uniform(right_lo, right_hi)
    double right_hi = 0.5;
    std::uint64_t base_seed = 0;

    void validate(const GrowthSchedule& schedule) const;
};

struct SimInstance {
    GrowthSchedule schedule;
    ProbabilityCollection probs{LayerStack(1, 1, 1)};
    Matrix left_latent;              // nN x d, block k = t_k / sqrt(d) * ones(n, d)
    Matrix right_latent;             // nM x d
    std::vector<double> t;           // N latent scalars
    std::vector<double> y;           // responses of the first s series
    std::size_t clamped = 0;         // probabilities that exceeded 1
    std::uint64_t sampling_seed = 0; // for sample_adjacency
};

/// The grand probability matrix (left_latent * right_latent^T) split into
/// members, with entries above 1 clamped and counted.
ProbabilityCollection probability_from_latents(const Matrix& left_latent,
                                               const Matrix& right_latent, std::size_t series,
                                               std::size_t layers, std::size_t* clamped = nullptr);

/// Block k of the left latent matrix is t_k / sqrt(d) times the n x d ones matrix.
Matrix left_latent_from_scalars(std::span<const double> t, std::size_t nodes, std::size_t dim);

/// All draws come from counter streams keyed by (base_seed, K, replicate).
SimInstance gen_instance(const GrowthSchedule& schedule, const GeneratorParams& params,
                         std::uint64_t replicate);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentOptions {
    GeneratorParams params;
    std::vector<std::size_t> k_grid;
    std::size_t reps = 1;
    double alpha_tilde = 0.05;
    std::size_t threads = 1;          // never changes results
    StressConfig stress;
    bool population_variant = false;  // also embed the probability matrices directly
};

struct ReplicateRow {
    std::size_t replicate = 0;
    bool ok = true;
    std::string error;
    std::vector<double> values;  // one per ExperimentCurve::value_columns
};

struct CurvePoint {
    std::size_t K = 0;
    std::size_t n = 0;
    std::size_t N = 0;
    std::size_t M = 0;
    std::size_t failed = 0;
    double summary = 0.0;
    std::vector<double> stats;  // one per ExperimentCurve::stat_columns
    std::vector<ReplicateRow> rows;
};

struct ExperimentCurve {
    std::string name;
    std::string summary_label;
    std::vector<std::string> value_columns;
    std::vector<std::string> stat_columns;
    std::vector<CurvePoint> points;

    std::vector<double> summaries() const;
    std::vector<double> stat(const std::string& column) const;
    std::size_t failed() const;
};

/// Per replicate: squared gap between the prediction at series s+1 from the
/// latent scalars and from the embedding pipeline. Summary: mean over
/// replicates. With population_variant, also the gap when embedding the
/// probabilities and the largest |dissimilarity(A) - dissimilarity(P)|.
ExperimentCurve experiment_prediction_convergence(const ExperimentOptions& options);

/// Per replicate: F statistics of the labeled fit on the latent scalars (F*)
/// and on the embedding (F-hat). Summary: |rejection rate(F-hat) - rejection rate(F*)|.
ExperimentCurve experiment_power_convergence(const ExperimentOptions& options);

struct SingularValueRow {
    std::size_t K = 0;
    std::size_t n = 0;
    std::size_t N = 0;
    std::size_t M = 0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double ratio = 0.0;
};

/// Top two singular values of one generated grand probability matrix per K.
std::vector<SingularValueRow> singular_value_table(const GeneratorParams& params,
                                                   std::span<const std::size_t> k_grid,
                                                   std::uint64_t replicate = 0);

/// Runs body(0 .. count-1) on up to `threads` workers.
void run_indexed(std::size_t count, std::size_t threads,
                 const std::function<void(std::size_t)>& body);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// Outputs
std::string curve_replicates_csv(const ExperimentCurve& curve);
std::string curve_summary_csv(const ExperimentCurve& curve);
std::string curve_svg(const ExperimentCurve& curve, const std::string& title);
std::string singular_value_csv(std::span<const SingularValueRow> rows);
std::string singular_value_svg(std::span<const SingularValueRow> rows);

}  // namespace tsg
