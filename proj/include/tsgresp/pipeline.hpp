#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsgresp/dissim.hpp"
#include "tsgresp/duase.hpp"
#include "tsgresp/rawstress.hpp"
#include "tsgresp/regress.hpp"

namespace tsg {

struct LabeledPoint {
    std::size_t series = 0;  // 0-based series index
    double response = 0.0;
};

/// Everything the prediction needs besides the collection itself.
struct PredictionRequest {
    std::size_t dim = 2;
    std::vector<LabeledPoint> labeled;  // at least 3, distinct series
    std::vector<std::size_t> targets;
    StressConfig stress;
    double alpha = 0.05;

    void validate(std::size_t num_series) const;
};

struct Prediction {
    std::size_t series = 0;
    double value = 0.0;
};

struct PredictionReport {
    std::vector<double> z;                // raw-stress embedding of every series
    LinearFit fit;                        // on the labeled subset
    std::vector<Prediction> predictions;  // in request target order
    FTestReport f_report;                 // of the labeled fit
    StressResult stress;
    Vector singular_values;               // top-d of the grand matrix
    double sigma_ratio = 0.0;             // sigma_2 / sigma_1, NaN when d = 1
    DissimilarityMatrix dissimilarity;
};

/// Embed, compute dissimilarities, reduce to one dimension, regress the
/// labeled responses on the embedding and predict at each target.
PredictionReport pred_tsg_resp(const LayerStack& collection, const PredictionRequest& request);

/// The same procedure starting from precomputed dissimilarities.
PredictionReport predict_from_dissimilarity(const DissimilarityMatrix& delta,
                                            const PredictionRequest& request);

// JSON request / report.
//   request: {"d": 2, "labeled": [{"series": 0, "response": 1.5}, ...],
//             "targets": [5], "alpha": 0.05,
//             "stress": {"max_iters": 1000, "rel_tol": 1e-10, "restarts": 4, "seed": 0}}
// Only "labeled" and "targets" are mandatory.
PredictionRequest request_from_json(const std::string& text);
std::string report_to_json(const PredictionReport& report);

}  // namespace tsg
