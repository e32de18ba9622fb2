#include "tsgresp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "tsgresp/error.hpp"

namespace tsg {

namespace {

std::size_t index_from(const nlohmann::json& v) {
    if (!v.is_number_unsigned())
        throw nlohmann::json::type_error::create(302, "series index must be a nonnegative integer",
                                                 &v);
    return v.get<std::size_t>();
}

}  // namespace

void PredictionRequest::validate(std::size_t num_series) const {
    require(dim >= 1, "embedding dimension must be at least 1");
    require(labeled.size() >= 3, "at least 3 labeled series are required, got " +
                                     std::to_string(labeled.size()));
    require(alpha > 0.0 && alpha < 1.0, "significance level must lie in (0, 1)");
    std::set<std::size_t> seen;
    for (const auto& p : labeled) {
        require(p.series < num_series, "labeled series index " + std::to_string(p.series) +
                                           " is out of range [0, " +
                                           std::to_string(num_series) + ")");
        require(std::isfinite(p.response), "labeled response is not finite");
        require(seen.insert(p.series).second,
                "labeled series " + std::to_string(p.series) + " appears twice");
    }
    for (std::size_t r : targets)
        require(r < num_series, "target series index " + std::to_string(r) +
                                    " is out of range [0, " + std::to_string(num_series) + ")");
    stress.validate();
}

PredictionReport predict_from_dissimilarity(const DissimilarityMatrix& delta,
                                            const PredictionRequest& request) {
    request.validate(delta.size());

    PredictionReport report;
    report.dissimilarity = delta;
    report.stress = smacof_minimize(delta, request.stress);
    report.z = report.stress.z;

    std::vector<double> y, z;
    for (const auto& p : request.labeled) {
        y.push_back(p.response);
        z.push_back(report.z[p.series]);
    }
    if (std::all_of(z.begin(), z.end(), [&](double v) { return v == z.front(); }))
        fail(ErrorCode::degenerate,
             "labeled series collapse to a single point in the raw-stress embedding");

    report.fit = ols_fit(y, z);
    report.f_report = f_test(y, predict(report.fit, z), request.alpha);
    for (std::size_t r : request.targets)
        report.predictions.push_back({r, predict(report.fit, report.z[r])});
    report.sigma_ratio = std::numeric_limits<double>::quiet_NaN();
    return report;
}

PredictionReport pred_tsg_resp(const LayerStack& collection, const PredictionRequest& request) {
    request.validate(collection.num_series());
    const EmbeddingStack embedding = duase(collection, request.dim);
    const DissimilarityMatrix delta = pairwise_dissimilarity(embedding);
    // Identical series differ only by rounding in their embeddings.
    double scale = 0.0;
    for (const Matrix& x : embedding.left)
        scale = std::max(scale, x.rowwise().norm().maxCoeff());
    if (delta.max_entry() <= 1e3 * std::numeric_limits<double>::epsilon() * scale)
        fail(ErrorCode::degenerate, "all series have numerically identical embeddings");
    PredictionReport report = predict_from_dissimilarity(delta, request);
    report.singular_values = embedding.sigma;
    if (embedding.sigma.size() >= 2 && embedding.sigma(0) > 0.0)
        report.sigma_ratio = embedding.sigma(1) / embedding.sigma(0);
    return report;
}

PredictionRequest request_from_json(const std::string& text) {
    PredictionRequest req;
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.contains("d"))
            req.dim = index_from(j["d"]);
        req.alpha = j.value("alpha", req.alpha);
        for (const auto& p : j.at("labeled"))
            req.labeled.push_back({index_from(p.at("series")), p.at("response").get<double>()});
        for (const auto& r : j.at("targets"))
            req.targets.push_back(index_from(r));
        if (j.contains("stress")) {
            const auto& s = j["stress"];
            req.stress.max_iters = s.value("max_iters", req.stress.max_iters);
            req.stress.rel_tol = s.value("rel_tol", req.stress.rel_tol);
            req.stress.restarts = s.value("restarts", req.stress.restarts);
            req.stress.seed = s.value("seed", req.stress.seed);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::format, std::string("malformed prediction request: ") + e.what());
    }
    return req;
}

namespace {

nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string report_to_json(const PredictionReport& report) {
    nlohmann::ordered_json j;
    j["z"] = report.z;
    j["fit"] = {{"intercept", report.fit.intercept},
                {"slope", report.fit.slope},
                {"count", report.fit.count}};
    auto preds = nlohmann::ordered_json::array();
    for (const auto& p : report.predictions)
        preds.push_back({{"series", p.series}, {"value", p.value}});
    j["predictions"] = preds;
    const auto& f = report.f_report;
    j["f_test"] = {{"statistic", finite_or_null(f.statistic)},
                   {"df1", f.df1},
                   {"df2", f.df2},
                   {"critical_value", f.critical_value},
                   {"p_value", f.p_value},
                   {"reject", f.reject},
                   {"perfect_fit", f.perfect_fit}};
    j["diagnostics"] = {
        {"stress", report.stress.stress},
        {"iterations", report.stress.iterations},
        {"converged", report.stress.converged},
        {"restart_index", report.stress.restart_index},
        {"singular_values", std::vector<double>(report.singular_values.begin(),
                                                report.singular_values.end())},
        {"sigma_ratio", finite_or_null(report.sigma_ratio)}};
    return j.dump(2) + "\n";
}

}  // namespace tsg
