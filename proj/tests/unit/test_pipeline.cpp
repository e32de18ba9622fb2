#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "errors.hpp"
#include "tsgresp/pipeline.hpp"
#include "tsgresp/simlab.hpp"

using namespace tsg;
using testutil::caught;

namespace {

PredictionRequest request_for(const SimInstance& inst, std::vector<std::size_t> targets) {
    PredictionRequest req;
    req.dim = 2;
    for (std::size_t k = 0; k < inst.y.size(); ++k)
        req.labeled.push_back({k, inst.y[k]});
    req.targets = std::move(targets);
    return req;
}

// OLS on the latent scalars of the labeled series, evaluated at target r.
double latent_prediction(const SimInstance& inst, std::size_t r) {
    const std::vector<double> t(inst.t.begin(), inst.t.begin() + static_cast<long>(inst.y.size()));
    return predict(ols_fit(inst.y, t), inst.t[r]);
}

DissimilarityMatrix latent_distances(const std::vector<double>& t, double scale) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = scale * std::abs(t[static_cast<std::size_t>(i)] - t[static_cast<std::size_t>(j)]);
    return DissimilarityMatrix(m);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("pred_tsg_resp on a sampled K = 1 instance") {
    const SimInstance inst = gen_instance({1}, GeneratorParams{}, 3);
    const MultilayerCollection adj = sample_adjacency(inst.probs, inst.sampling_seed);
    const PredictionReport rep = pred_tsg_resp(adj.stack(), request_for(inst, {5}));
    REQUIRE(rep.predictions.size() == 1);
    CHECK(rep.predictions[0].series == 5);
    CHECK(std::isfinite(rep.predictions[0].value));
    CHECK(rep.z.size() == 10);
    CHECK(rep.fit.count == 5);
    CHECK(rep.singular_values.size() == 2);
    CHECK(rep.sigma_ratio == doctest::Approx(rep.singular_values(1) / rep.singular_values(0)));
    CHECK(rep.f_report.df2 == 3);
    CHECK(rep.stress.stress >= 0.0);
    CHECK(rep.dissimilarity.size() == 10);
}

TEST_CASE("identical series give a degenerate embedding error") {
    const SimInstance inst = gen_instance({1}, GeneratorParams{}, 0);
    const MultilayerCollection adj = sample_adjacency(inst.probs, 1);
    LayerStack same = adj.stack();
    for (std::size_t k = 1; k < same.num_series(); ++k)
        for (std::size_t l = 0; l < same.num_layers(); ++l) {
            const auto src = adj.stack().member(0, l);
            std::copy(src.begin(), src.end(), same.member(k, l).begin());
        }
    const auto err = caught([&] { pred_tsg_resp(same, request_for(inst, {6})); });
    REQUIRE(err);
    CHECK(err->code == ErrorCode::degenerate);
}

TEST_CASE("probability input tracks the latent regression") {
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        const SimInstance inst = gen_instance({2}, GeneratorParams{}, rep);
        std::vector<std::size_t> targets;
        for (std::size_t r = inst.y.size(); r < inst.t.size(); ++r)
            targets.push_back(r);
        const PredictionReport report = pred_tsg_resp(inst.probs.stack(), request_for(inst, targets));
        for (const Prediction& p : report.predictions)
            CHECK(std::abs(p.value - latent_prediction(inst, p.series)) < 0.05);
    }
}

TEST_CASE("target order permutes predictions") {
    const SimInstance inst = gen_instance({1}, GeneratorParams{}, 4);
    const MultilayerCollection adj = sample_adjacency(inst.probs, inst.sampling_seed);
    const PredictionReport a = pred_tsg_resp(adj.stack(), request_for(inst, {5, 7, 9}));
    const PredictionReport b = pred_tsg_resp(adj.stack(), request_for(inst, {9, 5, 7}));
    CHECK(a.predictions[0].value == b.predictions[1].value);
    CHECK(a.predictions[1].value == b.predictions[2].value);
    CHECK(a.predictions[2].value == b.predictions[0].value);
    CHECK(b.predictions[0].series == 9);
}

TEST_CASE("labeled subset choice does not matter for exact latent distances") {
    const std::vector<double> t{0.11, 0.93, 0.42, 0.67, 0.05, 0.58, 0.29, 0.81};
    std::vector<double> y;
    for (double v : t)
        y.push_back(2.0 + 8.0 * v);
    const DissimilarityMatrix delta = latent_distances(t, 0.37);

    auto run = [&](std::vector<std::size_t> labeled, std::vector<std::size_t> targets) {
        PredictionRequest req;
        for (std::size_t k : labeled)
            req.labeled.push_back({k, y[k]});
        req.targets = std::move(targets);
        return predict_from_dissimilarity(delta, req);
    };
    const PredictionReport a = run({0, 1, 2, 3}, {5, 6});
    const PredictionReport b = run({4, 1, 7, 2}, {5, 6});
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(a.predictions[i].value - b.predictions[i].value) < 1e-6);
        CHECK(std::abs(a.predictions[i].value - y[a.predictions[i].series]) < 1e-6);
    }
}

TEST_CASE("reports are bit-deterministic") {
    const SimInstance inst = gen_instance({2}, GeneratorParams{}, 6);
    const MultilayerCollection adj = sample_adjacency(inst.probs, inst.sampling_seed);
    const auto req = request_for(inst, {5, 6, 10});
    CHECK(report_to_json(pred_tsg_resp(adj.stack(), req)) ==
          report_to_json(pred_tsg_resp(adj.stack(), req)));
}

TEST_CASE("request validation") {
    const std::size_t N = 6;
    PredictionRequest req;
    req.labeled = {{0, 1.0}, {1, 2.0}};
    req.targets = {3};
    CHECK(caught([&] { req.validate(N); })->code == ErrorCode::invalid_argument);
    req.labeled.push_back({1, 3.0});
    CHECK(caught([&] { req.validate(N); })->message.find("twice") != std::string::npos);
    req.labeled.back().series = 2;
    CHECK_FALSE(caught([&] { req.validate(N); }));
    req.targets = {6};
    CHECK(caught([&] { req.validate(N); })->code == ErrorCode::invalid_argument);
    req.targets = {5};
    req.labeled.back().series = 9;
    CHECK(caught([&] { req.validate(N); })->code == ErrorCode::invalid_argument);
    req.labeled.back().series = 2;
    req.alpha = 1.0;
    CHECK(caught([&] { req.validate(N); })->code == ErrorCode::invalid_argument);
    req.alpha = 0.05;
    req.dim = 0;
    CHECK(caught([&] { req.validate(N); })->code == ErrorCode::invalid_argument);
}

TEST_CASE("request JSON parsing") {
    const PredictionRequest req = request_from_json(R"({
        "d": 3, "alpha": 0.1,
        "labeled": [{"series": 0, "response": 1.5}, {"series": 2, "response": -1}],
        "targets": [4, 1],
        "stress": {"max_iters": 50, "restarts": 0, "seed": 9}
    })");
    CHECK(req.dim == 3);
    CHECK(req.alpha == 0.1);
    REQUIRE(req.labeled.size() == 2);
    CHECK(req.labeled[1].series == 2);
    CHECK(req.labeled[1].response == -1.0);
    CHECK(req.targets == std::vector<std::size_t>{4, 1});
    CHECK(req.stress.max_iters == 50);
    CHECK(req.stress.restarts == 0);
    CHECK(req.stress.seed == 9);
    CHECK(req.stress.rel_tol == StressConfig{}.rel_tol);

    CHECK(caught([] { request_from_json("{"); })->code == ErrorCode::format);
    CHECK(caught([] { request_from_json(R"({"labeled": []})"); })->code == ErrorCode::format);
    CHECK(caught([] { request_from_json(R"({"labeled": [{"series": -1, "response": 1}],
                                          "targets": []})"); })
              ->code == ErrorCode::format);
    CHECK(caught([] { request_from_json(R"({"labeled": [], "targets": [1.5]})"); })->code ==
          ErrorCode::format);
    CHECK(caught([] { request_from_json(R"({"d": -2, "labeled": [], "targets": []})"); })->code ==
          ErrorCode::format);
}

TEST_CASE("report JSON layout") {
    const std::vector<double> t{0.1, 0.5, 0.9, 0.3, 0.7};
    PredictionRequest req;
    for (std::size_t k = 0; k < 4; ++k)
        req.labeled.push_back({k, 1.0 + 2.0 * t[k] + (k % 2 ? 0.1 : -0.1)});
    req.targets = {4};
    const auto j = nlohmann::json::parse(
        report_to_json(predict_from_dissimilarity(latent_distances(t, 1.0), req)));
    CHECK(j.at("z").size() == 5);
    CHECK(j.at("predictions").size() == 1);
    CHECK(j.at("predictions")[0].at("series") == 4);
    CHECK(j.at("f_test").at("perfect_fit") == false);
    CHECK(j.at("f_test").at("statistic").is_number());
    CHECK(j.at("fit").contains("slope"));
    // No embedding step when starting from dissimilarities.
    CHECK(j.at("diagnostics").at("sigma_ratio").is_null());
    CHECK(j.at("diagnostics").contains("stress"));
}

}  // TEST_SUITE
