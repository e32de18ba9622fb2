#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "oracles.hpp"
#include "tsgresp/simlab.hpp"

using namespace tsg;
using testutil::caught;

namespace {

std::size_t count_lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

ExperimentOptions small_options(std::size_t threads) {
    ExperimentOptions o;
    o.k_grid = {1, 2};
    o.reps = 3;
    o.threads = threads;
    return o;
}

}  // namespace

TEST_SUITE("simlab") {

TEST_CASE("growth schedule sizes") {
    CHECK(GrowthSchedule{1}.nodes() == 15);
    CHECK(GrowthSchedule{1}.series() == 10);
    CHECK(GrowthSchedule{1}.layers() == 8);
    CHECK(GrowthSchedule{5}.nodes() == 23);
    CHECK(GrowthSchedule{5}.series() == 14);
    CHECK(GrowthSchedule{5}.layers() == 12);
    CHECK(GrowthSchedule{10}.nodes() == 42);
    CHECK(caught([] { (void)GrowthSchedule{0}.nodes(); })->code == ErrorCode::invalid_argument);
}

TEST_CASE("generated instance shapes") {
    const SimInstance inst = gen_instance({1}, GeneratorParams{}, 0);
    CHECK(inst.left_latent.rows() == 150);
    CHECK(inst.left_latent.cols() == 2);
    CHECK(inst.right_latent.rows() == 120);
    CHECK(inst.t.size() == 10);
    CHECK(inst.y.size() == 5);
    const Matrix grand = assemble_grand(inst.probs.stack());
    CHECK(grand.rows() == 150);
    CHECK(grand.cols() == 120);
    CHECK((grand - inst.left_latent * inst.right_latent.transpose()).cwiseAbs().maxCoeff() <
          1e-15);
    for (double t : inst.t) {
        CHECK(t >= 0.0);
        CHECK(t < 1.0);
    }
    CHECK(inst.right_latent.minCoeff() >= 0.2);
    CHECK(inst.right_latent.maxCoeff() <= 0.5);
}

TEST_CASE("left latent blocks are constant rows") {
    const std::vector<double> t{0.2, 0.8};
    const Matrix x = left_latent_from_scalars(t, 3, 4);
    CHECK(x.rows() == 6);
    CHECK(x.topRows(3).isConstant(0.1));
    CHECK(x.bottomRows(3).isConstant(0.4));
}

TEST_CASE("default parameters never clamp") {
    for (std::size_t K : {1, 4, 8})
        for (std::uint64_t rep = 0; rep < 20; ++rep)
            CHECK(gen_instance({K}, GeneratorParams{}, rep).clamped == 0);

    Matrix left = Matrix::Constant(2, 1, 2.0);
    Matrix right = Matrix::Constant(2, 1, 0.75);
    right(1, 0) = 0.25;
    std::size_t clamped = 99;
    const ProbabilityCollection p = probability_from_latents(left, right, 1, 1, &clamped);
    CHECK(clamped == 2);
    CHECK(p.stack().member(0, 0)[0] == 1.0);
    CHECK(p.stack().member(0, 0)[1] == 0.5);
}

TEST_CASE("responses follow the linear model") {
    GeneratorParams params;
    params.noise_sd = 1e-300;
    const SimInstance inst = gen_instance({2}, params, 7);
    for (std::size_t k = 0; k < inst.y.size(); ++k)
        CHECK(inst.y[k] == doctest::Approx(2.0 + 8.0 * inst.t[k]).epsilon(1e-15));
}

TEST_CASE("generation is deterministic and replicate streams are isolated") {
    const SimInstance a = gen_instance({3}, GeneratorParams{}, 11);
    const SimInstance b = gen_instance({3}, GeneratorParams{}, 11);
    CHECK(a.t == b.t);
    CHECK(a.y == b.y);
    CHECK(a.right_latent == b.right_latent);
    CHECK(a.sampling_seed == b.sampling_seed);

    const SimInstance c = gen_instance({3}, GeneratorParams{}, 12);
    CHECK(a.t != c.t);
    CHECK(a.sampling_seed != c.sampling_seed);

    GeneratorParams other;
    other.base_seed = 1;
    CHECK(gen_instance({3}, other, 11).t != a.t);
    CHECK(gen_instance({4}, GeneratorParams{}, 11).t != a.t);

    // Changing the noise does not move the latent scalars or the graph stream.
    GeneratorParams noisy;
    noisy.noise_sd = 0.5;
    const SimInstance d = gen_instance({3}, noisy, 11);
    CHECK(d.t == a.t);
    CHECK(d.sampling_seed == a.sampling_seed);
    CHECK(d.y != a.y);
}

TEST_CASE("generator parameter validation") {
    GeneratorParams p;
    p.labeled = 2;
    CHECK(caught([&] { gen_instance({1}, p, 0); })->code == ErrorCode::invalid_argument);
    p.labeled = 10;
    CHECK(caught([&] { gen_instance({1}, p, 0); })->code == ErrorCode::invalid_argument);
    p.labeled = 5;
    p.noise_sd = 0.0;
    CHECK(caught([&] { gen_instance({1}, p, 0); })->code == ErrorCode::invalid_argument);
    p.noise_sd = 0.01;
    p.beta = 0.0;
    CHECK_FALSE(caught([&] { gen_instance({1}, p, 0); }));
}

TEST_CASE("a rank-one probability matrix has a vanishing second singular value") {
    GeneratorParams params;
    const std::vector<std::size_t> ks{1, 3};
    const auto rows = singular_value_table(params, ks);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.sigma1 > 0.0);
        CHECK(r.sigma2 <= 1e-10 * r.sigma1);
        CHECK(r.ratio == r.sigma2 / r.sigma1);
    }
    CHECK(rows[1].n == 17);
    CHECK(rows[1].N == 12);

    const auto again = singular_value_table(params, ks);
    CHECK(again[0].sigma1 == rows[0].sigma1);
    CHECK(again[1].sigma2 == rows[1].sigma2);
}

TEST_CASE("run_indexed visits every index once") {
    for (std::size_t threads : {1, 3, 16}) {
        std::vector<std::atomic<int>> hits(37);
        run_indexed(hits.size(), threads, [&](std::size_t i) { hits[i].fetch_add(1); });
        for (const auto& h : hits)
            CHECK(h.load() == 1);
    }
    run_indexed(0, 4, [](std::size_t) { FAIL("called"); });
}

TEST_CASE("spearman") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> up{10, 20, 30, 40, 50};
    const std::vector<double> down{5, 4, 3, 2, 1};
    CHECK(spearman(x, up) == doctest::Approx(1.0));
    CHECK(spearman(x, down) == doctest::Approx(-1.0));
    // Ranks of {1, 2, 2, 3} are {1, 2.5, 2.5, 4}.
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{1, 2, 2, 3};
    CHECK(spearman(a, b) == doctest::Approx(0.9486832980505138));
    const std::vector<double> monotone{0.1, 0.4, 0.5, 7.0, 9.0};
    CHECK(spearman(x, monotone) == doctest::Approx(1.0));
}

TEST_CASE("prediction curve is independent of the thread count") {
    const ExperimentCurve one = experiment_prediction_convergence(small_options(1));
    const ExperimentCurve four = experiment_prediction_convergence(small_options(4));
    CHECK(one.failed() == 0);
    CHECK(curve_replicates_csv(one) == curve_replicates_csv(four));
    CHECK(curve_summary_csv(one) == curve_summary_csv(four));
    REQUIRE(one.points.size() == 2);
    CHECK(one.points[1].K == 2);
    CHECK(one.points[1].n == 16);
    CHECK(one.points[0].rows.size() == 3);

    double sum = 0.0;
    for (const auto& r : one.points[0].rows)
        sum += r.values[2];
    CHECK(one.summaries()[0] == doctest::Approx(sum / 3.0));
    CHECK(one.stat("mean_sq_gap") == one.summaries());
    CHECK(caught([&] { one.stat("missing"); })->code == ErrorCode::invalid_argument);
}

TEST_CASE("population variant adds columns") {
    ExperimentOptions o = small_options(2);
    o.k_grid = {2};
    o.population_variant = true;
    const ExperimentCurve c = experiment_prediction_convergence(o);
    CHECK(c.value_columns.size() == 6);
    CHECK(c.failed() == 0);
    for (double v : c.stat("mean_dissim_max_err"))
        CHECK(v > 0.0);
    for (double v : c.stat("population_mean_sq_gap"))
        CHECK(std::isfinite(v));
}

TEST_CASE("power curve with a zero slope stays near the nominal size") {
    ExperimentOptions o;
    o.params.beta = 0.0;
    o.k_grid = {1};
    o.reps = 400;
    const ExperimentCurve c = experiment_power_convergence(o);
    CHECK(c.failed() == 0);
    const double p = c.stat("power_star")[0];
    // Binomial(400, 0.05) has standard deviation about 0.011.
    CHECK(std::abs(p - 0.05) < 4.0 * std::sqrt(0.05 * 0.95 / 400.0));
    CHECK(c.summaries()[0] == doctest::Approx(std::abs(c.stat("power_hat")[0] - p)));
}

TEST_CASE("power curve with a strong slope rejects") {
    ExperimentOptions o;
    o.k_grid = {1};
    o.reps = 20;
    const ExperimentCurve c = experiment_power_convergence(o);
    CHECK(c.stat("power_star")[0] == 1.0);
    CHECK(curve_replicates_csv(c) ==
          curve_replicates_csv(experiment_power_convergence(o)));
}

TEST_CASE("experiment option validation") {
    ExperimentOptions o;
    CHECK(caught([&] { experiment_prediction_convergence(o); })->code ==
          ErrorCode::invalid_argument);
    o.k_grid = {1};
    o.alpha_tilde = 1.5;
    CHECK(caught([&] { experiment_power_convergence(o); })->code == ErrorCode::invalid_argument);
}

TEST_CASE("CSV and SVG writers") {
    const ExperimentCurve c = experiment_prediction_convergence(small_options(1));
    const std::string reps = curve_replicates_csv(c);
    CHECK(reps.rfind("K,replicate,n,N,M,ok,y_hat_latent,y_tilde_embedding,sq_gap\n", 0) == 0);
    CHECK(count_lines(reps) == 1 + 2 * 3);
    const std::string summary = curve_summary_csv(c);
    CHECK(summary.rfind("K,n,N,M,replicates,failed,mean_sq_gap\n", 0) == 0);
    CHECK(count_lines(summary) == 3);

    const std::string svg = curve_svg(c, "gap");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("gap") != std::string::npos);

    const std::vector<std::size_t> ks{1, 2, 3};
    const auto rows = singular_value_table(GeneratorParams{}, ks);
    const std::string table = singular_value_csv(rows);
    CHECK(table.rfind("K,n,N,M,sigma1,sigma2,ratio\n", 0) == 0);
    CHECK(count_lines(table) == 4);
    CHECK(singular_value_svg(rows).find("</svg>") != std::string::npos);
}

}  // TEST_SUITE
