#include "tsgresp/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "summation.hpp"
#include "svg.hpp"
#include "tsgresp/duase.hpp"
#include "tsgresp/error.hpp"
#include "tsgresp/io.hpp"
#include "tsgresp/pipeline.hpp"
#include "tsgresp/rng.hpp"

namespace tsg {

namespace {

// Substream tags under the (base_seed, K, replicate) key.
constexpr std::uint64_t kTagScalars = 1;
constexpr std::uint64_t kTagRightLatent = 2;
constexpr std::uint64_t kTagNoise = 3;
constexpr std::uint64_t kTagSampling = 4;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::size_t GrowthSchedule::nodes() const {
    require(K >= 1, "growth index K must be at least 1");
    return 15 + static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(K - 1), 1.5)));
}

std::size_t GrowthSchedule::series() const {
    require(K >= 1, "growth index K must be at least 1");
    return 10 + (K - 1);
}

std::size_t GrowthSchedule::layers() const {
    require(K >= 1, "growth index K must be at least 1");
    return 8 + (K - 1);
}

void GeneratorParams::validate(const GrowthSchedule& schedule) const {
    require(labeled >= 3, "at least 3 labeled series are required");
    require(labeled < schedule.series(),
            "labeled count " + std::to_string(labeled) + " must be below N = " +
                std::to_string(schedule.series()));
    require(noise_sd > 0.0, "noise standard deviation must be positive");
    require(dim >= 1 && dim <= schedule.nodes(), "embedding dimension out of range");
    require(right_lo >= 0.0 && right_lo <= right_hi, "right latent range is invalid");
}

Matrix left_latent_from_scalars(std::span<const double> t, std::size_t nodes, std::size_t dim) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    Matrix x(static_cast<Eigen::Index>(nodes * t.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < t.size(); ++k)
        x.middleRows(static_cast<Eigen::Index>(k * nodes), static_cast<Eigen::Index>(nodes))
            .setConstant(t[k] * scale);
    return x;
}

ProbabilityCollection probability_from_latents(const Matrix& left_latent,
                                               const Matrix& right_latent, std::size_t series,
                                               std::size_t layers, std::size_t* clamped) {
    Matrix grand = left_latent * right_latent.transpose();
    std::size_t over = 0;
    for (Eigen::Index i = 0; i < grand.size(); ++i) {
        double& p = grand.data()[i];
        if (p > 1.0) {
            p = 1.0;
            ++over;
        }
        require(p >= 0.0, "latent positions produce a negative probability");
    }
    if (clamped)
        *clamped = over;
    return ProbabilityCollection(disassemble_grand(grand, series, layers));
}

SimInstance gen_instance(const GrowthSchedule& schedule, const GeneratorParams& params,
                         std::uint64_t replicate) {
    params.validate(schedule);
    const std::size_t n = schedule.nodes();
    const std::size_t N = schedule.series();
    const std::size_t M = schedule.layers();
    const std::size_t d = params.dim;

    const auto stream = CounterRng::from(params.base_seed, {schedule.K, replicate});
    const auto scalars = stream.substream(kTagScalars);
    const auto right = stream.substream(kTagRightLatent);
    const auto noise = stream.substream(kTagNoise);

    SimInstance inst;
    inst.schedule = schedule;
    inst.t.resize(N);
    for (std::size_t k = 0; k < N; ++k)
        inst.t[k] = scalars.uniform(k);

    inst.right_latent.resize(static_cast<Eigen::Index>(n * M), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < inst.right_latent.rows(); ++i)
        for (Eigen::Index j = 0; j < inst.right_latent.cols(); ++j)
            inst.right_latent(i, j) = right.uniform(static_cast<std::uint64_t>(i) * d +
                                                        static_cast<std::uint64_t>(j),
                                                    params.right_lo, params.right_hi);

    inst.left_latent = left_latent_from_scalars(inst.t, n, d);
    inst.probs = probability_from_latents(inst.left_latent, inst.right_latent, N, M,
                                          &inst.clamped);

    inst.y.resize(params.labeled);
    for (std::size_t k = 0; k < params.labeled; ++k)
        inst.y[k] = params.alpha + params.beta * inst.t[k] + params.noise_sd * noise.normal(k);
    inst.sampling_seed = stream.substream(kTagSampling).key();
    return inst;
}

// ---------------------------------------------------------------------------

void run_indexed(std::size_t count, std::size_t threads,
                 const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
                body(i);
        });
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]])
            ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t m = i; m <= j; ++m)
            ranks[order[m]] = r;
        i = j + 1;
    }
    return ranks;
}

struct LabeledData {
    std::vector<double> y;
    std::vector<double> t;
    PredictionRequest request;
};

LabeledData labeled_data(const SimInstance& inst, const ExperimentOptions& options,
                         bool with_target) {
    LabeledData out;
    const std::size_t s = options.params.labeled;
    out.y = inst.y;
    out.t.assign(inst.t.begin(), inst.t.begin() + static_cast<std::ptrdiff_t>(s));
    out.request.dim = options.params.dim;
    out.request.stress = options.stress;
    out.request.alpha = options.alpha_tilde;
    for (std::size_t k = 0; k < s; ++k)
        out.request.labeled.push_back({k, inst.y[k]});
    if (with_target)
        out.request.targets.push_back(s);
    return out;
}

using ReplicateFn = std::function<std::vector<double>(const SimInstance&)>;

// Runs fn over the (K, replicate) grid and fills per-K rows in index order.
void fill_points(ExperimentCurve& curve, const ExperimentOptions& options, const ReplicateFn& fn) {
    require(options.reps >= 1, "at least one replicate is required");
    require(!options.k_grid.empty(), "K grid is empty");
    for (std::size_t K : options.k_grid) {
        const GrowthSchedule sched{K};
        options.params.validate(sched);
        CurvePoint p;
        p.K = K;
        p.n = sched.nodes();
        p.N = sched.series();
        p.M = sched.layers();
        p.rows.resize(options.reps);
        curve.points.push_back(std::move(p));
    }

    const std::size_t total = options.k_grid.size() * options.reps;
    run_indexed(total, options.threads, [&](std::size_t idx) {
        const std::size_t ki = idx / options.reps;
        const std::size_t rep = idx % options.reps;
        ReplicateRow& row = curve.points[ki].rows[rep];
        row.replicate = rep;
        try {
            const SimInstance inst = gen_instance({options.k_grid[ki]}, options.params, rep);
            row.values = fn(inst);
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
            row.values.assign(curve.value_columns.size(), kNaN);
        }
    });

    for (auto& p : curve.points)
        for (const auto& r : p.rows)
            p.failed += r.ok ? 0 : 1;
}

double mean_of_column(const CurvePoint& p, std::size_t col) {
    detail::CompensatedSum sum;
    std::size_t count = 0;
    for (const auto& r : p.rows)
        if (r.ok) {
            sum.add(r.values[col]);
            ++count;
        }
    return count ? sum.value() / static_cast<double>(count) : kNaN;
}

// |mean(a) - mean(b)| for 0/1 columns, from the exact count difference.
double rate_gap(const CurvePoint& p, std::size_t a, std::size_t b) {
    long diff = 0;
    std::size_t count = 0;
    for (const auto& r : p.rows)
        if (r.ok) {
            diff += static_cast<long>(r.values[a]) - static_cast<long>(r.values[b]);
            ++count;
        }
    return count ? static_cast<double>(std::labs(diff)) / static_cast<double>(count) : kNaN;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, "spearman needs two equal-length samples");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> ExperimentCurve::summaries() const {
    std::vector<double> out;
    for (const auto& p : points)
        out.push_back(p.summary);
    return out;
}

std::vector<double> ExperimentCurve::stat(const std::string& column) const {
    const auto it = std::find(stat_columns.begin(), stat_columns.end(), column);
    require(it != stat_columns.end(), "curve has no statistic '" + column + "'");
    const auto idx = static_cast<std::size_t>(it - stat_columns.begin());
    std::vector<double> out;
    for (const auto& p : points)
        out.push_back(p.stats[idx]);
    return out;
}

std::size_t ExperimentCurve::failed() const {
    std::size_t total = 0;
    for (const auto& p : points)
        total += p.failed;
    return total;
}

ExperimentCurve experiment_prediction_convergence(const ExperimentOptions& options) {
    ExperimentCurve curve;
    curve.name = "fig1";
    curve.summary_label = "mean_sq_gap";
    curve.value_columns = {"y_hat_latent", "y_tilde_embedding", "sq_gap"};
    curve.stat_columns = {"mean_sq_gap"};
    if (options.population_variant) {
        curve.value_columns.insert(curve.value_columns.end(),
                                   {"y_tilde_population", "population_sq_gap", "dissim_max_err"});
        curve.stat_columns.insert(curve.stat_columns.end(),
                                  {"population_mean_sq_gap", "mean_dissim_max_err"});
    }

    fill_points(curve, options, [&](const SimInstance& inst) {
        const LabeledData data = labeled_data(inst, options, true);
        const std::size_t target = options.params.labeled;
        const double y_hat = predict(ols_fit(data.y, data.t), inst.t[target]);

        const MultilayerCollection adj = sample_adjacency(inst.probs, inst.sampling_seed);
        const PredictionReport sample = pred_tsg_resp(adj.stack(), data.request);
        const double y_tilde = sample.predictions.front().value;
        std::vector<double> values{y_hat, y_tilde, (y_hat - y_tilde) * (y_hat - y_tilde)};

        if (options.population_variant) {
            const PredictionReport pop = pred_tsg_resp(inst.probs.stack(), data.request);
            const double y_pop = pop.predictions.front().value;
            const double err =
                (sample.dissimilarity.values() - pop.dissimilarity.values()).cwiseAbs().maxCoeff();
            values.insert(values.end(), {y_pop, (y_hat - y_pop) * (y_hat - y_pop), err});
        }
        return values;
    });

    for (auto& p : curve.points) {
        p.summary = mean_of_column(p, 2);
        p.stats = {p.summary};
        if (options.population_variant)
            p.stats.insert(p.stats.end(), {mean_of_column(p, 4), mean_of_column(p, 5)});
    }
    return curve;
}

ExperimentCurve experiment_power_convergence(const ExperimentOptions& options) {
    require(options.alpha_tilde > 0.0 && options.alpha_tilde < 1.0,
            "significance level must lie in (0, 1)");
    ExperimentCurve curve;
    curve.name = "fig2";
    curve.summary_label = "abs_power_gap";
    curve.value_columns = {"f_star", "f_hat", "reject_star", "reject_hat"};
    curve.stat_columns = {"power_star", "power_hat"};

    fill_points(curve, options, [&](const SimInstance& inst) {
        const LabeledData data = labeled_data(inst, options, false);
        const LinearFit latent_fit = ols_fit(data.y, data.t);
        const FTestReport star =
            f_test(data.y, predict(latent_fit, data.t), options.alpha_tilde);

        const MultilayerCollection adj = sample_adjacency(inst.probs, inst.sampling_seed);
        const FTestReport hat = pred_tsg_resp(adj.stack(), data.request).f_report;
        return std::vector<double>{star.statistic, hat.statistic, star.reject ? 1.0 : 0.0,
                                   hat.reject ? 1.0 : 0.0};
    });

    for (auto& p : curve.points) {
        const double power_star = mean_of_column(p, 2);
        const double power_hat = mean_of_column(p, 3);
        p.stats = {power_star, power_hat};
        p.summary = rate_gap(p, 3, 2);
    }
    return curve;
}

std::vector<SingularValueRow> singular_value_table(const GeneratorParams& params,
                                                   std::span<const std::size_t> k_grid,
                                                   std::uint64_t replicate) {
    std::vector<SingularValueRow> rows;
    for (std::size_t K : k_grid) {
        const GrowthSchedule sched{K};
        const SimInstance inst = gen_instance(sched, params, replicate);
        const SvdTriple svd = truncated_svd(assemble_grand(inst.probs.stack()), 2);
        SingularValueRow r;
        r.K = K;
        r.n = sched.nodes();
        r.N = sched.series();
        r.M = sched.layers();
        r.sigma1 = svd.sigma(0);
        r.sigma2 = svd.sigma(1);
        r.ratio = r.sigma1 > 0.0 ? r.sigma2 / r.sigma1 : kNaN;
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------

std::string curve_replicates_csv(const ExperimentCurve& curve) {
    std::string out = "K,replicate,n,N,M,ok";
    for (const auto& c : curve.value_columns)
        out += "," + c;
    out += '\n';
    for (const auto& p : curve.points)
        for (const auto& r : p.rows) {
            out += std::to_string(p.K) + "," + std::to_string(r.replicate) + "," +
                   std::to_string(p.n) + "," + std::to_string(p.N) + "," + std::to_string(p.M) +
                   "," + (r.ok ? "1" : "0");
            for (double v : r.values)
                out += "," + io::format_double(v);
            out += '\n';
        }
    return out;
}

std::string curve_summary_csv(const ExperimentCurve& curve) {
    std::string out = "K,n,N,M,replicates,failed," + curve.summary_label;
    for (const auto& c : curve.stat_columns)
        if (c != curve.summary_label)
            out += "," + c;
    out += '\n';
    for (const auto& p : curve.points) {
        out += std::to_string(p.K) + "," + std::to_string(p.n) + "," + std::to_string(p.N) + "," +
               std::to_string(p.M) + "," + std::to_string(p.rows.size()) + "," +
               std::to_string(p.failed) + "," + io::format_double(p.summary);
        for (std::size_t i = 0; i < curve.stat_columns.size(); ++i)
            if (curve.stat_columns[i] != curve.summary_label)
                out += "," + io::format_double(p.stats[i]);
        out += '\n';
    }
    return out;
}

std::string curve_svg(const ExperimentCurve& curve, const std::string& title) {
    std::vector<double> ks;
    for (const auto& p : curve.points)
        ks.push_back(static_cast<double>(p.K));
    std::vector<detail::PlotSeries> series{{curve.summary_label, ks, curve.summaries()}};
    if (curve.name == "fig2") {
        series.push_back({"power_star", ks, curve.stat("power_star")});
        series.push_back({"power_hat", ks, curve.stat("power_hat")});
    } else if (std::find(curve.stat_columns.begin(), curve.stat_columns.end(),
                         "population_mean_sq_gap") != curve.stat_columns.end()) {
        series.push_back({"population_mean_sq_gap", ks, curve.stat("population_mean_sq_gap")});
    }
    return detail::line_chart_svg(title, "K", curve.summary_label, series);
}

std::string singular_value_csv(std::span<const SingularValueRow> rows) {
    std::string out = "K,n,N,M,sigma1,sigma2,ratio\n";
    for (const auto& r : rows)
        out += std::to_string(r.K) + "," + std::to_string(r.n) + "," + std::to_string(r.N) + "," +
               std::to_string(r.M) + "," + io::format_double(r.sigma1) + "," +
               io::format_double(r.sigma2) + "," + io::format_double(r.ratio) + "\n";
    return out;
}

std::string singular_value_svg(std::span<const SingularValueRow> rows) {
    detail::PlotSeries s1{"sigma1", {}, {}}, s2{"sigma2", {}, {}};
    for (const auto& r : rows) {
        s1.x.push_back(static_cast<double>(r.K));
        s1.y.push_back(r.sigma1);
        s2.x.push_back(static_cast<double>(r.K));
        s2.y.push_back(r.sigma2);
    }
    return detail::line_chart_svg("Top singular values of the grand probability matrix", "K",
                                  "singular value", {s1, s2});
}

}  // namespace tsg
