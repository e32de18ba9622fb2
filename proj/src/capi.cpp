#include "tsgresp/tsgresp.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "tsgresp/dissim.hpp"
#include "tsgresp/duase.hpp"
#include "tsgresp/error.hpp"
#include "tsgresp/io.hpp"
#include "tsgresp/netcore.hpp"
#include "tsgresp/pipeline.hpp"
#include "tsgresp/rawstress.hpp"
#include "tsgresp/regress.hpp"
#include "tsgresp/simlab.hpp"

struct tsg_collection {
    tsg::AnyCollection value;
};
struct tsg_embedding {
    tsg::EmbeddingStack value;
};
struct tsg_dissim {
    tsg::DissimilarityMatrix value;
};
struct tsg_instance {
    tsg::SimInstance value;
};
struct tsg_curve {
    tsg::ExperimentCurve value;
};
struct tsg_svtable {
    std::vector<tsg::SingularValueRow> rows;
};

namespace {

thread_local std::string g_last_error;

tsg_status to_status(tsg::ErrorCode code) {
    switch (code) {
    case tsg::ErrorCode::invalid_argument: return TSG_ERR_INVALID_ARGUMENT;
    case tsg::ErrorCode::io: return TSG_ERR_IO;
    case tsg::ErrorCode::format: return TSG_ERR_FORMAT;
    case tsg::ErrorCode::shape_mismatch: return TSG_ERR_SHAPE;
    case tsg::ErrorCode::degenerate: return TSG_ERR_DEGENERATE;
    case tsg::ErrorCode::numerical: return TSG_ERR_NUMERICAL;
    }
    return TSG_ERR_INTERNAL;
}

template <class F>
tsg_status guarded(F&& body) noexcept {
    try {
        body();
        return TSG_OK;
    } catch (const tsg::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return TSG_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TSG_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return TSG_ERR_INTERNAL;
    }
}

template <class T>
void need(const T* p, const char* name) {
    if (!p)
        tsg::fail(tsg::ErrorCode::invalid_argument, std::string(name) + " is NULL");
}

void need_len(size_t got, size_t want, const char* what) {
    if (got != want)
        tsg::fail(tsg::ErrorCode::shape_mismatch, std::string(what) + ": buffer holds " +
                                                      std::to_string(got) + " elements, need " +
                                                      std::to_string(want));
}

tsg::StressConfig to_cpp(const tsg_stress_config& c) {
    tsg::StressConfig out;
    out.max_iters = c.max_iters;
    out.rel_tol = c.rel_tol;
    out.restarts = c.restarts;
    out.seed = c.seed;
    return out;
}

tsg_stress_config to_c(const tsg::StressConfig& c) {
    return {c.max_iters, c.rel_tol, c.restarts, c.seed};
}

tsg::GeneratorParams to_cpp(const tsg_generator_params& p) {
    tsg::GeneratorParams out;
    out.labeled = p.labeled;
    out.alpha = p.alpha;
    out.beta = p.beta;
    out.noise_sd = p.noise_sd;
    out.dim = p.dim;
    out.right_lo = p.right_lo;
    out.right_hi = p.right_hi;
    out.base_seed = p.base_seed;
    return out;
}

std::vector<std::size_t> k_range(uint64_t kmin, uint64_t kmax) {
    tsg::require(kmin >= 1 && kmin <= kmax, "K range must satisfy 1 <= kmin <= kmax");
    std::vector<std::size_t> ks;
    for (uint64_t k = kmin; k <= kmax; ++k)
        ks.push_back(k);
    return ks;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* tsg_version(void) { return TSGRESP_VERSION; }

const char* tsg_last_error(void) { return g_last_error.c_str(); }

const char* tsg_status_name(tsg_status status) {
    switch (status) {
    case TSG_OK: return "ok";
    case TSG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TSG_ERR_IO: return "i/o error";
    case TSG_ERR_FORMAT: return "format error";
    case TSG_ERR_SHAPE: return "shape mismatch";
    case TSG_ERR_DEGENERATE: return "degenerate input";
    case TSG_ERR_NUMERICAL: return "numerical failure";
    case TSG_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void tsg_string_free(char* s) { std::free(s); }

// ---- collections ----------------------------------------------------------

tsg_status tsg_collection_create(tsg_collection_kind kind, size_t N, size_t M, size_t n,
                                 const double* values, tsg_collection** out) {
    return guarded([&] {
        need(values, "values");
        need(out, "out");
        tsg::LayerStack stack(N, M, n, std::vector<double>(values, values + N * M * n * n));
        switch (kind) {
        case TSG_KIND_PROB:
            *out = new tsg_collection{tsg::ProbabilityCollection(std::move(stack))};
            break;
        case TSG_KIND_ADJ:
            *out = new tsg_collection{tsg::MultilayerCollection(std::move(stack))};
            break;
        case TSG_KIND_WEIGHTED:
            *out = new tsg_collection{tsg::WeightedCollection(std::move(stack))};
            break;
        default:
            tsg::fail(tsg::ErrorCode::invalid_argument, "unknown collection kind");
        }
    });
}

tsg_status tsg_collection_load(const char* dir, tsg_collection** out) {
    return guarded([&] {
        need(dir, "dir");
        need(out, "out");
        *out = new tsg_collection{tsg::load_collection(dir)};
    });
}

tsg_status tsg_collection_save(const tsg_collection* c, const char* dir) {
    return guarded([&] {
        need(c, "collection");
        need(dir, "dir");
        tsg::save_collection(c->value, dir);
    });
}

tsg_status tsg_collection_info(const tsg_collection* c, tsg_collection_kind* kind, size_t* N,
                               size_t* M, size_t* n) {
    return guarded([&] {
        need(c, "collection");
        const auto& s = tsg::stack_of(c->value);
        if (kind)
            *kind = static_cast<tsg_collection_kind>(c->value.index());
        if (N)
            *N = s.num_series();
        if (M)
            *M = s.num_layers();
        if (n)
            *n = s.num_nodes();
    });
}

tsg_status tsg_collection_copy_values(const tsg_collection* c, double* out, size_t len) {
    return guarded([&] {
        need(c, "collection");
        need(out, "out");
        const auto values = tsg::stack_of(c->value).values();
        need_len(len, values.size(), "collection values");
        std::copy(values.begin(), values.end(), out);
    });
}

tsg_status tsg_collection_export_layer_csv(const tsg_collection* c, size_t k, size_t l,
                                           const char* path) {
    return guarded([&] {
        need(c, "collection");
        need(path, "path");
        tsg::export_layer_csv(tsg::stack_of(c->value), k, l, path);
    });
}

void tsg_collection_free(tsg_collection* c) { delete c; }

tsg_status tsg_sample_adjacency(const tsg_collection* probs, uint64_t seed,
                                tsg_collection** out) {
    return guarded([&] {
        need(probs, "probs");
        need(out, "out");
        const auto* p = std::get_if<tsg::ProbabilityCollection>(&probs->value);
        tsg::require(p != nullptr, "sampling needs a probability collection");
        *out = new tsg_collection{tsg::sample_adjacency(*p, seed)};
    });
}

tsg_status tsg_binarize_weighted(const tsg_collection* weighted, double percentile,
                                 tsg_collection** out) {
    return guarded([&] {
        need(weighted, "weighted");
        need(out, "out");
        const auto* w = std::get_if<tsg::WeightedCollection>(&weighted->value);
        tsg::require(w != nullptr, "binarization needs a weighted collection");
        *out = new tsg_collection{tsg::binarize_weighted(*w, percentile)};
    });
}

// ---- embeddings -----------------------------------------------------------

tsg_status tsg_duase(const tsg_collection* c, size_t d, tsg_embedding** out) {
    return guarded([&] {
        need(c, "collection");
        need(out, "out");
        *out = new tsg_embedding{tsg::duase(tsg::stack_of(c->value), d)};
    });
}

tsg_status tsg_embedding_load(const char* dir, tsg_embedding** out) {
    return guarded([&] {
        need(dir, "dir");
        need(out, "out");
        *out = new tsg_embedding{tsg::load_embeddings(dir)};
    });
}

tsg_status tsg_embedding_save(const tsg_embedding* e, const char* dir) {
    return guarded([&] {
        need(e, "embedding");
        need(dir, "dir");
        tsg::save_embeddings(e->value, dir);
    });
}

tsg_status tsg_embedding_info(const tsg_embedding* e, size_t* N, size_t* n, size_t* d) {
    return guarded([&] {
        need(e, "embedding");
        if (N)
            *N = e->value.num_series();
        if (n)
            *n = e->value.nodes;
        if (d)
            *d = e->value.dim;
    });
}

tsg_status tsg_embedding_singular_values(const tsg_embedding* e, double* out, size_t len) {
    return guarded([&] {
        need(e, "embedding");
        need(out, "out");
        need_len(len, static_cast<size_t>(e->value.sigma.size()), "singular values");
        for (size_t i = 0; i < len; ++i)
            out[i] = e->value.sigma(static_cast<Eigen::Index>(i));
    });
}

tsg_status tsg_embedding_left(const tsg_embedding* e, size_t k, double* out, size_t len) {
    return guarded([&] {
        need(e, "embedding");
        need(out, "out");
        tsg::require(k < e->value.num_series(), "series index out of range");
        const tsg::Matrix& x = e->value.left[k];
        need_len(len, static_cast<size_t>(x.size()), "left embedding");
        size_t pos = 0;
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j)
                out[pos++] = x(i, j);
    });
}

tsg_status tsg_embedding_write_csv(const tsg_embedding* e, const char* path) {
    return guarded([&] {
        need(e, "embedding");
        need(path, "path");
        std::string text = "series,node";
        for (size_t c = 0; c < e->value.dim; ++c)
            text += ",x" + std::to_string(c + 1);
        text += '\n';
        for (size_t k = 0; k < e->value.num_series(); ++k) {
            const tsg::Matrix& x = e->value.left[k];
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                text += std::to_string(k) + "," + std::to_string(i);
                for (Eigen::Index j = 0; j < x.cols(); ++j)
                    text += "," + tsg::io::format_double(x(i, j));
                text += '\n';
            }
        }
        tsg::io::write_text_atomic(path, text);
    });
}

void tsg_embedding_free(tsg_embedding* e) { delete e; }

// ---- dissimilarities ------------------------------------------------------

tsg_status tsg_dissim_from_embedding(const tsg_embedding* e, tsg_dissim** out) {
    return guarded([&] {
        need(e, "embedding");
        need(out, "out");
        *out = new tsg_dissim{tsg::pairwise_dissimilarity(e->value)};
    });
}

tsg_status tsg_dissim_create(size_t N, const double* values, tsg_dissim** out) {
    return guarded([&] {
        need(values, "values");
        need(out, "out");
        const auto n = static_cast<Eigen::Index>(N);
        tsg::Matrix m(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                m(i, j) = values[i * n + j];
        *out = new tsg_dissim{tsg::DissimilarityMatrix(std::move(m))};
    });
}

tsg_status tsg_dissim_load_csv(const char* path, tsg_dissim** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new tsg_dissim{tsg::load_dissimilarity_csv(path)};
    });
}

tsg_status tsg_dissim_save_csv(const tsg_dissim* delta, const char* path) {
    return guarded([&] {
        need(delta, "dissimilarity");
        need(path, "path");
        tsg::save_dissimilarity_csv(delta->value, path);
    });
}

tsg_status tsg_dissim_size(const tsg_dissim* delta, size_t* N) {
    return guarded([&] {
        need(delta, "dissimilarity");
        need(N, "N");
        *N = delta->value.size();
    });
}

tsg_status tsg_dissim_values(const tsg_dissim* delta, double* out, size_t len) {
    return guarded([&] {
        need(delta, "dissimilarity");
        need(out, "out");
        const size_t n = delta->value.size();
        need_len(len, n * n, "dissimilarity values");
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                out[i * n + j] = delta->value(i, j);
    });
}

void tsg_dissim_free(tsg_dissim* delta) { delete delta; }

// ---- raw stress -----------------------------------------------------------

tsg_stress_config tsg_stress_config_default(void) { return to_c(tsg::StressConfig{}); }

tsg_status tsg_raw_stress(const tsg_dissim* delta, const double* z, size_t len, double* out) {
    return guarded([&] {
        need(delta, "dissimilarity");
        need(z, "z");
        need(out, "out");
        *out = tsg::raw_stress(std::span<const double>(z, len), delta->value);
    });
}

tsg_status tsg_smacof(const tsg_dissim* delta, const tsg_stress_config* config, double* z_out,
                      size_t len, tsg_stress_summary* summary) {
    return guarded([&] {
        need(delta, "dissimilarity");
        need(z_out, "z_out");
        need_len(len, delta->value.size(), "embedding");
        const tsg::StressConfig cfg = config ? to_cpp(*config) : tsg::StressConfig{};
        const tsg::StressResult r = tsg::smacof_minimize(delta->value, cfg);
        std::copy(r.z.begin(), r.z.end(), z_out);
        if (summary)
            *summary = {r.stress, r.iterations, r.converged ? 1 : 0, r.restart_index};
    });
}

// ---- regression -----------------------------------------------------------

tsg_status tsg_ols_fit(const double* y, const double* z, size_t s, double* intercept,
                       double* slope) {
    return guarded([&] {
        need(y, "y");
        need(z, "z");
        const tsg::LinearFit fit =
            tsg::ols_fit(std::span<const double>(y, s), std::span<const double>(z, s));
        if (intercept)
            *intercept = fit.intercept;
        if (slope)
            *slope = fit.slope;
    });
}

tsg_status tsg_f_test(const double* y, const double* y_hat, size_t s, double alpha,
                      tsg_ftest* out) {
    return guarded([&] {
        need(y, "y");
        need(y_hat, "y_hat");
        need(out, "out");
        const tsg::FTestReport r =
            tsg::f_test(std::span<const double>(y, s), std::span<const double>(y_hat, s), alpha);
        *out = {r.statistic, r.critical_value, r.p_value, r.df1, r.df2,
                r.reject ? 1 : 0, r.perfect_fit ? 1 : 0};
    });
}

tsg_status tsg_f_cdf(double x, double d1, double d2, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = tsg::f_cdf(x, d1, d2);
    });
}

tsg_status tsg_f_quantile(double p, double d1, double d2, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = tsg::f_quantile(p, d1, d2);
    });
}

// ---- pipeline -------------------------------------------------------------

tsg_status tsg_predict_json(const tsg_collection* c, const char* request_json,
                            char** report_json) {
    return guarded([&] {
        need(c, "collection");
        need(request_json, "request_json");
        need(report_json, "report_json");
        const tsg::PredictionRequest req = tsg::request_from_json(request_json);
        const tsg::PredictionReport rep = tsg::pred_tsg_resp(tsg::stack_of(c->value), req);
        *report_json = dup_string(tsg::report_to_json(rep));
    });
}

// ---- simulation -----------------------------------------------------------

tsg_generator_params tsg_generator_params_default(void) {
    const tsg::GeneratorParams p;
    return {p.labeled, p.alpha, p.beta, p.noise_sd, p.dim, p.right_lo, p.right_hi, p.base_seed};
}

tsg_status tsg_schedule_shape(uint64_t K, size_t* n, size_t* N, size_t* M) {
    return guarded([&] {
        const tsg::GrowthSchedule sched{K};
        if (n)
            *n = sched.nodes();
        if (N)
            *N = sched.series();
        if (M)
            *M = sched.layers();
    });
}

tsg_status tsg_instance_generate(uint64_t K, const tsg_generator_params* params,
                                 uint64_t replicate, tsg_instance** out) {
    return guarded([&] {
        need(out, "out");
        const tsg::GeneratorParams p = params ? to_cpp(*params) : tsg::GeneratorParams{};
        *out = new tsg_instance{tsg::gen_instance(tsg::GrowthSchedule{K}, p, replicate)};
    });
}

tsg_status tsg_instance_info(const tsg_instance* inst, size_t* N, size_t* labeled,
                             size_t* clamped) {
    return guarded([&] {
        need(inst, "instance");
        if (N)
            *N = inst->value.t.size();
        if (labeled)
            *labeled = inst->value.y.size();
        if (clamped)
            *clamped = inst->value.clamped;
    });
}

tsg_status tsg_instance_probabilities(const tsg_instance* inst, tsg_collection** out) {
    return guarded([&] {
        need(inst, "instance");
        need(out, "out");
        *out = new tsg_collection{inst->value.probs};
    });
}

tsg_status tsg_instance_adjacency(const tsg_instance* inst, tsg_collection** out) {
    return guarded([&] {
        need(inst, "instance");
        need(out, "out");
        *out = new tsg_collection{
            tsg::sample_adjacency(inst->value.probs, inst->value.sampling_seed)};
    });
}

tsg_status tsg_instance_scalars(const tsg_instance* inst, double* out, size_t len) {
    return guarded([&] {
        need(inst, "instance");
        need(out, "out");
        need_len(len, inst->value.t.size(), "latent scalars");
        std::copy(inst->value.t.begin(), inst->value.t.end(), out);
    });
}

tsg_status tsg_instance_responses(const tsg_instance* inst, double* out, size_t len) {
    return guarded([&] {
        need(inst, "instance");
        need(out, "out");
        need_len(len, inst->value.y.size(), "responses");
        std::copy(inst->value.y.begin(), inst->value.y.end(), out);
    });
}

void tsg_instance_free(tsg_instance* inst) { delete inst; }

// ---- experiments ----------------------------------------------------------

tsg_experiment_options tsg_experiment_options_default(void) {
    tsg_experiment_options o{};
    o.params = tsg_generator_params_default();
    o.kmin = 1;
    o.kmax = 10;
    o.reps = 50;
    o.alpha_tilde = 0.05;
    o.threads = 1;
    o.stress = tsg_stress_config_default();
    o.population_variant = 0;
    return o;
}

tsg_status tsg_experiment_run(tsg_experiment_kind kind, const tsg_experiment_options* options,
                              tsg_curve** out) {
    return guarded([&] {
        need(options, "options");
        need(out, "out");
        tsg::ExperimentOptions o;
        o.params = to_cpp(options->params);
        o.k_grid = k_range(options->kmin, options->kmax);
        o.reps = options->reps;
        o.alpha_tilde = options->alpha_tilde;
        o.threads = options->threads;
        o.stress = to_cpp(options->stress);
        o.population_variant = options->population_variant != 0;
        switch (kind) {
        case TSG_EXPERIMENT_PREDICTION:
            *out = new tsg_curve{tsg::experiment_prediction_convergence(o)};
            break;
        case TSG_EXPERIMENT_POWER:
            *out = new tsg_curve{tsg::experiment_power_convergence(o)};
            break;
        default:
            tsg::fail(tsg::ErrorCode::invalid_argument, "unknown experiment kind");
        }
    });
}

tsg_status tsg_curve_size(const tsg_curve* curve, size_t* points) {
    return guarded([&] {
        need(curve, "curve");
        need(points, "points");
        *points = curve->value.points.size();
    });
}

tsg_status tsg_curve_point(const tsg_curve* curve, size_t i, uint64_t* K, double* summary,
                           size_t* failed) {
    return guarded([&] {
        need(curve, "curve");
        tsg::require(i < curve->value.points.size(), "curve point index out of range");
        const auto& p = curve->value.points[i];
        if (K)
            *K = p.K;
        if (summary)
            *summary = p.summary;
        if (failed)
            *failed = p.failed;
    });
}

tsg_status tsg_curve_write(const tsg_curve* curve, const char* replicates_csv,
                           const char* summary_csv, const char* svg_path, const char* title) {
    return guarded([&] {
        need(curve, "curve");
        if (replicates_csv)
            tsg::io::write_text_atomic(replicates_csv, tsg::curve_replicates_csv(curve->value));
        if (summary_csv)
            tsg::io::write_text_atomic(summary_csv, tsg::curve_summary_csv(curve->value));
        if (svg_path)
            tsg::io::write_text_atomic(
                svg_path, tsg::curve_svg(curve->value, title ? title : curve->value.name));
    });
}

void tsg_curve_free(tsg_curve* curve) { delete curve; }

tsg_status tsg_svtable_run(const tsg_generator_params* params, uint64_t kmin, uint64_t kmax,
                           tsg_svtable** out) {
    return guarded([&] {
        need(out, "out");
        const tsg::GeneratorParams p = params ? to_cpp(*params) : tsg::GeneratorParams{};
        const auto ks = k_range(kmin, kmax);
        *out = new tsg_svtable{tsg::singular_value_table(p, ks)};
    });
}

tsg_status tsg_svtable_size(const tsg_svtable* table, size_t* rows) {
    return guarded([&] {
        need(table, "table");
        need(rows, "rows");
        *rows = table->rows.size();
    });
}

tsg_status tsg_svtable_row(const tsg_svtable* table, size_t i, uint64_t* K, double* sigma1,
                           double* sigma2) {
    return guarded([&] {
        need(table, "table");
        tsg::require(i < table->rows.size(), "table row index out of range");
        const auto& r = table->rows[i];
        if (K)
            *K = r.K;
        if (sigma1)
            *sigma1 = r.sigma1;
        if (sigma2)
            *sigma2 = r.sigma2;
    });
}

tsg_status tsg_svtable_write(const tsg_svtable* table, const char* csv_path,
                             const char* svg_path) {
    return guarded([&] {
        need(table, "table");
        if (csv_path)
            tsg::io::write_text_atomic(csv_path, tsg::singular_value_csv(table->rows));
        if (svg_path)
            tsg::io::write_text_atomic(svg_path, tsg::singular_value_svg(table->rows));
    });
}

void tsg_svtable_free(tsg_svtable* table) { delete table; }

}  // extern "C"
