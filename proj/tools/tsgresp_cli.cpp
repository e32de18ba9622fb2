// tsgresp command-line front end. Talks to the library only through the C API.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsgresp/tsgresp.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

struct StageError : std::runtime_error {
    StageError(std::string stage_name, const std::string& message)
        : std::runtime_error(message), stage(std::move(stage_name)) {}
    std::string stage;
};

void check(tsg_status status, const std::string& stage) {
    if (status != TSG_OK)
        throw StageError(stage, std::string(tsg_status_name(status)) + ": " + tsg_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using Collection = std::unique_ptr<tsg_collection, Deleter<tsg_collection, tsg_collection_free>>;
using Embedding = std::unique_ptr<tsg_embedding, Deleter<tsg_embedding, tsg_embedding_free>>;
using Dissim = std::unique_ptr<tsg_dissim, Deleter<tsg_dissim, tsg_dissim_free>>;
using Instance = std::unique_ptr<tsg_instance, Deleter<tsg_instance, tsg_instance_free>>;
using Curve = std::unique_ptr<tsg_curve, Deleter<tsg_curve, tsg_curve_free>>;
using SvTable = std::unique_ptr<tsg_svtable, Deleter<tsg_svtable, tsg_svtable_free>>;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const fs::path& file, const std::string& text, const std::string& stage) {
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        out.flush();
        if (!out)
            throw StageError(stage, "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, file, ec);
    if (ec)
        throw StageError(stage, "cannot rename " + tmp.string() + ": " + ec.message());
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw StageError("output", "cannot create " + dir.string() + ": " + ec.message());
}

std::string read_file(const fs::path& file, const std::string& stage) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw StageError(stage, "cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Options shared by every subcommand.
struct Common {
    std::uint64_t seed = 0;
    std::string out;
    std::uint64_t threads = 1;
    std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Base seed")->capture_default_str();
    sub->add_option("--out", c.out, "Output directory")->required();
    sub->add_option("--threads", c.threads, "Worker thread cap (results do not depend on it)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", c.format, "Tabular output format")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
}

void add_stress(CLI::App* sub, tsg_stress_config& s) {
    sub->add_option("--max-iters", s.max_iters, "SMACOF iteration cap")->capture_default_str();
    sub->add_option("--rel-tol", s.rel_tol, "SMACOF relative stopping tolerance")
        ->capture_default_str();
    sub->add_option("--restarts", s.restarts, "Random SMACOF restarts")->capture_default_str();
}

void add_generator(CLI::App* sub, tsg_generator_params& p) {
    sub->add_option("--labeled", p.labeled, "Labeled series s")->capture_default_str();
    sub->add_option("--alpha", p.alpha, "Regression intercept")->capture_default_str();
    sub->add_option("--beta", p.beta, "Regression slope")->capture_default_str();
    sub->add_option("--noise-sd", p.noise_sd, "Response noise standard deviation")
        ->capture_default_str();
    sub->add_option("--dim", p.dim, "Latent dimension d")->capture_default_str();
}

// Records the resolved flag set of the subcommand chain that ran.
json resolved_flags(const CLI::App* sub) {
    json flags = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_name().empty() || opt->get_name() == "--help")
            continue;
        std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
        const auto& results = opt->results();
        if (!results.empty())
            flags[name] = results.size() == 1 ? json(results.front()) : json(results);
        else if (!opt->get_default_str().empty())
            flags[name] = opt->get_default_str();
    }
    return flags;
}

struct Manifest {
    std::string command;
    const CLI::App* app = nullptr;
    std::vector<std::string> argv;
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void write(const fs::path& dir) const {
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json j;
        j["command"] = command;
        j["argv"] = argv;
        j["flags"] = resolved_flags(app);
        j["seed"] = seed;
        j["library_version"] = tsg_version();
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["duration_seconds"] = seconds;
        write_atomic(dir / "manifest.json", j.dump(2) + "\n", "manifest");
    }
};

// Accepts either a collection container or a `simulate` output directory.
fs::path resolve_collection_dir(const fs::path& dir) {
    if (fs::exists(dir / "meta.json"))
        return dir;
    if (fs::exists(dir / "adj" / "meta.json"))
        return dir / "adj";
    throw StageError("load collection", "no collection container at " + dir.string());
}

Collection load_collection(const fs::path& dir) {
    tsg_collection* raw = nullptr;
    check(tsg_collection_load(resolve_collection_dir(dir).string().c_str(), &raw),
          "load collection");
    return Collection(raw);
}

// Two-column CSV "series,value" with an optional header line.
std::vector<std::pair<std::uint64_t, double>> read_pairs_csv(const fs::path& file) {
    std::istringstream in(read_file(file, "load labels"));
    std::vector<std::pair<std::uint64_t, double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos)
                throw std::invalid_argument("missing comma");
            std::size_t used = 0;
            const std::string first = line.substr(0, comma);
            const auto series = std::stoull(first, &used);
            if (used != first.size())
                throw std::invalid_argument("bad index");
            rows.emplace_back(series, std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            if (line_no == 1)
                continue;  // header
            throw StageError("load labels",
                             file.string() + ": malformed line " + std::to_string(line_no));
        }
    }
    return rows;
}

std::vector<double> embedding_left(const tsg_embedding* e, std::size_t k, std::size_t n,
                                   std::size_t d) {
    std::vector<double> out(n * d);
    check(tsg_embedding_left(e, k, out.data(), out.size()), "embed");
    return out;
}

std::vector<double> dissim_values(const tsg_dissim* delta, std::size_t& n) {
    check(tsg_dissim_size(delta, &n), "dissimilarity");
    std::vector<double> v(n * n);
    check(tsg_dissim_values(delta, v.data(), v.size()), "dissimilarity");
    return v;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::uint64_t K = 1;
    std::uint64_t replicate = 0;
    tsg_generator_params params = tsg_generator_params_default();
};

void run_simulate(const SimulateArgs& a, const Common& c, Manifest& m) {
    const fs::path out(c.out);
    make_dir(out);
    tsg_generator_params params = a.params;
    params.base_seed = c.seed;

    tsg_instance* raw = nullptr;
    check(tsg_instance_generate(a.K, &params, a.replicate, &raw), "generate");
    Instance inst(raw);
    size_t N = 0, labeled = 0, clamped = 0;
    check(tsg_instance_info(inst.get(), &N, &labeled, &clamped), "generate");

    tsg_collection* probs_raw = nullptr;
    check(tsg_instance_probabilities(inst.get(), &probs_raw), "generate");
    Collection probs(probs_raw);
    tsg_collection* adj_raw = nullptr;
    check(tsg_instance_adjacency(inst.get(), &adj_raw), "sample adjacency");
    Collection adj(adj_raw);

    check(tsg_collection_save(probs.get(), (out / "prob").string().c_str()), "save");
    check(tsg_collection_save(adj.get(), (out / "adj").string().c_str()), "save");

    std::vector<double> t(N), y(labeled);
    check(tsg_instance_scalars(inst.get(), t.data(), t.size()), "generate");
    check(tsg_instance_responses(inst.get(), y.data(), y.size()), "generate");
    std::string t_csv = "series,t\n", y_csv = "series,y\n";
    for (std::size_t k = 0; k < t.size(); ++k)
        t_csv += std::to_string(k) + "," + fmt(t[k]) + "\n";
    for (std::size_t k = 0; k < y.size(); ++k)
        y_csv += std::to_string(k) + "," + fmt(y[k]) + "\n";
    write_atomic(out / "t.csv", t_csv, "save");
    write_atomic(out / "y.csv", y_csv, "save");
    if (clamped > 0)
        std::cerr << "warning: " << clamped << " probabilities clamped to 1\n";

    m.outputs = {(out / "prob").string(), (out / "adj").string(), (out / "t.csv").string(),
                 (out / "y.csv").string()};
}

// ---------------------------------------------------------------------------
// embed

struct EmbedArgs {
    std::string data;
    std::uint64_t d = 2;
};

void run_embed(const EmbedArgs& a, const Common& c, Manifest& m) {
    const fs::path out(c.out);
    make_dir(out);
    Collection coll = load_collection(a.data);
    tsg_embedding* raw = nullptr;
    check(tsg_duase(coll.get(), a.d, &raw), "embed");
    Embedding emb(raw);
    check(tsg_embedding_save(emb.get(), out.string().c_str()), "save");
    m.inputs = {a.data};
    m.outputs = {(out / "meta.json").string(), (out / "embeddings.bin").string()};

    if (c.format == "csv") {
        check(tsg_embedding_write_csv(emb.get(), (out / "embeddings.csv").string().c_str()),
              "save");
        m.outputs.push_back((out / "embeddings.csv").string());
        return;
    }
    size_t N = 0, n = 0, d = 0;
    check(tsg_embedding_info(emb.get(), &N, &n, &d), "embed");
    std::vector<double> sv(d);
    check(tsg_embedding_singular_values(emb.get(), sv.data(), sv.size()), "embed");
    json j;
    j["singular_values"] = sv;
    auto series = json::array();
    for (std::size_t k = 0; k < N; ++k) {
        const auto x = embedding_left(emb.get(), k, n, d);
        auto rows = json::array();
        for (std::size_t i = 0; i < n; ++i)
            rows.push_back(std::vector<double>(x.begin() + static_cast<long>(i * d),
                                               x.begin() + static_cast<long>((i + 1) * d)));
        series.push_back(rows);
    }
    j["left"] = series;
    write_atomic(out / "embeddings.json", j.dump(2) + "\n", "save");
    m.outputs.push_back((out / "embeddings.json").string());
}

// ---------------------------------------------------------------------------
// dissim

struct DissimArgs {
    std::string data;
    std::string embedding;
    std::uint64_t d = 2;
};

void run_dissim(const DissimArgs& a, const Common& c, Manifest& m) {
    const fs::path out(c.out);
    make_dir(out);
    Embedding emb;
    if (!a.embedding.empty()) {
        tsg_embedding* raw = nullptr;
        check(tsg_embedding_load(a.embedding.c_str(), &raw), "load embedding");
        emb.reset(raw);
        m.inputs = {a.embedding};
    } else {
        Collection coll = load_collection(a.data);
        tsg_embedding* raw = nullptr;
        check(tsg_duase(coll.get(), a.d, &raw), "embed");
        emb.reset(raw);
        m.inputs = {a.data};
    }
    tsg_dissim* draw = nullptr;
    check(tsg_dissim_from_embedding(emb.get(), &draw), "dissimilarity");
    Dissim delta(draw);

    if (c.format == "csv") {
        const fs::path file = out / "dissimilarity.csv";
        check(tsg_dissim_save_csv(delta.get(), file.string().c_str()), "save");
        m.outputs = {file.string()};
        return;
    }
    std::size_t n = 0;
    const auto v = dissim_values(delta.get(), n);
    auto rows = json::array();
    for (std::size_t i = 0; i < n; ++i)
        rows.push_back(std::vector<double>(v.begin() + static_cast<long>(i * n),
                                           v.begin() + static_cast<long>((i + 1) * n)));
    write_atomic(out / "dissimilarity.json", json{{"dissimilarity", rows}}.dump(2) + "\n",
                 "save");
    m.outputs = {(out / "dissimilarity.json").string()};
}

// ---------------------------------------------------------------------------
// mds

struct MdsArgs {
    std::string input;
    tsg_stress_config stress = tsg_stress_config_default();
};

void run_mds(const MdsArgs& a, const Common& c, Manifest& m) {
    const fs::path out(c.out);
    make_dir(out);
    tsg_dissim* raw = nullptr;
    check(tsg_dissim_load_csv(a.input.c_str(), &raw), "load dissimilarity");
    Dissim delta(raw);
    size_t n = 0;
    check(tsg_dissim_size(delta.get(), &n), "load dissimilarity");

    tsg_stress_config cfg = a.stress;
    cfg.seed = c.seed;
    std::vector<double> z(n);
    tsg_stress_summary summary{};
    check(tsg_smacof(delta.get(), &cfg, z.data(), z.size(), &summary), "mds");

    m.inputs = {a.input};
    if (c.format == "csv") {
        std::string csv = "series,z\n";
        for (std::size_t k = 0; k < n; ++k)
            csv += std::to_string(k) + "," + fmt(z[k]) + "\n";
        write_atomic(out / "z.csv", csv, "save");
        m.outputs = {(out / "z.csv").string()};
    } else {
        write_atomic(out / "z.json", json{{"z", z}}.dump(2) + "\n", "save");
        m.outputs = {(out / "z.json").string()};
    }
    json report;
    report["stress"] = summary.stress;
    report["iterations"] = summary.iterations;
    report["converged"] = summary.converged != 0;
    report["restart_index"] = summary.restart_index;
    write_atomic(out / "report.json", report.dump(2) + "\n", "save");
    m.outputs.push_back((out / "report.json").string());
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
    std::string data;
    std::string request;
    std::string labels;
    std::vector<std::uint64_t> targets;
    std::uint64_t d = 2;
    double alpha_tilde = 0.05;
    tsg_stress_config stress = tsg_stress_config_default();
};

std::string build_request(const PredictArgs& a, const Common& c, const tsg_collection* coll) {
    if (!a.request.empty())
        return read_file(a.request, "load request");

    json req;
    req["d"] = a.d;
    req["alpha"] = a.alpha_tilde;
    auto labeled = json::array();
    std::set<std::uint64_t> seen;
    for (const auto& [series, y] : read_pairs_csv(a.labels)) {
        labeled.push_back({{"series", series}, {"response", y}});
        seen.insert(series);
    }
    req["labeled"] = labeled;
    std::vector<std::uint64_t> targets = a.targets;
    if (targets.empty()) {
        tsg_collection_kind kind{};
        size_t N = 0, M = 0, n = 0;
        check(tsg_collection_info(coll, &kind, &N, &M, &n), "load collection");
        for (std::uint64_t k = 0; k < N; ++k)
            if (!seen.count(k))
                targets.push_back(k);
    }
    req["targets"] = targets;
    req["stress"] = {{"max_iters", a.stress.max_iters},
                     {"rel_tol", a.stress.rel_tol},
                     {"restarts", a.stress.restarts},
                     {"seed", c.seed}};
    return req.dump();
}

void run_predict(const PredictArgs& a, const Common& c, Manifest& m) {
    const fs::path out(c.out);
    make_dir(out);
    Collection coll = load_collection(a.data);
    const std::string request = build_request(a, c, coll.get());

    char* raw = nullptr;
    check(tsg_predict_json(coll.get(), request.c_str(), &raw), "predict");
    const std::string report_text(raw);
    tsg_string_free(raw);

    m.inputs = {a.data};
    if (!a.request.empty())
        m.inputs.push_back(a.request);
    if (!a.labels.empty())
        m.inputs.push_back(a.labels);
    write_atomic(out / "request.json", json::parse(request).dump(2) + "\n", "save");
    write_atomic(out / "report.json", report_text, "save");
    m.outputs = {(out / "request.json").string(), (out / "report.json").string()};
    if (c.format != "csv")
        return;

    const json report = json::parse(report_text);
    std::string z_csv = "series,z\n";
    const auto& z = report.at("z");
    for (std::size_t k = 0; k < z.size(); ++k)
        z_csv += std::to_string(k) + "," + fmt(z[k].get<double>()) + "\n";
    std::string p_csv = "series,prediction\n";
    for (const auto& p : report.at("predictions"))
        p_csv += std::to_string(p.at("series").get<std::uint64_t>()) + "," +
                 fmt(p.at("value").get<double>()) + "\n";
    write_atomic(out / "z.csv", z_csv, "save");
    write_atomic(out / "predictions.csv", p_csv, "save");
    m.outputs.push_back((out / "z.csv").string());
    m.outputs.push_back((out / "predictions.csv").string());
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentArgs {
    std::uint64_t kmin = 1;
    std::uint64_t kmax = 10;
    std::optional<std::uint64_t> reps;
    double alpha_tilde = 0.05;
    bool population = false;
    tsg_generator_params params = tsg_generator_params_default();
    tsg_stress_config stress = tsg_stress_config_default();
};

void run_curve(const std::string& name, tsg_experiment_kind kind, const ExperimentArgs& a,
               const Common& c, Manifest& m) {
    const fs::path out(c.out);
    make_dir(out);
    tsg_experiment_options o = tsg_experiment_options_default();
    o.params = a.params;
    o.params.base_seed = c.seed;
    o.kmin = a.kmin;
    o.kmax = a.kmax;
    o.reps = a.reps.value_or(kind == TSG_EXPERIMENT_POWER ? 100 : 50);
    o.alpha_tilde = a.alpha_tilde;
    o.threads = c.threads;
    o.stress = a.stress;
    o.stress.seed = c.seed;
    o.population_variant = a.population ? 1 : 0;

    tsg_curve* raw = nullptr;
    check(tsg_experiment_run(kind, &o, &raw), name);
    Curve curve(raw);

    const fs::path reps_csv = out / (name + "_replicates.csv");
    const fs::path summary_csv = out / (name + "_summary.csv");
    const fs::path svg = out / (name + ".svg");
    const std::string title = kind == TSG_EXPERIMENT_POWER
                                  ? "Power gap |pi_hat - pi_star| versus K"
                                  : "Mean squared prediction gap versus K";
    check(tsg_curve_write(curve.get(), reps_csv.string().c_str(), summary_csv.string().c_str(),
                          svg.string().c_str(), title.c_str()),
          "save");
    m.outputs = {reps_csv.string(), summary_csv.string(), svg.string()};

    size_t points = 0, failed_total = 0;
    check(tsg_curve_size(curve.get(), &points), name);
    auto rows = json::array();
    for (std::size_t i = 0; i < points; ++i) {
        std::uint64_t K = 0;
        double summary = 0.0;
        size_t failed = 0;
        check(tsg_curve_point(curve.get(), i, &K, &summary, &failed), name);
        failed_total += failed;
        rows.push_back({{"K", K}, {"summary", summary}, {"failed", failed}});
    }
    if (failed_total > 0)
        std::cerr << "warning: " << failed_total << " replicates failed; see "
                  << reps_csv.string() << "\n";
    if (c.format == "json") {
        write_atomic(out / (name + "_summary.json"), json{{"points", rows}}.dump(2) + "\n",
                     "save");
        m.outputs.push_back((out / (name + "_summary.json")).string());
    }
}

void run_svdtable(const ExperimentArgs& a, const Common& c, Manifest& m) {
    const fs::path out(c.out);
    make_dir(out);
    tsg_generator_params params = a.params;
    params.base_seed = c.seed;
    tsg_svtable* raw = nullptr;
    check(tsg_svtable_run(&params, a.kmin, a.kmax, &raw), "svdtable");
    SvTable table(raw);
    const fs::path csv = out / "svdtable.csv";
    const fs::path svg = out / "svdtable.svg";
    check(tsg_svtable_write(table.get(), csv.string().c_str(), svg.string().c_str()), "save");
    m.outputs = {csv.string(), svg.string()};
    if (c.format != "json")
        return;
    size_t rows_count = 0;
    check(tsg_svtable_size(table.get(), &rows_count), "svdtable");
    auto rows = json::array();
    for (std::size_t i = 0; i < rows_count; ++i) {
        std::uint64_t K = 0;
        double s1 = 0.0, s2 = 0.0;
        check(tsg_svtable_row(table.get(), i, &K, &s1, &s2), "svdtable");
        rows.push_back({{"K", K}, {"sigma1", s1}, {"sigma2", s2}, {"ratio", s2 / s1}});
    }
    write_atomic(out / "svdtable.json", json{{"rows", rows}}.dump(2) + "\n", "save");
    m.outputs.push_back((out / "svdtable.json").string());
}

void add_experiment_options(CLI::App* sub, ExperimentArgs& a, Common& c, bool curve) {
    add_common(sub, c);
    sub->add_option("--kmin", a.kmin, "First K of the grid")->capture_default_str();
    sub->add_option("--kmax", a.kmax, "Last K of the grid")->capture_default_str();
    add_generator(sub, a.params);
    if (!curve)
        return;
    sub->add_option("--reps", a.reps, "Replicates per K (default 50 for fig1, 100 for fig2)");
    sub->add_option("--alpha-tilde", a.alpha_tilde, "F-test significance level")
        ->capture_default_str();
    add_stress(sub, a.stress);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Response prediction for time series of multilayer networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tsg_version()));

    Common common;
    SimulateArgs sim;
    EmbedArgs embed;
    DissimArgs dis;
    MdsArgs mds;
    PredictArgs pred;
    ExperimentArgs exp;

    auto* simulate = app.add_subcommand("simulate", "Generate a probability and adjacency dataset");
    add_common(simulate, common);
    simulate->add_option("--K", sim.K, "Growth-schedule index")->capture_default_str()->check(
        CLI::PositiveNumber);
    simulate->add_option("--replicate", sim.replicate, "Replicate index")->capture_default_str();
    add_generator(simulate, sim.params);

    auto* embed_cmd = app.add_subcommand("embed", "Left embeddings of every series");
    add_common(embed_cmd, common);
    embed_cmd->add_option("--data", embed.data, "Collection container")->required();
    embed_cmd->add_option("--d", embed.d, "Embedding dimension")->capture_default_str();

    auto* dissim_cmd = app.add_subcommand("dissim", "Pairwise 2,inf dissimilarities");
    add_common(dissim_cmd, common);
    auto* dis_data = dissim_cmd->add_option("--data", dis.data, "Collection container");
    auto* dis_emb = dissim_cmd->add_option("--embedding", dis.embedding, "Embedding container");
    dis_data->excludes(dis_emb);
    dissim_cmd->add_option("--d", dis.d, "Embedding dimension")->capture_default_str();
    dissim_cmd->callback([&] {
        if (dis.data.empty() && dis.embedding.empty())
            throw CLI::RequiredError("--data or --embedding");
    });

    auto* mds_cmd = app.add_subcommand("mds", "One-dimensional raw-stress embedding");
    add_common(mds_cmd, common);
    mds_cmd->add_option("--input", mds.input, "Dissimilarity CSV")->required();
    add_stress(mds_cmd, mds.stress);

    auto* predict_cmd = app.add_subcommand("predict", "Predict responses of unlabeled series");
    add_common(predict_cmd, common);
    predict_cmd->add_option("--data", pred.data, "Collection container or simulate directory")
        ->required();
    auto* req_opt = predict_cmd->add_option("--request", pred.request, "JSON request file");
    auto* lab_opt = predict_cmd->add_option("--labels", pred.labels, "CSV of series,response");
    req_opt->excludes(lab_opt);
    predict_cmd->add_option("--target", pred.targets, "Series to predict (default: unlabeled)");
    predict_cmd->add_option("--d", pred.d, "Embedding dimension")->capture_default_str();
    predict_cmd->add_option("--alpha-tilde", pred.alpha_tilde, "F-test significance level")
        ->capture_default_str();
    add_stress(predict_cmd, pred.stress);
    predict_cmd->callback([&] {
        if (pred.request.empty() && pred.labels.empty())
            throw CLI::RequiredError("--request or --labels");
    });

    auto* experiment = app.add_subcommand("experiment", "Simulation experiments");
    experiment->require_subcommand(1);
    auto* fig1 = experiment->add_subcommand("fig1", "Prediction-gap convergence curve");
    add_experiment_options(fig1, exp, common, true);
    fig1->add_flag("--population", exp.population,
                   "Also embed the probability matrix and record its gap");
    auto* fig2 = experiment->add_subcommand("fig2", "Power-gap convergence curve");
    add_experiment_options(fig2, exp, common, true);
    auto* svdtable = experiment->add_subcommand("svdtable", "Top singular values per K");
    add_experiment_options(svdtable, exp, common, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    Manifest manifest;
    manifest.argv.assign(argv, argv + argc);
    manifest.seed = common.seed;
    try {
        const CLI::App* ran = nullptr;
        if (simulate->parsed()) {
            manifest.command = "simulate";
            ran = simulate;
            run_simulate(sim, common, manifest);
        } else if (embed_cmd->parsed()) {
            manifest.command = "embed";
            ran = embed_cmd;
            run_embed(embed, common, manifest);
        } else if (dissim_cmd->parsed()) {
            manifest.command = "dissim";
            ran = dissim_cmd;
            run_dissim(dis, common, manifest);
        } else if (mds_cmd->parsed()) {
            manifest.command = "mds";
            ran = mds_cmd;
            run_mds(mds, common, manifest);
        } else if (predict_cmd->parsed()) {
            manifest.command = "predict";
            ran = predict_cmd;
            run_predict(pred, common, manifest);
        } else if (fig1->parsed()) {
            manifest.command = "experiment fig1";
            ran = fig1;
            run_curve("fig1", TSG_EXPERIMENT_PREDICTION, exp, common, manifest);
        } else if (fig2->parsed()) {
            manifest.command = "experiment fig2";
            ran = fig2;
            run_curve("fig2", TSG_EXPERIMENT_POWER, exp, common, manifest);
        } else {
            manifest.command = "experiment svdtable";
            ran = svdtable;
            run_svdtable(exp, common, manifest);
        }
        manifest.app = ran;
        manifest.write(common.out);
    } catch (const StageError& e) {
        std::cerr << "error [" << e.stage << "]: " << e.what() << "\n";
        return kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << "error [" << manifest.command << "]: " << e.what() << "\n";
        return kExitComputation;
    }
    return 0;
}
