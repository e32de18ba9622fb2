#include "tsgresp/netcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "tsgresp/error.hpp"
#include "tsgresp/io.hpp"
#include "tsgresp/rng.hpp"

namespace tsg {

namespace {

constexpr int kContainerVersion = 1;

std::string shape_text(std::size_t N, std::size_t M, std::size_t n) {
    return "(N=" + std::to_string(N) + ", M=" + std::to_string(M) + ", n=" + std::to_string(n) +
           ")";
}

}  // namespace

LayerStack::LayerStack(std::size_t series, std::size_t layers, std::size_t nodes)
    : LayerStack(series, layers, nodes, std::vector<double>(series * layers * nodes * nodes)) {}

LayerStack::LayerStack(std::size_t series, std::size_t layers, std::size_t nodes,
                       std::vector<double> values)
    : series_(series), layers_(layers), nodes_(nodes), values_(std::move(values)) {
    require(series > 0 && layers > 0 && nodes > 0,
            "collection dimensions must be positive, got " + shape_text(series, layers, nodes));
    if (values_.size() != series * layers * nodes * nodes)
        fail(ErrorCode::shape_mismatch,
             "collection " + shape_text(series, layers, nodes) + " needs " +
                 std::to_string(series * layers * nodes * nodes) + " values, got " +
                 std::to_string(values_.size()));
}

ProbabilityCollection::ProbabilityCollection(LayerStack stack) : stack_(std::move(stack)) {
    for (double p : stack_.values())
        require(p >= 0.0 && p <= 1.0, "probability outside [0, 1]: " + io::format_double(p));
}

MultilayerCollection::MultilayerCollection(LayerStack stack) : stack_(std::move(stack)) {
    for (double a : stack_.values())
        require(a == 0.0 || a == 1.0, "adjacency entry is not 0/1: " + io::format_double(a));
    const std::size_t n = stack_.num_nodes();
    for (std::size_t k = 0; k < stack_.num_series(); ++k)
        for (std::size_t l = 0; l < stack_.num_layers(); ++l)
            for (std::size_t i = 0; i < n; ++i)
                require(stack_(k, l, i, i) == 0.0, "adjacency has a self-loop");
}

WeightedCollection::WeightedCollection(LayerStack stack) : stack_(std::move(stack)) {
    require(stack_.num_series() > 0, "weighted collection is empty");
}

const LayerStack& stack_of(const AnyCollection& c) {
    return std::visit([](const auto& x) -> const LayerStack& { return x.stack(); }, c);
}

std::string_view kind_name(const AnyCollection& c) {
    switch (c.index()) {
    case 0:
        return "prob";
    case 1:
        return "adj";
    default:
        return "weighted";
    }
}

MultilayerCollection sample_adjacency(const ProbabilityCollection& probs, std::uint64_t seed) {
    const LayerStack& p = probs.stack();
    const std::size_t n = p.num_nodes();
    LayerStack a(p.num_series(), p.num_layers(), n);
    for (std::size_t k = 0; k < p.num_series(); ++k) {
        for (std::size_t l = 0; l < p.num_layers(); ++l) {
            const auto rng = CounterRng::from(seed, {k, l});
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j && rng.uniform(i * n + j) < p(k, l, i, j))
                        a(k, l, i, j) = 1.0;
        }
    }
    return MultilayerCollection(std::move(a));
}

Matrix assemble_grand(const LayerStack& stack) {
    const std::size_t n = stack.num_nodes();
    Matrix grand(static_cast<Eigen::Index>(n * stack.num_series()),
                 static_cast<Eigen::Index>(n * stack.num_layers()));
    for (std::size_t k = 0; k < stack.num_series(); ++k)
        for (std::size_t l = 0; l < stack.num_layers(); ++l)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    grand(static_cast<Eigen::Index>(k * n + i),
                          static_cast<Eigen::Index>(l * n + j)) = stack(k, l, i, j);
    return grand;
}

LayerStack disassemble_grand(const Matrix& grand, std::size_t series, std::size_t layers) {
    require(series > 0 && layers > 0, "block counts must be positive");
    const auto rows = static_cast<std::size_t>(grand.rows());
    const auto cols = static_cast<std::size_t>(grand.cols());
    if (rows % series != 0 || cols % layers != 0 || rows / series != cols / layers)
        fail(ErrorCode::shape_mismatch, "grand matrix does not split into square blocks");
    const std::size_t n = rows / series;
    LayerStack stack(series, layers, n);
    for (std::size_t k = 0; k < series; ++k)
        for (std::size_t l = 0; l < layers; ++l)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    stack(k, l, i, j) = grand(static_cast<Eigen::Index>(k * n + i),
                                              static_cast<Eigen::Index>(l * n + j));
    return stack;
}

double percentile(std::vector<double> values, double pct) {
    require(!values.empty(), "percentile of an empty sample");
    require(pct >= 0.0 && pct <= 100.0, "percentile must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

MultilayerCollection binarize_weighted(const WeightedCollection& w, double pct) {
    const LayerStack& src = w.stack();
    std::vector<double> pooled;
    pooled.reserve(src.values().size());
    for (double v : src.values())
        pooled.push_back(std::abs(v));
    if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled.front(); }))
        fail(ErrorCode::degenerate, "all edge weights have the same magnitude; threshold is "
                                    "uninformative");
    const double tau = percentile(pooled, pct);

    const std::size_t n = src.num_nodes();
    LayerStack out(src.num_series(), src.num_layers(), n);
    for (std::size_t k = 0; k < src.num_series(); ++k)
        for (std::size_t l = 0; l < src.num_layers(); ++l)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j && std::abs(src(k, l, i, j)) > tau)
                        out(k, l, i, j) = 1.0;
    return MultilayerCollection(std::move(out));
}

// ---------------------------------------------------------------------------
// Container I/O

namespace {

void put_f64_le(std::string& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b)
        out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

double get_f64_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b)
        bits = (bits << 8) | p[b];
    return std::bit_cast<double>(bits);
}

}  // namespace

void save_collection(const AnyCollection& c, const std::filesystem::path& dir) {
    const LayerStack& s = stack_of(c);
    const bool as_bytes = std::holds_alternative<MultilayerCollection>(c);

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        fail(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());

    std::string payload;
    payload.reserve(s.values().size() * (as_bytes ? 1 : 8));
    for (double v : s.values()) {
        if (as_bytes)
            payload.push_back(static_cast<char>(v != 0.0 ? 1 : 0));
        else
            put_f64_le(payload, v);
    }

    nlohmann::ordered_json meta;
    meta["kind"] = kind_name(c);
    meta["N"] = s.num_series();
    meta["M"] = s.num_layers();
    meta["n"] = s.num_nodes();
    meta["dtype"] = as_bytes ? "u8" : "f64";
    meta["endianness"] = "little";
    meta["version"] = kContainerVersion;

    io::write_text_atomic(dir / "data.bin", payload);
    io::write_text_atomic(dir / "meta.json", meta.dump(2) + "\n");
}

AnyCollection load_collection(const std::filesystem::path& dir) {
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(io::read_text(dir / "meta.json"));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::format, "malformed meta.json in " + dir.string() + ": " + e.what());
    }

    std::string kind, dtype;
    std::size_t N = 0, M = 0, n = 0;
    try {
        kind = meta.at("kind").get<std::string>();
        dtype = meta.at("dtype").get<std::string>();
        N = meta.at("N").get<std::size_t>();
        M = meta.at("M").get<std::size_t>();
        n = meta.at("n").get<std::size_t>();
        if (meta.at("endianness").get<std::string>() != "little")
            fail(ErrorCode::format, "unsupported endianness in " + dir.string());
        if (meta.at("version").get<int>() != kContainerVersion)
            fail(ErrorCode::format, "unsupported container version in " + dir.string());
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::format, "malformed meta.json in " + dir.string() + ": " + e.what());
    }
    if (kind != "prob" && kind != "adj" && kind != "weighted")
        fail(ErrorCode::format, "unknown collection kind '" + kind + "'");
    if (dtype != "f64" && dtype != "u8")
        fail(ErrorCode::format, "unknown dtype '" + dtype + "'");
    if (N == 0 || M == 0 || n == 0)
        fail(ErrorCode::format, "meta.json declares an empty collection " + shape_text(N, M, n));

    const std::size_t count = N * M * n * n;
    const std::size_t width = dtype == "u8" ? 1 : 8;
    const std::size_t expected = count * width;
    const std::string payload = io::read_text(dir / "data.bin");
    if (payload.size() < expected)
        fail(ErrorCode::shape_mismatch,
             "data.bin is truncated: header " + shape_text(N, M, n) + " needs " +
                 std::to_string(expected) + " bytes, found " + std::to_string(payload.size()) +
                 " (missing " + std::to_string(expected - payload.size()) + " bytes)");
    if (payload.size() > expected)
        fail(ErrorCode::shape_mismatch,
             "data.bin holds " + std::to_string(payload.size()) + " bytes but header " +
                 shape_text(N, M, n) + " implies " + std::to_string(expected));

    std::vector<double> values(count);
    const auto* raw = reinterpret_cast<const unsigned char*>(payload.data());
    for (std::size_t i = 0; i < count; ++i)
        values[i] = width == 1 ? static_cast<double>(raw[i]) : get_f64_le(raw + 8 * i);

    LayerStack stack(N, M, n, std::move(values));
    if (kind == "prob")
        return ProbabilityCollection(std::move(stack));
    if (kind == "adj")
        return MultilayerCollection(std::move(stack));
    return WeightedCollection(std::move(stack));
}

void export_layer_csv(const LayerStack& stack, std::size_t k, std::size_t l,
                      const std::filesystem::path& file) {
    require(k < stack.num_series() && l < stack.num_layers(), "layer index out of range");
    const std::size_t n = stack.num_nodes();
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j)
                out += ',';
            out += io::format_double(stack(k, l, i, j));
        }
        out += '\n';
    }
    io::write_text_atomic(file, out);
}

}  // namespace tsg
