#pragma once

// Collections of multilayer directed graphs: N series, each holding M layers
// on a common set of n nodes. Member (k, l) is the n x n matrix of series k,
// layer l. Storage is dense, row-major per member, series-major then
// layer-major across members (the same order as the on-disk payload).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace tsg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class LayerStack {
public:
    LayerStack() = default;
    LayerStack(std::size_t series, std::size_t layers, std::size_t nodes);
    LayerStack(std::size_t series, std::size_t layers, std::size_t nodes,
               std::vector<double> values);

    std::size_t num_series() const noexcept { return series_; }
    std::size_t num_layers() const noexcept { return layers_; }
    std::size_t num_nodes() const noexcept { return nodes_; }
    std::size_t member_size() const noexcept { return nodes_ * nodes_; }

    double operator()(std::size_t k, std::size_t l, std::size_t i, std::size_t j) const {
        return values_[offset(k, l) + i * nodes_ + j];
    }
    double& operator()(std::size_t k, std::size_t l, std::size_t i, std::size_t j) {
        return values_[offset(k, l) + i * nodes_ + j];
    }

    std::span<const double> member(std::size_t k, std::size_t l) const {
        return {values_.data() + offset(k, l), member_size()};
    }
    std::span<double> member(std::size_t k, std::size_t l) {
        return {values_.data() + offset(k, l), member_size()};
    }

    std::span<const double> values() const noexcept { return values_; }

    bool same_shape(const LayerStack& other) const noexcept {
        return series_ == other.series_ && layers_ == other.layers_ && nodes_ == other.nodes_;
    }

    friend bool operator==(const LayerStack&, const LayerStack&) = default;

private:
    std::size_t offset(std::size_t k, std::size_t l) const noexcept {
        return (k * layers_ + l) * member_size();
    }

    std::size_t series_ = 0;
    std::size_t layers_ = 0;
    std::size_t nodes_ = 0;
    std::vector<double> values_;
};

/// Edge probabilities P^(k,l). Entries lie in [0, 1]. Diagonal entries are
/// allowed to be nonzero (a generated grand matrix keeps them); sampling never
/// produces self-loops regardless.
class ProbabilityCollection {
public:
    explicit ProbabilityCollection(LayerStack stack);
    const LayerStack& stack() const noexcept { return stack_; }
    friend bool operator==(const ProbabilityCollection&, const ProbabilityCollection&) = default;

private:
    LayerStack stack_;
};

/// Binary adjacency matrices A^(k,l): entries exactly 0 or 1, zero diagonal.
class MultilayerCollection {
public:
    explicit MultilayerCollection(LayerStack stack);
    const LayerStack& stack() const noexcept { return stack_; }
    friend bool operator==(const MultilayerCollection&, const MultilayerCollection&) = default;

private:
    LayerStack stack_;
};

/// Signed real edge weights; only the shape is constrained.
class WeightedCollection {
public:
    explicit WeightedCollection(LayerStack stack);
    const LayerStack& stack() const noexcept { return stack_; }
    friend bool operator==(const WeightedCollection&, const WeightedCollection&) = default;

private:
    LayerStack stack_;
};

using AnyCollection = std::variant<ProbabilityCollection, MultilayerCollection, WeightedCollection>;

const LayerStack& stack_of(const AnyCollection& c);
std::string_view kind_name(const AnyCollection& c);

/// Off-diagonal entries are independent Bernoulli(P_ij) draws keyed by
/// (seed, k, l, i, j); the diagonal is always zero.
MultilayerCollection sample_adjacency(const ProbabilityCollection& probs, std::uint64_t seed);

/// The nN x nM block matrix whose (k, l) block is member (k, l).
Matrix assemble_grand(const LayerStack& stack);

/// Inverse of assemble_grand for a given block shape.
LayerStack disassemble_grand(const Matrix& grand, std::size_t series, std::size_t layers);

/// Linear-interpolation (inclusive) percentile of a sample, percentile in [0, 100].
double percentile(std::vector<double> values, double pct);

/// 1 where |w| is strictly above the given percentile of all pooled |w|,
/// 0 elsewhere and on the diagonal. Throws `degenerate` when every |w| is equal.
MultilayerCollection binarize_weighted(const WeightedCollection& w, double pct);

// Dataset container: <dir>/meta.json plus <dir>/data.bin (little-endian).
void save_collection(const AnyCollection& c, const std::filesystem::path& dir);
AnyCollection load_collection(const std::filesystem::path& dir);

/// Member (k, l) as CSV, one matrix row per line.
void export_layer_csv(const LayerStack& stack, std::size_t k, std::size_t l,
                      const std::filesystem::path& file);

}  // namespace tsg
