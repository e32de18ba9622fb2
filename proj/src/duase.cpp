#include "tsgresp/duase.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "tsgresp/error.hpp"
#include "tsgresp/io.hpp"
#include "svd.hpp"

namespace tsg {

namespace {

void fix_signs(SvdTriple& t) {
    for (Eigen::Index c = 0; c < t.U.cols(); ++c) {
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index r = 0; r < t.U.rows(); ++r) {
            const double a = std::abs(t.U(r, c));
            if (a > best_abs) {
                best_abs = a;
                best = r;
            }
        }
        if (t.U(best, c) < 0.0) {
            t.U.col(c) = -t.U.col(c);
            t.V.col(c) = -t.V.col(c);
        }
    }
}

std::vector<Matrix> split_rows(const Matrix& m, std::size_t blocks, std::size_t rows) {
    std::vector<Matrix> out;
    out.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b)
        out.emplace_back(m.middleRows(static_cast<Eigen::Index>(b * rows),
                                      static_cast<Eigen::Index>(rows)));
    return out;
}

Matrix stack_rows(const std::vector<Matrix>& blocks) {
    if (blocks.empty())
        return {};
    const Eigen::Index rows = blocks.front().rows();
    Matrix out(rows * static_cast<Eigen::Index>(blocks.size()), blocks.front().cols());
    for (std::size_t b = 0; b < blocks.size(); ++b)
        out.middleRows(static_cast<Eigen::Index>(b) * rows, rows) = blocks[b];
    return out;
}

}  // namespace

SvdTriple truncated_svd(const Matrix& m, std::size_t d, RankMode mode) {
    const auto limit = static_cast<std::size_t>(std::min(m.rows(), m.cols()));
    require(d >= 1, "embedding dimension must be at least 1");
    require(d <= limit, "embedding dimension " + std::to_string(d) + " exceeds min(rows, cols) = " +
                            std::to_string(limit));
    if (!m.allFinite())
        fail(ErrorCode::numerical, "matrix has non-finite entries");

    detail::TopSvd svd = detail::golub_kahan_svd(m, d);
    const auto di = static_cast<Eigen::Index>(d);
    SvdTriple t{std::move(svd.U), std::move(svd.sigma), std::move(svd.V)};

    if (mode == RankMode::strict) {
        const double s1 = t.sigma(0);
        const double tol = static_cast<double>(std::max(m.rows(), m.cols())) *
                           std::numeric_limits<double>::epsilon() * s1;
        if (!(t.sigma(di - 1) > tol))
            fail(ErrorCode::degenerate,
                 "matrix rank is below the requested dimension " + std::to_string(d));
    }
    fix_signs(t);
    return t;
}

Matrix EmbeddingStack::stacked_left() const { return stack_rows(left); }
Matrix EmbeddingStack::stacked_right() const { return stack_rows(right); }

EmbeddingStack duase(const LayerStack& collection, std::size_t d, RankMode mode) {
    const Matrix grand = assemble_grand(collection);
    const SvdTriple t = truncated_svd(grand, d, mode);
    const Vector root = t.sigma.cwiseSqrt();

    EmbeddingStack out;
    out.nodes = collection.num_nodes();
    out.dim = d;
    out.sigma = t.sigma;
    out.left = split_rows(t.U * root.asDiagonal(), collection.num_series(), out.nodes);
    out.right = split_rows(t.V * root.asDiagonal(), collection.num_layers(), out.nodes);
    return out;
}

Matrix reconstruct(const EmbeddingStack& stack) {
    require(!stack.right.empty(), "embedding stack has no right embeddings to reconstruct from");
    return stack.stacked_left() * stack.stacked_right().transpose();
}

void save_embeddings(const EmbeddingStack& stack, const std::filesystem::path& dir) {
    require(!stack.left.empty(), "embedding stack is empty");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        fail(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());

    std::string payload;
    payload.reserve(stack.left.size() * stack.nodes * stack.dim * 8);
    for (const Matrix& x : stack.left)
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                const auto bits = std::bit_cast<std::uint64_t>(x(i, j));
                for (int b = 0; b < 8; ++b)
                    payload.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
            }

    nlohmann::ordered_json meta;
    meta["kind"] = "embedding";
    meta["N"] = stack.left.size();
    meta["n"] = stack.nodes;
    meta["d"] = stack.dim;
    meta["dtype"] = "f64";
    meta["endianness"] = "little";
    meta["version"] = 1;
    meta["singular_values"] = std::vector<double>(stack.sigma.begin(), stack.sigma.end());

    io::write_text_atomic(dir / "embeddings.bin", payload);
    io::write_text_atomic(dir / "meta.json", meta.dump(2) + "\n");
}

EmbeddingStack load_embeddings(const std::filesystem::path& dir) {
    EmbeddingStack out;
    std::size_t N = 0;
    std::vector<double> sigma;
    try {
        const auto meta = nlohmann::json::parse(io::read_text(dir / "meta.json"));
        if (meta.at("kind").get<std::string>() != "embedding")
            fail(ErrorCode::format, dir.string() + " is not an embedding container");
        N = meta.at("N").get<std::size_t>();
        out.nodes = meta.at("n").get<std::size_t>();
        out.dim = meta.at("d").get<std::size_t>();
        if (meta.contains("singular_values"))
            sigma = meta["singular_values"].get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::format, "malformed meta.json in " + dir.string() + ": " + e.what());
    }
    if (N == 0 || out.nodes == 0 || out.dim == 0)
        fail(ErrorCode::format, "embedding container declares an empty shape");

    const std::string payload = io::read_text(dir / "embeddings.bin");
    const std::size_t expected = N * out.nodes * out.dim * 8;
    if (payload.size() != expected)
        fail(ErrorCode::shape_mismatch,
             "embeddings.bin holds " + std::to_string(payload.size()) + " bytes, expected " +
                 std::to_string(expected));

    const auto* raw = reinterpret_cast<const unsigned char*>(payload.data());
    std::size_t pos = 0;
    for (std::size_t k = 0; k < N; ++k) {
        Matrix x(static_cast<Eigen::Index>(out.nodes), static_cast<Eigen::Index>(out.dim));
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                std::uint64_t bits = 0;
                for (int b = 7; b >= 0; --b)
                    bits = (bits << 8) | raw[pos + static_cast<std::size_t>(b)];
                x(i, j) = std::bit_cast<double>(bits);
                pos += 8;
            }
        out.left.push_back(std::move(x));
    }
    out.sigma = Eigen::Map<const Vector>(sigma.data(), static_cast<Eigen::Index>(sigma.size()));
    return out;
}

}  // namespace tsg
