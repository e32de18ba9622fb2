#include "tsgresp/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "tsgresp/error.hpp"

namespace tsg::io {

std::string format_double(double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

std::string read_text(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        fail(ErrorCode::io, "cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_atomic(const std::filesystem::path& file, const std::string& content) {
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(ErrorCode::io, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            fail(ErrorCode::io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
    if (ec)
        fail(ErrorCode::io, "cannot rename " + tmp.string() + ": " + ec.message());
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& row) {
    row.clear();
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t end = line.find(',', pos);
        if (end == std::string::npos)
            end = line.size();
        std::size_t a = pos, b = end;
        while (a < b && (line[a] == ' ' || line[a] == '\t'))
            ++a;
        while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t' || line[b - 1] == '\r'))
            --b;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(line.data() + a, line.data() + b, v);
        if (a == b || ec != std::errc() || ptr != line.data() + b)
            return false;
        row.push_back(v);
        pos = end + 1;
    }
    return true;
}

}  // namespace

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& file) {
    std::istringstream in(read_text(file));
    std::vector<std::vector<double>> rows;
    std::string line;
    std::vector<double> row;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r")
            continue;
        if (!parse_row(line, row)) {
            if (rows.empty() && lineno == 1)
                continue;
            fail(ErrorCode::format,
                 file.string() + ":" + std::to_string(lineno) + ": not a numeric CSV row");
        }
        rows.push_back(row);
    }
    return rows;
}

std::string matrix_csv(const Matrix& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j)
                out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

}  // namespace tsg::io
