#pragma once

// Small file helpers shared by the container formats and CSV outputs.

#include <filesystem>
#include <string>
#include <vector>

#include "tsgresp/netcore.hpp"

namespace tsg::io {

/// Shortest text that parses back to the same double ("%.17g").
std::string format_double(double v);

std::string read_text(const std::filesystem::path& file);

/// Writes to a sibling temporary and renames it into place.
void write_text_atomic(const std::filesystem::path& file, const std::string& content);

/// Numeric CSV rows. A first line that does not parse as numbers is treated
/// as a header and skipped.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& file);

std::string matrix_csv(const Matrix& m);

}  // namespace tsg::io
