#pragma once

// Matrix and value-list file formats.
//
// JSON matrix: {"n": 2, "data": [[1,0],[0,0],[0,0],[-1,0]]}, row-major
// (re, im) pairs. CSV matrix: n lines of 2n comma-separated reals with
// re and im interleaved. Value list: one "re,im" (or "re") per line;
// blank lines and lines starting with '#' are skipped.

#include "commfact/matcore.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace commfact::io {

enum class MatrixFormat { Json, Csv };

/// .json selects Json and .csv selects Csv; anything else throws InvalidArgument.
MatrixFormat format_from_path(const std::filesystem::path& path);

/// Throws ParseError carrying a 1-based line and column.
Matrix parse_matrix(const std::string& text, MatrixFormat format);
Matrix read_matrix(const std::filesystem::path& path);
Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format);

/// Shortest round-trip decimal text; parse_matrix(serialize_matrix(m)) == m bit for bit.
std::string serialize_matrix(const Matrix& m, MatrixFormat format);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

std::vector<cplx> parse_values(const std::string& text);
std::vector<cplx> read_values(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace commfact::io
