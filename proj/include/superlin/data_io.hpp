#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "superlin/attack_analysis.hpp"
#include "superlin/detector_models.hpp"

namespace superlin {

// Curve files are comma-delimited text:
//
//   # label: synthetic linear detector
//   mu,p
//   1,0.0952
//   2,0.1813
//
// Lines starting with '#' are comments; "# label: ..." sets the curve label.
// Grid files use the columns t_ns,mu,p. Columns may appear in any order.

ResponseCurve load_curve(const std::filesystem::path& path);
TimeResolvedResponse load_grid(const std::filesystem::path& path);

/// Parsers behind the loaders; `source` names the origin in error messages.
ResponseCurve parse_curve(const std::string& text, const std::string& source);
TimeResolvedResponse parse_grid(const std::string& text,
                                const std::string& source);

std::string render_curve(const ResponseCurve& curve);
std::string render_grid(const TimeResolvedResponse& grid);
void write_curve(const ResponseCurve& curve, const std::filesystem::path& path);
void write_grid(const TimeResolvedResponse& grid,
                const std::filesystem::path& path);

enum class TableFormat { csv, json };

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// CSV: header plus one line per row, empty cells for monostate. JSON: an
/// array of objects keyed by column, null for monostate. Output is a pure
/// function of the table.
std::string render_table(const Table& table, TableFormat format);

Table scan_table(std::span<const AttackPoint> points);

/// Columns mu,t,p_f0,p_f1,p_h0,p_h1,qber,transmittance,loss_db.
std::string render_scan(std::span<const AttackPoint> points, TableFormat format);
void write_scan(std::span<const AttackPoint> points,
                const std::filesystem::path& path, TableFormat format);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of the file contents.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace superlin
