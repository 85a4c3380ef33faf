#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heisenbound/bounds.hpp"
#include "heisenbound/spectral.hpp"

namespace heisenbound {

enum class ReportFormat { csv, json };

/// "csv" or "json"; anything else is InvalidArgument naming "format".
ReportFormat parse_format(std::string_view text);

/// Column table with optional (missing) cells. Reports in both formats print
/// every number with 9 significant digits, so CSV and JSON carry the same text.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
  std::vector<std::pair<std::string, double>> metadata;  // JSON only
};

std::string format_number(double value);

Table to_table(const BoundReport& report);
Table to_table(const Spectrum& spectrum);

void write_csv(std::ostream& out, const Table& table);
void write_json(std::ostream& out, const Table& table);

/// Writes the table to `path`; refuses an empty table before touching the
/// file and throws std::runtime_error if the file cannot be written.
void emit_report(const Table& table, ReportFormat format, const std::filesystem::path& path);

}  // namespace heisenbound
