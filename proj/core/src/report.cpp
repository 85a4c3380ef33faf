#include "heisenbound/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "heisenbound/errors.hpp"

namespace heisenbound {

ReportFormat parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  throw InvalidArgument(fmt::format("format: expected csv or json, got \"{}\"", text));
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.9g}", value);
}

Table to_table(const BoundReport& report) {
  Table t;
  t.columns = {"lambda",    "riesz",        "hl",           "melas",
               "improved",  "margin_hl",    "margin_melas", "margin_improved"};
  for (std::size_t i = 0; i < report.lambda_grid.size(); ++i) {
    std::optional<double> improved;
    std::optional<double> margin_improved;
    if (report.has_improved()) {
      improved = report.improved[i];
      margin_improved = report.margin_improved[i];
    }
    t.rows.push_back({report.lambda_grid[i], report.riesz[i], report.hl[i], report.melas[i], improved,
                      report.margin_hl[i], report.margin_melas[i], margin_improved});
  }
  t.metadata = {{"valid_up_to", report.valid_up_to},
                {"slack", report.slack},
                {"violations", static_cast<double>(report.violations)}};
  return t;
}

Table to_table(const Spectrum& spectrum) {
  Table t;
  t.columns = {"index", "eigenvalue", "residual"};
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    t.rows.push_back({static_cast<double>(i + 1), spectrum.eigenvalues[i], spectrum.residuals[i]});
  }
  return t;
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (row[c]) out << format_number(*row[c]);
    }
    out << '\n';
  }
}

void write_json(std::ostream& out, const Table& table) {
  // JSON has no NaN/inf literal; those cells become null like missing ones.
  auto value = [](const std::optional<double>& v) -> std::string {
    return v && std::isfinite(*v) ? format_number(*v) : "null";
  };
  out << "{\n";
  for (const auto& [key, v] : table.metadata) out << "  \"" << key << "\": " << value(v) << ",\n";
  out << "  \"rows\": [";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << (r ? ",\n    {" : "\n    {");
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? ", " : "") << '"' << table.columns[c] << "\": " << value(table.rows[r][c]);
    }
    out << '}';
  }
  out << "\n  ]\n}\n";
}

void emit_report(const Table& table, ReportFormat format, const std::filesystem::path& path) {
  if (table.rows.empty()) throw InvalidArgument("report is empty; nothing written");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("out: cannot write \"{}\"", path.string()));
  if (format == ReportFormat::csv) {
    write_csv(out, table);
  } else {
    write_json(out, table);
  }
  out.flush();
  if (!out) throw std::runtime_error(fmt::format("out: write to \"{}\" failed", path.string()));
}

}  // namespace heisenbound
