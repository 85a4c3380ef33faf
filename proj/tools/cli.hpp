#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "heisenbound/hgeom.hpp"
#include "heisenbound/report.hpp"

namespace heisenbound::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kViolation = 2;
inline constexpr int kNumericalFailure = 3;
inline constexpr int kCoverageError = 4;

struct RunConfig {
  std::string command;  // dist, ball-vol, inradius, tube, sigma, eigen, verify, hardy
  std::optional<std::filesystem::path> domain_file;
  int resolution = 24;
  int num_eigs = 30;
  std::optional<double> lambda_max;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> out;
  ReportFormat format = ReportFormat::csv;
  std::optional<GroupPoint> from;
  std::optional<GroupPoint> to;
  std::optional<double> beta;
  int n_beta = 16;
  double epsilon = 0.125;
  std::optional<double> hardy_c;
  std::int64_t samples = 1000000;
  int num_lambda = 50;
  double slack = 0.02;
  unsigned threads = 0;
};

/// Parses "x1,x2,x3".
GroupPoint parse_point(const std::string& text);

/// Runs one pipeline. Prints a one-line summary to `out` and a one-line
/// diagnostic to `err` on failure; returns the exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Command-line front end: parses argv into a RunConfig and calls run().
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heisenbound::cli
