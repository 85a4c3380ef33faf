#include "cli.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "heisenbound/bounds.hpp"
#include "heisenbound/domains.hpp"
#include "heisenbound/errors.hpp"
#include "heisenbound/parallel.hpp"
#include "heisenbound/spectral.hpp"

namespace heisenbound::cli {

namespace {

// Status-carrying error for config problems detected here.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

DomainSpec require_domain(const RunConfig& config) {
  if (!config.domain_file) {
    throw ConfigError(fmt::format("{}: missing required option --domain-file (domain_file)",
                                  config.command));
  }
  return load_domain_file(*config.domain_file);
}

void require_positive(int value, const char* key) {
  if (value <= 0) throw ConfigError(fmt::format("{}={} must be positive", key, value));
}

void maybe_emit(const RunConfig& config, const Table& table) {
  if (config.out) emit_report(table, config.format, *config.out);
}

int run_dist(const RunConfig& config, std::ostream& out) {
  if (!config.from) throw ConfigError("dist: missing required option --from (from)");
  if (!config.to) throw ConfigError("dist: missing required option --to (to)");
  const double d = cc_distance(*config.from, *config.to);
  out << format_number(d) << '\n';
  Table t;
  t.columns = {"x1", "x2", "x3", "y1", "y2", "y3", "distance"};
  t.rows.push_back({config.from->x1, config.from->x2, config.from->x3, config.to->x1, config.to->x2,
                    config.to->x3, d});
  maybe_emit(config, t);
  return kOk;
}

int run_ball_volume(const RunConfig& config, std::ostream& out) {
  const CCMetrics quad = unit_ball_volume(config.resolution);
  const CCMetrics mc = mc_ball_volume(1.0, config.samples, config.seed);
  const double gap = std::abs(quad.unit_ball_volume - mc.unit_ball_volume);
  const bool agree = gap <= 3.0 * mc.estimate_stderr + quad.estimate_stderr;
  out << fmt::format("|B1| quadrature={} mc={} stderr={} {}\n", format_number(quad.unit_ball_volume),
                     format_number(mc.unit_ball_volume), format_number(mc.estimate_stderr),
                     agree ? "agree" : "DISAGREE");
  Table t;
  t.columns = {"quadrature", "quadrature_error", "monte_carlo", "monte_carlo_stderr"};
  t.rows.push_back({quad.unit_ball_volume, quad.estimate_stderr, mc.unit_ball_volume, mc.estimate_stderr});
  maybe_emit(config, t);
  return agree ? kOk : kViolation;
}

int run_inradius(const RunConfig& config, std::ostream& out) {
  const DomainSpec spec = require_domain(config);
  const double r = in_radius(spec, config.resolution);
  out << fmt::format("in_radius={}\n", format_number(r));
  Table t;
  t.columns = {"resolution", "in_radius"};
  t.rows.push_back({static_cast<double>(config.resolution), r});
  maybe_emit(config, t);
  return kOk;
}

// Rows beta, tube, lower bound R^4 - (R - beta)^4 times |B_1|, margin.
int run_tube(const RunConfig& config, std::ostream& out) {
  const DomainSpec spec = require_domain(config);
  const DistanceField field = distance_field(spec, config.resolution);
  const double r = in_radius(spec, field);
  const double b1 = unit_ball_volume_reference();
  const std::vector<double> betas =
      config.beta ? std::vector<double>{*config.beta} : sigma_beta_grid(r, config.n_beta);
  Table t;
  t.columns = {"beta", "tube_volume", "lower_bound", "margin"};
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const double beta : betas) {
    const double tube = tube_volume(field, beta, r);
    const double lower = (std::pow(r, 4) - std::pow(r - beta, 4)) * b1;
    const double margin = tube - lower;
    violations += margin < -config.slack * lower;
    worst = std::min(worst, margin / lower);
    t.rows.push_back({beta, tube, lower, margin});
  }
  maybe_emit(config, t);
  const double first = *t.rows.front()[1];
  out << fmt::format("tube_volume={} in_radius={} worst_relative_margin={} {}\n", format_number(first),
                     format_number(r), format_number(worst), violations ? "VIOLATED" : "ok");
  return violations ? kViolation : kOk;
}

int run_sigma(const RunConfig& config, std::ostream& out) {
  const DomainSpec spec = require_domain(config);
  const DistanceField field = distance_field(spec, config.resolution);
  const double r = in_radius(spec, field);
  const double s = sigma(field, r, config.n_beta);
  const double lower = r * r * r * unit_ball_volume_reference();
  const bool ok = s >= lower * (1.0 - config.slack);
  Table t;
  t.columns = {"beta", "tube_volume", "ratio"};
  for (const double beta : sigma_beta_grid(r, config.n_beta)) {
    const double tube = tube_volume(field, beta, r);
    t.rows.push_back({beta, tube, tube / beta});
  }
  maybe_emit(config, t);
  out << fmt::format("sigma={} lower_bound={} {}\n", format_number(s), format_number(lower),
                     ok ? "ok" : "VIOLATED");
  return ok ? kOk : kViolation;
}

int run_eigen(const RunConfig& config, std::ostream& out) {
  const DomainSpec spec = require_domain(config);
  require_positive(config.num_eigs, "num_eigs");
  const Spectrum spectrum =
      lowest_eigenvalues(assemble(voxelize(spec, config.resolution)), config.num_eigs);
  maybe_emit(config, to_table(spectrum));
  double worst = 0.0;
  for (const double r : spectrum.residuals) worst = std::max(worst, r);
  out << fmt::format("lambda_1={} lambda_{}={} max_residual={}\n",
                     format_number(spectrum.eigenvalues.front()), spectrum.count,
                     format_number(spectrum.eigenvalues.back()), format_number(worst));
  return kOk;
}

int run_verify(const RunConfig& config, std::ostream& out) {
  const DomainSpec spec = require_domain(config);
  require_positive(config.num_eigs, "num_eigs");
  require_positive(config.num_lambda, "num_lambda");
  const Spectrum spectrum =
      lowest_eigenvalues(assemble(voxelize(spec, config.resolution)), config.num_eigs);
  const DomainMetrics metrics = domain_metrics(spec, config.resolution, config.n_beta);
  const bool improved = config.hardy_c.has_value() || spec.kind == DomainKind::cc_ball;
  const BoundParams params = make_params(spec, metrics, config.hardy_c.value_or(2.0));
  const double top = config.lambda_max.value_or(spectrum.max_eigenvalue());
  if (!(top > spectrum.eigenvalues.front())) {
    throw ConfigError(fmt::format("lambda_max={} must exceed lambda_1={}", top,
                                  spectrum.eigenvalues.front()));
  }
  const auto grid = linspace(spectrum.eigenvalues.front(), top, config.num_lambda);
  const BoundReport report = verify(spectrum, params, grid, {config.slack, improved});
  maybe_emit(config, to_table(report));
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < report.hl.size(); ++i) {
    worst = std::min(worst, report.margin_melas[i] / report.hl[i]);
  }
  out << fmt::format("verify: {} lambdas up to {} worst melas margin/hl={} {}\n", grid.size(),
                     format_number(top), format_number(worst),
                     report.ok() ? "ok" : fmt::format("VIOLATED ({})", report.violations));
  return report.ok() ? kOk : kViolation;
}

int run_hardy(const RunConfig& config, std::ostream& out) {
  const DomainSpec spec = require_domain(config);
  const HardyQuotient q = hardy_quotient(spec, config.epsilon, config.resolution);
  Table t;
  t.columns = {"epsilon", "quotient", "hardy_estimate", "form", "weighted_norm"};
  t.rows.push_back({config.epsilon, q.quotient, q.hardy_estimate, q.form, q.weighted_norm});
  maybe_emit(config, t);
  out << fmt::format("hardy epsilon={} quotient={} estimate={}\n", format_number(config.epsilon),
                     format_number(q.quotient), format_number(q.hardy_estimate));
  return kOk;
}

}  // namespace

GroupPoint parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw InvalidArgument(fmt::format("point \"{}\": \"{}\" is not a number", text, part));
    }
  }
  if (v.size() != 3) throw InvalidArgument(fmt::format("point \"{}\" needs 3 coordinates", text));
  return {v[0], v[1], v[2]};
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.threads) set_thread_count(config.threads);
    require_positive(config.resolution, "resolution");
    if (config.command == "dist") return run_dist(config, out);
    if (config.command == "ball-vol") return run_ball_volume(config, out);
    if (config.command == "inradius") return run_inradius(config, out);
    if (config.command == "tube") return run_tube(config, out);
    if (config.command == "sigma") return run_sigma(config, out);
    if (config.command == "eigen") return run_eigen(config, out);
    if (config.command == "verify") return run_verify(config, out);
    if (config.command == "hardy") return run_hardy(config, out);
    throw ConfigError(fmt::format("command: unknown command \"{}\"", config.command));
  } catch (const CoverageError& e) {
    err << "error: " << e.what() << '\n';
    return kCoverageError;
  } catch (const NumericalFailure& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heisenberg group geometry and Dirichlet eigenvalue bounds"};
  app.require_subcommand(1);
  RunConfig config;
  std::string domain_file;
  std::string out_path;
  std::string format = "csv";
  std::string from;
  std::string to;
  double lambda_max = 0.0;
  double beta = 0.0;
  double hardy_c = 2.0;

  struct Flags {
    bool domain = false, resolution = false, eigs = false, lambda = false, beta = false,
         epsilon = false, hardy = false, samples = false, seed = false, n_beta = false;
  };
  struct Command {
    std::string name;
    std::string about;
    Flags flags;
  };
  const std::vector<Command> commands = {
      {"dist", "CC distance between two points", {}},
      {"ball-vol", "unit ball volume by quadrature and Monte Carlo",
       {.resolution = true, .samples = true, .seed = true}},
      {"inradius", "in-radius of a domain", {.domain = true, .resolution = true}},
      {"tube", "inner collar volumes against the tube lower bound",
       {.domain = true, .resolution = true, .beta = true, .n_beta = true}},
      {"sigma", "inf of collar volume / width", {.domain = true, .resolution = true, .n_beta = true}},
      {"eigen", "lowest Dirichlet eigenvalues", {.domain = true, .resolution = true, .eigs = true}},
      {"verify", "Riesz means against the eigenvalue bounds",
       {.domain = true, .resolution = true, .eigs = true, .lambda = true, .hardy = true, .n_beta = true}},
      {"hardy", "Hardy test quotient on a CC ball", {.domain = true, .resolution = true, .epsilon = true}},
  };
  std::vector<CLI::Option*> set_flags;
  for (const auto& [name, about, f] : commands) {
    CLI::App* sub = app.add_subcommand(name, about);
    if (name == "dist") {
      sub->add_option("--from", from, "start point x1,x2,x3");
      sub->add_option("--to", to, "end point x1,x2,x3");
    }
    if (f.domain) sub->add_option("--domain-file", domain_file, "domain JSON file");
    if (f.resolution) sub->add_option("--resolution", config.resolution, "cells per axis / panels");
    if (f.eigs) sub->add_option("--num-eigs", config.num_eigs, "number of eigenvalues");
    if (f.lambda) {
      set_flags.push_back(sub->add_option("--lambda-max", lambda_max, "top of the lambda grid"));
      sub->add_option("--num-lambda", config.num_lambda, "points on the lambda grid");
      sub->add_option("--slack", config.slack, "relative discretization slack");
    }
    if (f.beta) set_flags.push_back(sub->add_option("--beta", beta, "collar width"));
    if (f.n_beta) sub->add_option("--n-beta", config.n_beta, "points on the sigma beta grid");
    if (f.epsilon) sub->add_option("--epsilon", config.epsilon, "Hardy test exponent offset");
    if (f.hardy) set_flags.push_back(sub->add_option("--hardy-c", hardy_c, "Hardy constant c >= 2"));
    if (f.samples) sub->add_option("--samples", config.samples, "Monte Carlo samples");
    if (f.seed) sub->add_option("--seed", config.seed, "random seed");
    sub->add_option("--out", out_path, "report file");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--threads", config.threads, "worker threads (0 = all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  for (CLI::App* sub : app.get_subcommands()) config.command = sub->get_name();
  try {
    config.format = parse_format(format);
    if (!domain_file.empty()) config.domain_file = domain_file;
    if (!out_path.empty()) config.out = out_path;
    if (!from.empty()) config.from = parse_point(from);
    if (!to.empty()) config.to = parse_point(to);
    for (const CLI::Option* opt : set_flags) {
      if (opt->count() == 0) continue;
      if (opt->get_name() == "--lambda-max") config.lambda_max = lambda_max;
      if (opt->get_name() == "--beta") config.beta = beta;
      if (opt->get_name() == "--hardy-c") config.hardy_c = hardy_c;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return run(config, out, err);
}

}  // namespace heisenbound::cli
