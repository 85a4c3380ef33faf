#include "heisenbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "heisenbound/errors.hpp"
#include "heisenbound/parallel.hpp"

namespace heisenbound {

namespace {

void require_nonnegative(double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument(fmt::format("lambda={} must be >= 0", lambda));
}

void require_hardy(double c) {
  if (!(c >= 2.0) || !std::isfinite(c)) {
    throw InvalidArgument(fmt::format("hardy_c={} must be >= 2", c));
  }
}

}  // namespace

void BoundParams::validate() const {
  if (!(volume > 0.0)) throw InvalidArgument(fmt::format("volume={} must be positive", volume));
  if (!(in_radius >= 0.0)) {
    throw InvalidArgument(fmt::format("in_radius={} must be non-negative", in_radius));
  }
  if (!(unit_ball_volume > 0.0)) {
    throw InvalidArgument(fmt::format("unit_ball_volume={} must be positive", unit_ball_volume));
  }
  if (!(sigma >= 0.0)) throw InvalidArgument(fmt::format("sigma={} must be non-negative", sigma));
  require_hardy(hardy_c);
}

BoundParams make_params(const DomainSpec& spec, const DomainMetrics& metrics, double hardy_c) {
  BoundParams p;
  p.volume = spec.exact_volume();
  p.in_radius = metrics.in_radius;
  p.unit_ball_volume = metrics.unit_ball_volume;
  p.sigma = metrics.sigma;
  p.hardy_c = hardy_c;
  p.validate();
  return p;
}

double riesz_mean(std::span<const double> eigenvalues, double lambda) {
  if (eigenvalues.empty() || lambda > eigenvalues.back()) {
    const double top = eigenvalues.empty() ? 0.0 : eigenvalues.back();
    throw CoverageError(
        fmt::format("lambda={} exceeds the largest computed eigenvalue {}", lambda, top), lambda,
        top);
  }
  double sum = 0.0;
  for (const double ev : eigenvalues) {
    if (ev >= lambda) break;
    sum += lambda - ev;
  }
  return sum;
}

double riesz_mean(const Spectrum& spectrum, double lambda) {
  return riesz_mean(std::span<const double>(spectrum.eigenvalues), lambda);
}

double hl_bound(const BoundParams& params, double lambda) {
  require_nonnegative(lambda);
  return params.volume * lambda * lambda * lambda / 96.0;
}

double melas_correction(const BoundParams& params, double lambda) {
  require_nonnegative(lambda);
  const double r3 = params.in_radius * params.in_radius * params.in_radius;
  return params.unit_ball_volume * params.unit_ball_volume * r3 * r3 * lambda * lambda /
         (3.0 * 512.0 * params.volume);
}

double melas_bound(const BoundParams& params, double lambda) {
  return std::max(0.0, hl_bound(params, lambda) - melas_correction(params, lambda));
}

double melas_threshold(const BoundParams& params) {
  const double r3 = params.in_radius * params.in_radius * params.in_radius;
  return params.unit_ball_volume * params.unit_ball_volume * r3 * r3 /
         (16.0 * params.volume * params.volume);
}

double liyau_sum_bound(const BoundParams& params, int n) {
  if (n < 1) throw InvalidArgument(fmt::format("n={} must be >= 1", n));
  const double r3 = params.in_radius * params.in_radius * params.in_radius;
  const double b = params.unit_ball_volume;
  const double nn = n;
  return 8.0 * std::sqrt(2.0) / 3.0 / std::sqrt(params.volume) * nn * std::sqrt(nn) +
         b * b * r3 * r3 / (48.0 * params.volume * params.volume) * nn;
}

double improved_exponent(double hardy_c) {
  require_hardy(hardy_c);
  return 2.0 + 1.0 / (hardy_c + 2.0);
}

double improved_coefficient(const BoundParams& params) {
  const double c = params.hardy_c;
  require_hardy(c);
  const double a = (2.0 * c + 2.0) / (c + 2.0);
  return (1.0 + 2.0 / c) / 96.0 * std::pow(params.sigma, a) * std::pow(4.0 * c + 4.0, -a) *
         std::pow(params.volume, -1.0 / (1.0 + 2.0 / c));
}

double improved_correction(const BoundParams& params, double lambda) {
  require_nonnegative(lambda);
  return improved_coefficient(params) * std::pow(lambda, improved_exponent(params.hardy_c));
}

double improved_bound(const BoundParams& params, double lambda) {
  return std::max(0.0, hl_bound(params, lambda) - improved_correction(params, lambda));
}

double legendre_transform(std::span<const double> x, std::span<const double> f, double p) {
  if (x.size() != f.size() || x.size() < 2) {
    throw InvalidArgument("legendre_transform needs at least 2 samples of matching size");
  }
  double scale = 0.0;
  for (const double v : f) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * (scale + 1.0);
  double prev_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw InvalidArgument("legendre_transform: grid must be ascending");
    const double slope = (f[i] - f[i - 1]) / (x[i] - x[i - 1]);
    if (f[i] < f[i - 1] - tol) {
      throw InvalidArgument("legendre_transform: samples must be non-decreasing");
    }
    if (slope < prev_slope - tol / (x[i] - x[i - 1])) {
      throw InvalidArgument(fmt::format("legendre_transform: samples are not convex at x={}", x[i - 1]));
    }
    prev_slope = slope;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) best = std::max(best, p * x[i] - f[i]);
  return best;
}

std::vector<double> double_legendre(std::span<const double> x, std::span<const double> f) {
  std::vector<double> slopes;
  for (std::size_t i = 1; i < x.size(); ++i) slopes.push_back((f[i] - f[i - 1]) / (x[i] - x[i - 1]));
  std::vector<double> conj;
  for (const double p : slopes) conj.push_back(legendre_transform(x, f, p));
  std::vector<double> out(x.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < slopes.size(); ++j) {
      out[i] = std::max(out[i], slopes[j] * x[i] - conj[j]);
    }
  }
  return out;
}

HardyQuotient hardy_quotient(const DomainSpec& spec, double epsilon, int resolution) {
  if (spec.kind != DomainKind::cc_ball) {
    throw InvalidArgument("hardy_quotient needs a cc_ball domain");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InvalidArgument(fmt::format("epsilon={} must lie in (0, 1]", epsilon));
  }
  const DistanceField field = distance_field(spec, resolution);
  const double step = 1e-4 * spec.size();
  const double power = 2.0 * epsilon - 1.0;
  const double lead = (0.5 + epsilon) * (0.5 + epsilon);

  std::vector<double> form(field.distance.size(), 0.0);
  std::vector<double> weight(field.distance.size(), 0.0);
  parallel_for(field.distance.size(), [&](std::size_t i) {
    const double d = field.distance[i];
    if (!field.grid.mask[i] || !(d > 0.0)) return;
    // |X g|^2 = (1/2 + eps)^2 d^{2 eps - 1} |X d|^2 and g^2 / d^2 = d^{2 eps - 1}.
    const auto g = horizontal_gradient(spec, field.grid.cell_center(i), std::min(step, 0.5 * d));
    const double w = std::pow(d, power);
    weight[i] = w;
    form[i] = lead * w * (g[0] * g[0] + g[1] * g[1]);
  });

  HardyQuotient out;
  for (std::size_t i = 0; i < form.size(); ++i) {
    out.form += form[i];
    out.weighted_norm += weight[i];
  }
  out.form *= field.grid.cell_volume();
  out.weighted_norm *= field.grid.cell_volume();
  out.quotient = out.form / out.weighted_norm;
  out.hardy_estimate = out.weighted_norm / out.form;
  return out;
}

BoundReport verify(const Spectrum& spectrum, const BoundParams& params,
                   std::span<const double> lambda_grid, const VerifyOptions& options) {
  params.validate();
  if (lambda_grid.empty()) throw InvalidArgument("verify: lambda grid is empty");
  if (!(options.slack >= 0.0)) throw InvalidArgument("verify: slack must be non-negative");
  BoundReport report;
  report.valid_up_to = spectrum.max_eigenvalue();
  report.slack = options.slack;
  double prev = -std::numeric_limits<double>::infinity();
  for (const double lambda : lambda_grid) {
    require_nonnegative(lambda);
    if (!(lambda > prev)) throw InvalidArgument("verify: lambda grid must be ascending");
    prev = lambda;
    const double riesz = riesz_mean(spectrum, lambda);
    const double hl = hl_bound(params, lambda);
    const double melas = melas_bound(params, lambda);
    report.lambda_grid.push_back(lambda);
    report.riesz.push_back(riesz);
    report.hl.push_back(hl);
    report.melas.push_back(melas);
    report.margin_hl.push_back(hl - riesz);
    report.margin_melas.push_back(melas - riesz);
    const double allowed = -options.slack * hl;
    int bad = (hl - riesz < allowed) || (melas - riesz < allowed);
    if (options.include_improved) {
      const double improved = improved_bound(params, lambda);
      report.improved.push_back(improved);
      report.margin_improved.push_back(improved - riesz);
      bad = bad || (improved - riesz < allowed);
    }
    report.violations += bad;
  }
  return report;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw InvalidArgument(fmt::format("linspace: n={} must be positive", n));
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  if (n > 1) out.back() = hi;
  return out;
}

}  // namespace heisenbound
