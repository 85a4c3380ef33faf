#include "heisenbound/hgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "heisenbound/errors.hpp"
#include "heisenbound/parallel.hpp"
#include "heisenbound/random.hpp"

namespace heisenbound {

namespace {

// Below this |w| the cancelling combinations are summed as power series.
constexpr double kSeriesCutoff = 1.0;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// (w - sin w) / w^2, odd in w.
double excess_over_square(double w) {
  if (std::abs(w) < kSeriesCutoff) {
    // w/6 - w^3/120 + w^5/5040 - ...
    const double w2 = w * w;
    double term = w / 6.0;
    double sum = term;
    for (int n = 1; n < 10; ++n) {
      term *= -w2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
      sum += term;
    }
    return sum;
  }
  return (w - std::sin(w)) / (w * w);
}

// x - sin x, odd in x.
double excess(double x) {
  if (std::abs(x) < kSeriesCutoff) return excess_over_square(x) * x * x;
  return x - std::sin(x);
}

// (2 - w sin w - 2 cos w) / w^4, even in w, for |w| <= 2 pi.
double jacobian_profile(double w) {
  const double a = std::abs(w);
  if (a < kSeriesCutoff) {
    // sum_{n>=2} (-1)^{n+1} (2 - 2n) w^{2n-4} / (2n)!
    const double w2 = a * a;
    double sum = 0.0;
    double power = 1.0;
    double factorial = 24.0;  // (2n)! at n = 2
    for (int n = 2; n < 14; ++n) {
      const double sign = (n % 2 == 0) ? -1.0 : 1.0;
      sum += sign * (2.0 - 2.0 * n) * power / factorial;
      power *= w2;
      factorial *= (2.0 * n + 1.0) * (2.0 * n + 2.0);
    }
    return sum;
  }
  double f;
  if (a < kPi) {
    const double s = std::sin(0.5 * a);
    f = 4.0 * s * s - a * std::sin(a);
  } else {
    // u = 2 pi - a keeps the zero at a = 2 pi exact.
    const double u = kTwoPi - a;
    const double s = std::sin(0.5 * u);
    f = 4.0 * s * s + (kTwoPi - u) * std::sin(u);
  }
  return f / (a * a * a * a);
}

void require_valid(const GeodesicCoord& g) {
  if (!std::isfinite(g.t) || !std::isfinite(g.k) || !std::isfinite(g.theta)) {
    throw InvalidArgument("geodesic coordinate must be finite");
  }
  if (g.t < 0.0) throw InvalidArgument(fmt::format("geodesic arc length t={} is negative", g.t));
  if (std::abs(g.k) * g.t > kTwoPi * (1.0 + 1e-12)) {
    throw InvalidArgument(
        fmt::format("geodesic coordinate t={}, k={} is past the cut time 2pi/|k|", g.t, g.k));
  }
}

// Height ratio as a function of s = w/2 in (0, pi/2] together with d/ds.
struct RatioEval {
  double value;
  double slope;
};

RatioEval ratio_lower(double s) {
  const double sn = std::sin(s);
  const double sn2 = sn * sn;
  const double num = excess(2.0 * s);
  return {num / (8.0 * sn2), 0.5 - num * std::sin(2.0 * s) / (8.0 * sn2 * sn2)};
}

// Height ratio as a function of u = pi - w/2 in (0, pi/2]; decreasing in u.
RatioEval ratio_upper(double u) {
  const double sn = std::sin(u);
  const double sn2 = sn * sn;
  const double num = kTwoPi - 2.0 * u + std::sin(2.0 * u);
  return {num / (8.0 * sn2), -0.5 - num * std::sin(2.0 * u) / (8.0 * sn2 * sn2)};
}

// Solves ratio(x) = target on (0, pi/2] for a monotone ratio. Newton steps are
// accepted only inside the current bisection bracket.
template <class Eval>
double solve_monotone(Eval eval, double target, double guess, bool increasing) {
  double lo = 0.0;
  double hi = 0.5 * kPi;
  double x = std::clamp(guess, 1e-300, hi);
  double last_residual = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 400; ++iter) {
    const RatioEval e = eval(x);
    const double residual = e.value - target;
    last_residual = residual;
    if (residual == 0.0) return x;
    const bool above = increasing ? residual > 0.0 : residual < 0.0;
    if (above) {
      hi = x;
    } else {
      lo = x;
    }

    double next = x - residual / e.slope;
    if (!std::isfinite(next) || next <= lo || next >= hi) {
      next = (lo > 0.0 && hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
      if (lo == 0.0 && hi > 1e-300) next = std::min(next, 0.25 * hi);
    }
    if (std::abs(next - x) <= 4e-16 * std::abs(x) || hi - lo <= 4e-16 * hi) {
      return next;
    }
    x = next;
  }
  throw NumericalFailure(
      fmt::format("geodesic root finder did not converge (target ratio {})", target),
      std::abs(last_residual));
}

void ensure_ratio_monotone() {
  static const bool ok = height_ratio_is_monotone(10000);
  if (!ok) {
    throw NumericalFailure("height ratio failed its monotonicity check", 0.0);
  }
}

}  // namespace

GroupPoint group_multiply(const GroupPoint& a, const GroupPoint& b) noexcept {
  return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3 - 0.5 * (a.x1 * b.x2 - a.x2 * b.x1)};
}

GroupPoint group_inverse(const GroupPoint& a) noexcept { return {-a.x1, -a.x2, -a.x3}; }

GroupPoint dilate(double r, const GroupPoint& a) {
  if (!(r > 0.0)) throw InvalidArgument(fmt::format("dilation factor r={} must be positive", r));
  return {r * a.x1, r * a.x2, r * r * a.x3};
}

GroupPoint geodesic_point(const GeodesicCoord& g) {
  require_valid(g);
  const double w = g.k * g.t;
  const double half_sin = std::sin(0.5 * w);
  const double bend = half_sin * sinc(0.5 * w);  // (1 - cos w) / w
  const double straight = sinc(w);               // sin w / w
  const double c = std::cos(g.theta);
  const double s = std::sin(g.theta);
  return {g.t * (c * bend + s * straight), g.t * (c * straight - s * bend),
          0.5 * g.t * g.t * excess_over_square(w)};
}

double geodesic_jacobian(const GeodesicCoord& g) {
  require_valid(g);
  const double t2 = g.t * g.t;
  return -t2 * t2 * jacobian_profile(g.k * g.t);
}

double height_ratio(double w) {
  const double a = std::abs(w);
  if (a == 0.0) return 0.0;
  if (a <= kPi) return ratio_lower(0.5 * a).value;
  return ratio_upper(kPi - 0.5 * a).value;
}

bool height_ratio_is_monotone(int n) {
  double prev = 0.0;
  for (int i = 1; i < n; ++i) {
    const double value = height_ratio(kTwoPi * i / n);
    if (!(value > prev)) return false;
    prev = value;
  }
  return true;
}

GeodesicCoord geodesic_coordinates(const GroupPoint& p) {
  if (!std::isfinite(p.x1) || !std::isfinite(p.x2) || !std::isfinite(p.x3)) {
    throw InvalidArgument("cc distance requires finite coordinates");
  }
  const double r = std::hypot(p.x1, p.x2);
  const double z = p.x3;
  if (r == 0.0 && z == 0.0) return {};

  if (r < kAxisTolerance) {
    const double t = 2.0 * std::sqrt(kPi * std::abs(z));
    return {t, std::copysign(kTwoPi / t, z), 0.0};
  }

  double t = r;
  double k = 0.0;
  if (z != 0.0) {
    ensure_ratio_monotone();
    const double target = std::abs(z) / (r * r);
    if (target <= kPi / 8.0) {
      const double s = solve_monotone(ratio_lower, target, 6.0 * target, true);
      t = s * r / std::sin(s);
      k = std::copysign(2.0 * std::sin(s) / r, z);
    } else {
      const double u = solve_monotone(ratio_upper, target, std::sqrt(kPi / (4.0 * target)), false);
      t = (kPi - u) * r / std::sin(u);
      k = std::copysign(2.0 * std::sin(u) / r, z);
    }
  }

  // -x1 + i x2 = e^{i theta} * i t sinc(w/2) e^{i w/2}
  const double w = k * t;
  double theta = std::atan2(p.x2, -p.x1) - 0.5 * kPi - 0.5 * w;
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  if (theta >= kTwoPi) theta = 0.0;
  return {t, k, theta};
}

double cc_distance_origin(const GroupPoint& p) { return geodesic_coordinates(p).t; }

double cc_distance(const GroupPoint& a, const GroupPoint& b) {
  return cc_distance_origin(group_multiply(group_inverse(a), b));
}

namespace {

double ball_volume_rule(int panels) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  // |B_1| = 2 pi * int_0^1 int_{-2pi/t}^{2pi/t} |det| dk dt, and with w = k t
  // |det| dk = t^3 g(w) dw, g even in w.
  double profile = 0.0;
  const double dw = kTwoPi / panels;
  for (int i = 0; i < panels; ++i) {
    profile += Rule::integrate(jacobian_profile, i * dw, (i + 1) * dw);
  }
  double radial = 0.0;
  const double dt = 1.0 / panels;
  for (int i = 0; i < panels; ++i) {
    radial += Rule::integrate([](double t) { return t * t * t; }, i * dt, (i + 1) * dt);
  }
  return kTwoPi * 2.0 * profile * radial;
}

}  // namespace

CCMetrics unit_ball_volume(int quadrature_resolution) {
  if (quadrature_resolution < 16) {
    throw InvalidArgument(
        fmt::format("quadrature_resolution={} is below the minimum of 16", quadrature_resolution));
  }
  const double fine = ball_volume_rule(quadrature_resolution);
  const double coarse = ball_volume_rule(quadrature_resolution / 2);
  return {fine, std::abs(fine - coarse)};
}

double unit_ball_volume_reference() {
  static const double value = unit_ball_volume(256).unit_ball_volume;
  return value;
}

double ball_height_bound(double r) { return r * r / kTwoPi; }

CCMetrics mc_ball_volume(double r, std::int64_t n_samples, std::uint64_t seed) {
  if (!(r > 0.0)) throw InvalidArgument(fmt::format("ball radius r={} must be positive", r));
  if (n_samples < 10000) {
    throw InvalidArgument(fmt::format("n_samples={} is below the minimum of 10000", n_samples));
  }
  constexpr std::int64_t kBlock = 1 << 16;
  const std::int64_t blocks = (n_samples + kBlock - 1) / kBlock;
  const double height = ball_height_bound(r);
  std::vector<std::int64_t> hits(static_cast<std::size_t>(blocks), 0);

  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    std::mt19937_64 gen(stream_seed(seed, b));
    const std::int64_t begin = static_cast<std::int64_t>(b) * kBlock;
    const std::int64_t end = std::min(n_samples, begin + kBlock);
    std::int64_t count = 0;
    for (std::int64_t i = begin; i < end; ++i) {
      const GroupPoint p{uniform(gen, -r, r), uniform(gen, -r, r), uniform(gen, -height, height)};
      if (cc_distance_origin(p) < r) ++count;
    }
    hits[b] = count;
  });

  std::int64_t total = 0;
  for (const auto h : hits) total += h;
  const double box = (2.0 * r) * (2.0 * r) * (2.0 * height);
  const double p = static_cast<double>(total) / static_cast<double>(n_samples);
  return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples))};
}

}  // namespace heisenbound
