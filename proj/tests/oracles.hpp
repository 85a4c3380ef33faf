#pragma once

// Independent reference implementations used only by the tests. None of these
// share code paths with the library beyond the public types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "heisenbound/domains.hpp"
#include "heisenbound/hgeom.hpp"
#include "heisenbound/spectral.hpp"

namespace oracle {

using heisenbound::GeodesicCoord;
using heisenbound::GroupPoint;

// pi * int_0^{2pi} (2 - w sin w - 2 cos w) / w^4 dw, mpmath at 40 digits with
// the interval split at 1 and pi.
inline constexpr double kUnitBallVolume = 0.82587576220917716;

// Hand-rolled generator for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  GroupPoint point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
};

// Distance to the origin from the raw formulas r = 2 sin(w/2)/|k|,
// z = (w - sin w)/(2 k^2): scan w on (0, 2pi) in long double for the height
// ratio, then bisect. t = w r / (2 sin(w/2)).
inline double scan_distance(const GroupPoint& p) {
  using ld = long double;
  const ld pi = 3.141592653589793238462643383279502884L;
  const ld r = std::hypot(static_cast<ld>(p.x1), static_cast<ld>(p.x2));
  const ld z = std::fabs(static_cast<ld>(p.x3));
  if (r == 0) return static_cast<double>(2 * std::sqrt(pi * z));
  if (z == 0) return static_cast<double>(r);
  const ld target = z / (r * r);
  auto ratio = [](ld w) {
    const ld s = std::sin(w / 2);
    return (w - std::sin(w)) / (8 * s * s);
  };
  ld lo = 0;
  ld hi = 2 * pi;
  const int n = 4096;
  for (int i = 1; i < n; ++i) {
    const ld w = 2 * pi * i / n;
    if (ratio(w) > target) {
      hi = w;
      break;
    }
    lo = w;
  }
  for (int i = 0; i < 200; ++i) {
    const ld mid = (lo + hi) / 2;
    if (mid == lo || mid == hi) break;
    (ratio(mid) < target ? lo : hi) = mid;
  }
  const ld w = (lo + hi) / 2;
  if (w < 1e-6L) return static_cast<double>(r);
  return static_cast<double>(w * r / (2 * std::sin(w / 2)));
}

// Integrates the horizontal ODE x' = (sin(k s + theta), cos(k s + theta)),
// x3' = (x2 x1' - x1 x2') / 2 with RK4.
inline GroupPoint integrate_horizontal(const GeodesicCoord& g, int steps = 4000) {
  auto rhs = [&](double s, const std::array<double, 3>& x) {
    const double a = std::sin(g.k * s + g.theta);
    const double b = std::cos(g.k * s + g.theta);
    return std::array<double, 3>{a, b, 0.5 * (x[1] * a - x[0] * b)};
  };
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const double h = g.t / steps;
  for (int i = 0; i < steps; ++i) {
    const double s = i * h;
    auto add = [](std::array<double, 3> a, const std::array<double, 3>& b, double f) {
      for (int j = 0; j < 3; ++j) a[j] += f * b[j];
      return a;
    };
    const auto k1 = rhs(s, x);
    const auto k2 = rhs(s + h / 2, add(x, k1, h / 2));
    const auto k3 = rhs(s + h / 2, add(x, k2, h / 2));
    const auto k4 = rhs(s + h, add(x, k3, h));
    for (int j = 0; j < 3; ++j) x[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  return {x[0], x[1], x[2]};
}

// det of d(x1,x2,x3)/d(t,k,theta) by central differences of the raw arc formula.
inline double numeric_jacobian(const GeodesicCoord& g) {
  auto phi = [](double t, double k, double th) {
    return Eigen::Vector3d((std::cos(th) - std::cos(k * t + th)) / k,
                           (std::sin(k * t + th) - std::sin(th)) / k,
                           (k * t - std::sin(k * t)) / (2 * k * k));
  };
  const double h = 1e-5;
  Eigen::Matrix3d j;
  j.col(0) = (phi(g.t + h, g.k, g.theta) - phi(g.t - h, g.k, g.theta)) / (2 * h);
  j.col(1) = (phi(g.t, g.k + h, g.theta) - phi(g.t, g.k - h, g.theta)) / (2 * h);
  j.col(2) = (phi(g.t, g.k, g.theta + h) - phi(g.t, g.k, g.theta - h)) / (2 * h);
  return j.determinant();
}

// Discrete form value by looping over all rows with explicit zero extension.
inline double form_value(const heisenbound::VoxelDomain& vox, const Eigen::VectorXd& u_occupied) {
  std::vector<double> u(vox.cell_count(), 0.0);
  std::size_t next = 0;
  for (std::size_t i = 0; i < vox.cell_count(); ++i) {
    if (vox.mask[i]) u[i] = u_occupied[static_cast<Eigen::Index>(next++)];
  }
  auto at = [&](int i, int j, int k) { return vox.occupied(i, j, k) ? u[vox.index(i, j, k)] : 0.0; };
  const auto [h1, h2, h3] = vox.spacing;
  double sum = 0.0;
  for (int i = -2; i <= vox.dims[0]; ++i) {
    for (int j = -2; j <= vox.dims[1]; ++j) {
      for (int k = -2; k <= vox.dims[2]; ++k) {
        const double x1 = vox.origin[0] + (i + 0.5) * h1;
        const double x2 = vox.origin[1] + (j + 0.5) * h2;
        const double d1 = (at(i + 1, j, k) - at(i, j, k)) / h1;
        const double d2 = (at(i, j + 1, k) - at(i, j, k)) / h2;
        const double d3 = (at(i, j, k + 1) - at(i, j, k)) / h3;
        const double a = d1 + 0.5 * x2 * d3;
        const double b = d2 - 0.5 * x1 * d3;
        sum += a * a + b * b;
      }
    }
  }
  return sum * h1 * h2 * h3;
}

// Smallest eigenvalues of the operator from a dense symmetric eigensolver.
inline std::vector<double> dense_lowest(const heisenbound::SparseForm& form, int m) {
  const Eigen::MatrixXd a = Eigen::MatrixXd(form.matrix) / form.mass();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  std::vector<double> out;
  for (int i = 0; i < m; ++i) out.push_back(solver.eigenvalues()(i));
  return out;
}

// Minimizes f over the rectangle [a0, a1] x [b0, b1]: an n x n scan, then the
// best `keep` cells are zoomed into by repeated 9 x 9 local scans that halve
// the window. The CC distance to a surface is very anisotropic, so a plain
// scan is far too coarse near the optimum.
template <class F>
double zoom_minimize(F f, double a0, double a1, double b0, double b1, int n, int keep = 6) {
  struct Cell {
    double value, a, b;
  };
  std::vector<Cell> cells;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double a = a0 + (a1 - a0) * i / n;
      const double b = b0 + (b1 - b0) * j / n;
      cells.push_back({f(a, b), a, b});
    }
  }
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(keep), cells.size());
  std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(count), cells.end(),
                    [](const Cell& x, const Cell& y) { return x.value < y.value; });
  double best = cells.front().value;
  for (std::size_t c = 0; c < count; ++c) {
    Cell at = cells[c];
    double wa = (a1 - a0) / n;
    double wb = (b1 - b0) / n;
    for (int level = 0; level < 45; ++level) {
      Cell next = at;
      for (int i = -4; i <= 4; ++i) {
        for (int j = -4; j <= 4; ++j) {
          const double a = std::clamp(at.a + wa * i / 4, a0, a1);
          const double b = std::clamp(at.b + wb * j / 4, b0, b1);
          const double v = f(a, b);
          if (v < next.value) next = {v, a, b};
        }
      }
      at = next;
      wa *= 0.5;
      wb *= 0.5;
    }
    best = std::min(best, at.value);
  }
  return best;
}

// Distance from p to the CC sphere of radius r around c, minimizing over the
// sphere parametrization (raw arc formulas) in (w, theta).
inline double sphere_distance(const GroupPoint& c, double r, const GroupPoint& p, int n, int keep = 6) {
  const double pi = 3.14159265358979323846;
  auto at = [&](double w, double th) {
    GroupPoint y;
    if (std::abs(w) < 1e-9) {
      y = {r * std::sin(th), r * std::cos(th), 0.0};
    } else {
      const double k = w / r;
      y = {(std::cos(th) - std::cos(w + th)) / k, (std::sin(w + th) - std::sin(th)) / k,
           (w - std::sin(w)) / (2 * k * k)};
    }
    return heisenbound::cc_distance(p, heisenbound::group_multiply(c, y));
  };
  return zoom_minimize(at, -2 * pi, 2 * pi, 0.0, 2 * pi, n, keep);
}

// Distance from p to the boundary of a box, minimizing over each face.
inline double box_face_distance(const heisenbound::DomainSpec& box, const GroupPoint& p, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    const int a = (axis + 1) % 3;
    const int b = (axis + 2) % 3;
    for (const double fixed : {box.min[axis], box.max[axis]}) {
      auto at = [&](double u, double v) {
        std::array<double, 3> y{};
        y[axis] = fixed;
        y[a] = u;
        y[b] = v;
        return heisenbound::cc_distance(p, {y[0], y[1], y[2]});
      };
      best = std::min(best, zoom_minimize(at, box.min[a], box.max[a], box.min[b], box.max[b], n));
    }
  }
  return best;
}

// Distance from p to the plane x3 = z. The sphere of radius t around p reaches
// the height p3 + h(t) with h(t) = max_w [t^2 (w - sin w) / (2 w^2) +
// |p'| t sin(w/2) / w] (best launch angle turns the twist term fully toward
// the plane), so the distance is the root of h(t) = |p3 - z|. Scan plus golden
// refinement for the max in w, bisection for t, all in long double.
inline double plane_distance(const GroupPoint& p, double z) {
  using ld = long double;
  const ld pi = 3.141592653589793238462643383279502884L;
  const ld gap = std::fabs(static_cast<ld>(p.x3) - z);
  const ld s = std::hypot(static_cast<ld>(p.x1), static_cast<ld>(p.x2));
  auto lift = [&](ld t, ld w) {
    if (w < 1e-6L) return s * t / 2 + t * t * w / 12;
    return t * t * (w - std::sin(w)) / (2 * w * w) + s * t * std::sin(w / 2) / w;
  };
  auto reach = [&](ld t) {
    const int n = 500;
    int best = 0;
    for (int i = 1; i <= n; ++i) {
      if (lift(t, 2 * pi * i / n) > lift(t, 2 * pi * best / n)) best = i;
    }
    ld lo = 2 * pi * std::max(best - 1, 0) / n;
    ld hi = 2 * pi * std::min(best + 1, n) / n;
    for (int i = 0; i < 90; ++i) {
      const ld m1 = lo + (hi - lo) * 0.381966L;
      const ld m2 = hi - (hi - lo) * 0.381966L;
      (lift(t, m1) < lift(t, m2) ? lo : hi) = lift(t, m1) < lift(t, m2) ? m1 : m2;
    }
    return lift(t, (lo + hi) / 2);
  };
  if (gap == 0) return 0.0;
  ld lo = 0;
  ld hi = 1;
  while (reach(hi) < gap) hi *= 2;
  for (int i = 0; i < 64; ++i) {
    const ld mid = (lo + hi) / 2;
    (reach(mid) < gap ? lo : hi) = mid;
  }
  return static_cast<double>((lo + hi) / 2);
}

// Distance from p (inside) to the complement of a box: the complement is the
// union of six half-spaces, the side ones are reached by straight horizontal
// lines and the top and bottom ones through plane_distance.
inline double box_halfspace_distance(const heisenbound::DomainSpec& box, const GroupPoint& p) {
  double best = std::min({p.x1 - box.min[0], box.max[0] - p.x1, p.x2 - box.min[1], box.max[1] - p.x2});
  best = std::min(best, plane_distance(p, box.min[2]));
  return std::min(best, plane_distance(p, box.max[2]));
}

}  // namespace oracle
