#include "heisenbound/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "heisenbound/errors.hpp"
#include "heisenbound/parallel.hpp"
#include "heisenbound/random.hpp"
#include "nelder_mead.hpp"

namespace heisenbound {

namespace {

bool finite3(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

bool finite_point(const GroupPoint& p) {
  return std::isfinite(p.x1) && std::isfinite(p.x2) && std::isfinite(p.x3);
}

void require_samples(int n_boundary_samples) {
  if (n_boundary_samples < kMinBoundarySamples) {
    throw InvalidArgument(fmt::format("n_boundary_samples={} is below the minimum of {}",
                                      n_boundary_samples, kMinBoundarySamples));
  }
}

// Distance to the half-space {y3 >= x3 + gap} (gap > 0) from a point whose
// horizontal part has length s. With v = y' - x', the left-translated target is
// (v, gap + (x1 v2 - x2 v1)/2), and for |v| = rho the best direction gives
// height max(0, gap - s rho / 2). Only values below `cap` matter.
double height_gap_distance(double gap, double s, double cap, int n_grid) {
  // d0(rho, z) >= max(rho, sqrt(2 pi z)): cheap rejection first.
  const double root = 0.5 * (-kPi * s + std::sqrt(kPi * kPi * s * s + 8.0 * kPi * gap));
  if (root >= cap) return cap;

  const double flat = s > 0.0 ? 2.0 * gap / s : std::numeric_limits<double>::infinity();
  const double hi = std::min(flat, cap);
  auto f = [&](double rho) {
    return cc_distance_origin({rho, 0.0, std::max(0.0, gap - 0.5 * s * rho)});
  };
  int best = 0;
  double best_value = f(0.0);
  for (int i = 1; i <= n_grid; ++i) {
    const double value = f(hi * i / n_grid);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  const double lo_b = hi * std::max(0, best - 1) / n_grid;
  const double hi_b = hi * std::min(n_grid, best + 1) / n_grid;
  const auto refined = boost::math::tools::brent_find_minima(f, lo_b, hi_b, 50);
  return std::min({best_value, refined.second, flat, cap});
}

double box_distance(const DomainSpec& spec, const GroupPoint& p, int n_samples) {
  double d = std::min({p.x1 - spec.min[0], spec.max[0] - p.x1, p.x2 - spec.min[1],
                       spec.max[1] - p.x2});
  const double s = std::hypot(p.x1, p.x2);
  const int n_grid = std::max(16, n_samples / 8);
  d = height_gap_distance(spec.max[2] - p.x3, s, d, n_grid);
  d = height_gap_distance(p.x3 - spec.min[2], s, d, n_grid);
  return d;
}

// Minimizes distance(params) over a sampled parameter grid and polishes the
// two best samples with Nelder-Mead.
template <class Objective>
double sampled_minimum(Objective objective, int n_a, int n_b, detail::Point2 lo,
                       detail::Point2 step) {
  struct Sample {
    double value;
    detail::Point2 x;
  };
  Sample first{std::numeric_limits<double>::infinity(), {}};
  Sample second = first;
  for (int i = 0; i < n_a; ++i) {
    for (int j = 0; j < n_b; ++j) {
      const detail::Point2 x{lo[0] + (i + 0.5) * step[0], lo[1] + j * step[1]};
      const double value = objective(x);
      if (value < first.value) {
        second = first;
        first = {value, x};
      } else if (value < second.value) {
        second = {value, x};
      }
    }
  }
  double best = first.value;
  for (const Sample& s : {first, second}) {
    if (!std::isfinite(s.value)) continue;
    const auto result = detail::nelder_mead(
        [&](const detail::Point2& x) { return objective(x); }, s.x,
        {0.5 * step[0], 0.5 * step[1]}, 1e-13, 300);
    best = std::min(best, result.value);
  }
  return best;
}

double euclidean_ball_distance(const DomainSpec& spec, const GroupPoint& p, int n_samples) {
  const GroupPoint c = spec.center;
  const double r = spec.radius;
  auto objective = [&](const detail::Point2& a) {
    const double st = std::sin(a[0]);
    const GroupPoint y{c.x1 + r * st * std::cos(a[1]), c.x2 + r * st * std::sin(a[1]),
                       c.x3 + r * std::cos(a[0])};
    return cc_distance(p, y);
  };
  const int n_polar = std::max(8, static_cast<int>(std::lround(std::sqrt(0.5 * n_samples))));
  const int n_azimuth = std::max(8, n_samples / n_polar);
  return sampled_minimum(objective, n_polar, n_azimuth, {0.0, 0.0},
                         {kPi / n_polar, kTwoPi / n_azimuth});
}

double cc_ball_distance(const DomainSpec& spec, const GroupPoint& p, int n_samples) {
  const double r = spec.radius;
  const GroupPoint local = group_multiply(group_inverse(spec.center), p);
  const GeodesicCoord g = geodesic_coordinates(local);
  if (g.t >= r) return 0.0;
  const double lower = r - g.t;
  // The center geodesic through p stays minimizing up to the sphere.
  if (std::abs(g.k) * r <= kTwoPi) return lower;

  // Otherwise it hits the cut locus first and the nearest boundary point has to
  // be searched on the sphere Phi(r, w / r, theta), |w| <= 2 pi.
  auto objective = [&](const detail::Point2& a) {
    const double w = std::clamp(a[0], -kTwoPi, kTwoPi);
    const GroupPoint y = geodesic_point({r, w / r, a[1]});
    return cc_distance(local, y);
  };
  const int n_w = std::max(8, static_cast<int>(std::lround(std::sqrt(2.0 * n_samples))));
  const int n_theta = std::max(8, n_samples / n_w);
  const double found =
      sampled_minimum(objective, n_w, n_theta, {-kTwoPi, 0.0}, {2.0 * kTwoPi / n_w, kTwoPi / n_theta});
  return std::max(lower, found);
}

}  // namespace

const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::box:
      return "box";
    case DomainKind::euclidean_ball:
      return "euclidean_ball";
    case DomainKind::cc_ball:
      return "cc_ball";
  }
  return "unknown";
}

DomainSpec DomainSpec::box(const Vec3& lo, const Vec3& hi) {
  DomainSpec spec;
  spec.kind = DomainKind::box;
  spec.min = lo;
  spec.max = hi;
  spec.validate();
  return spec;
}

DomainSpec DomainSpec::euclidean_ball(const GroupPoint& c, double r) {
  DomainSpec spec;
  spec.kind = DomainKind::euclidean_ball;
  spec.center = c;
  spec.radius = r;
  spec.validate();
  return spec;
}

DomainSpec DomainSpec::cc_ball(const GroupPoint& c, double r) {
  DomainSpec spec;
  spec.kind = DomainKind::cc_ball;
  spec.center = c;
  spec.radius = r;
  spec.validate();
  return spec;
}

void DomainSpec::validate() const {
  if (kind == DomainKind::box) {
    if (!finite3(min)) throw InvalidArgument("box: \"min\" must be finite");
    if (!finite3(max)) throw InvalidArgument("box: \"max\" must be finite");
    for (int i = 0; i < 3; ++i) {
      if (!(min[i] < max[i])) {
        throw InvalidArgument(
            fmt::format("box: \"min\"[{0}]={1} must be below \"max\"[{0}]={2}", i, min[i], max[i]));
      }
    }
    return;
  }
  if (!finite_point(center)) {
    throw InvalidArgument(fmt::format("{}: \"center\" must be finite", to_string(kind)));
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument(
        fmt::format("{}: \"radius\"={} must be positive and finite", to_string(kind), radius));
  }
}

bool DomainSpec::contains(const GroupPoint& p) const {
  switch (kind) {
    case DomainKind::box:
      return p.x1 > min[0] && p.x1 < max[0] && p.x2 > min[1] && p.x2 < max[1] && p.x3 > min[2] &&
             p.x3 < max[2];
    case DomainKind::euclidean_ball: {
      const double a = p.x1 - center.x1;
      const double b = p.x2 - center.x2;
      const double c = p.x3 - center.x3;
      return a * a + b * b + c * c < radius * radius;
    }
    case DomainKind::cc_ball:
      return cc_distance(center, p) < radius;
  }
  return false;
}

std::array<Vec3, 2> DomainSpec::bounding_box() const {
  switch (kind) {
    case DomainKind::box:
      return {min, max};
    case DomainKind::euclidean_ball:
      return {Vec3{center.x1 - radius, center.x2 - radius, center.x3 - radius},
              Vec3{center.x1 + radius, center.x2 + radius, center.x3 + radius}};
    case DomainKind::cc_ball: {
      // c * y with |y'| <= r, |y3| <= r^2/(2 pi) shifts x3 by at most |c'| r / 2.
      const double h = ball_height_bound(radius) + 0.5 * std::hypot(center.x1, center.x2) * radius;
      return {Vec3{center.x1 - radius, center.x2 - radius, center.x3 - h},
              Vec3{center.x1 + radius, center.x2 + radius, center.x3 + h}};
    }
  }
  return {min, max};
}

double DomainSpec::exact_volume() const {
  switch (kind) {
    case DomainKind::box:
      return (max[0] - min[0]) * (max[1] - min[1]) * (max[2] - min[2]);
    case DomainKind::euclidean_ball:
      return 4.0 / 3.0 * kPi * radius * radius * radius;
    case DomainKind::cc_ball: {
      const double r2 = radius * radius;
      return r2 * r2 * unit_ball_volume_reference();
    }
  }
  return 0.0;
}

double DomainSpec::size() const {
  if (kind == DomainKind::box) {
    return std::max({max[0] - min[0], max[1] - min[1], max[2] - min[2]});
  }
  return radius;
}

DomainSpec dilate(double r, const DomainSpec& spec) {
  if (!(r > 0.0)) throw InvalidArgument(fmt::format("dilation factor r={} must be positive", r));
  switch (spec.kind) {
    case DomainKind::box:
      return DomainSpec::box({r * spec.min[0], r * spec.min[1], r * r * spec.min[2]},
                             {r * spec.max[0], r * spec.max[1], r * r * spec.max[2]});
    case DomainKind::cc_ball:
      return DomainSpec::cc_ball(dilate(r, spec.center), r * spec.radius);
    case DomainKind::euclidean_ball:
      break;
  }
  throw InvalidArgument("euclidean_ball is not mapped to a ball by the Heisenberg dilation");
}

std::array<int, 3> VoxelDomain::cell(std::size_t index) const {
  const int k = static_cast<int>(index % dims[2]);
  index /= dims[2];
  const int j = static_cast<int>(index % dims[1]);
  return {static_cast<int>(index / dims[1]), j, k};
}

GroupPoint VoxelDomain::cell_center(int i, int j, int k) const {
  return {origin[0] + (i + 0.5) * spacing[0], origin[1] + (j + 0.5) * spacing[1],
          origin[2] + (k + 0.5) * spacing[2]};
}

GroupPoint VoxelDomain::cell_center(std::size_t index) const {
  const auto c = cell(index);
  return cell_center(c[0], c[1], c[2]);
}

bool VoxelDomain::occupied(int i, int j, int k) const {
  if (i < 0 || j < 0 || k < 0 || i >= dims[0] || j >= dims[1] || k >= dims[2]) return false;
  return mask[index(i, j, k)] != 0;
}

std::size_t VoxelDomain::occupied_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

VoxelDomain voxelize(const DomainSpec& spec, int resolution) {
  spec.validate();
  if (resolution < kMinResolution) {
    throw InvalidArgument(
        fmt::format("resolution={} is below the minimum of {}", resolution, kMinResolution));
  }
  const auto [lo, hi] = spec.bounding_box();
  VoxelDomain vox;
  vox.origin = lo;
  for (int a = 0; a < 3; ++a) {
    vox.dims[a] = resolution;
    vox.spacing[a] = (hi[a] - lo[a]) / resolution;
  }
  vox.mask.assign(static_cast<std::size_t>(resolution) * resolution * resolution, 0);
  parallel_for(vox.mask.size(), [&](std::size_t i) {
    vox.mask[i] = spec.contains(vox.cell_center(i)) ? 1 : 0;
  });
  return vox;
}

double boundary_distance(const DomainSpec& spec, const GroupPoint& p, int n_boundary_samples) {
  require_samples(n_boundary_samples);
  if (!finite_point(p)) throw InvalidArgument("boundary_distance requires a finite point");
  if (!spec.contains(p)) return 0.0;
  switch (spec.kind) {
    case DomainKind::box:
      return box_distance(spec, p, n_boundary_samples);
    case DomainKind::euclidean_ball:
      return euclidean_ball_distance(spec, p, n_boundary_samples);
    case DomainKind::cc_ball:
      return cc_ball_distance(spec, p, n_boundary_samples);
  }
  return 0.0;
}

double DistanceField::max() const {
  return distance.empty() ? 0.0 : *std::max_element(distance.begin(), distance.end());
}

DistanceField distance_field(const DomainSpec& spec, int resolution, int n_boundary_samples) {
  require_samples(n_boundary_samples);
  DistanceField field{voxelize(spec, resolution), {}};
  field.distance.assign(field.grid.cell_count(), 0.0);
  parallel_for(field.grid.cell_count(), [&](std::size_t i) {
    if (field.grid.mask[i]) {
      field.distance[i] = boundary_distance(spec, field.grid.cell_center(i), n_boundary_samples);
    }
  });
  return field;
}

double in_radius(const DomainSpec& spec, const DistanceField& field, int n_boundary_samples) {
  const auto best = std::max_element(field.distance.begin(), field.distance.end());
  if (best == field.distance.end() || !(*best > 0.0)) {
    throw InvalidArgument("in_radius: the voxel grid has no interior cell");
  }
  GroupPoint x = field.grid.cell_center(static_cast<std::size_t>(best - field.distance.begin()));
  double value = *best;
  // d is a min of several distances, so its maximizer is typically a ridge
  // point; the pattern includes diagonal moves to be able to climb along it.
  Vec3 step = field.grid.spacing;
  for (int iter = 0; iter < 500 && step[0] > 1e-7 * field.grid.spacing[0]; ++iter) {
    bool moved = false;
    for (int dir = 0; dir < 27 && !moved; ++dir) {
      if (dir == 13) continue;
      const GroupPoint y{x.x1 + (dir / 9 - 1) * step[0], x.x2 + (dir / 3 % 3 - 1) * step[1],
                         x.x3 + (dir % 3 - 1) * step[2]};
      const double dy = boundary_distance(spec, y, n_boundary_samples);
      if (dy > value) {
        x = y;
        value = dy;
        moved = true;
      }
    }
    if (!moved) {
      for (double& s : step) s *= 0.5;
    }
  }
  return value;
}

double in_radius(const DomainSpec& spec, int resolution) {
  return in_radius(spec, distance_field(spec, resolution));
}

double tube_volume(const DistanceField& field, double beta, double in_radius) {
  if (!(beta > 0.0) || beta > in_radius * (1.0 + 1e-12)) {
    throw InvalidArgument(
        fmt::format("beta={} must lie in (0, in_radius={}]", beta, in_radius));
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < field.distance.size(); ++i) {
    if (field.grid.mask[i] && field.distance[i] < beta) ++count;
  }
  return static_cast<double>(count) * field.grid.cell_volume();
}

double tube_volume(const DomainSpec& spec, double beta, int resolution) {
  const DistanceField field = distance_field(spec, resolution);
  return tube_volume(field, beta, in_radius(spec, field));
}

std::vector<double> sigma_beta_grid(double in_radius, int n_beta) {
  if (n_beta < 8) throw InvalidArgument(fmt::format("n_beta={} is below the minimum of 8", n_beta));
  std::vector<double> betas(static_cast<std::size_t>(n_beta));
  double beta = in_radius;
  for (double& b : betas) {
    b = beta;
    beta /= 1.15;
  }
  return betas;
}

double sigma(const DistanceField& field, double in_radius, int n_beta) {
  double best = std::numeric_limits<double>::infinity();
  for (const double beta : sigma_beta_grid(in_radius, n_beta)) {
    best = std::min(best, tube_volume(field, beta, in_radius) / beta);
  }
  return best;
}

double sigma(const DomainSpec& spec, int resolution, int n_beta) {
  const DistanceField field = distance_field(spec, resolution);
  return sigma(field, in_radius(spec, field), n_beta);
}

DomainMetrics domain_metrics(const DomainSpec& spec, int resolution, int n_beta) {
  const DistanceField field = distance_field(spec, resolution);
  DomainMetrics m;
  m.volume = spec.exact_volume();
  m.in_radius = in_radius(spec, field);
  m.sigma = sigma(field, m.in_radius, n_beta);
  m.unit_ball_volume = unit_ball_volume_reference();
  return m;
}

std::array<double, 2> horizontal_gradient(const DomainSpec& spec, const GroupPoint& p, double h,
                                          int n_boundary_samples) {
  auto d = [&](double a, double b) {
    return boundary_distance(spec, group_multiply(p, {a, b, 0.0}), n_boundary_samples);
  };
  return {(d(h, 0.0) - d(-h, 0.0)) / (2.0 * h), (d(0.0, h) - d(0.0, -h)) / (2.0 * h)};
}

EikonalStats eikonal_residual(const DomainSpec& spec, int n_points, double h, std::uint64_t seed) {
  spec.validate();
  if (n_points < 1) throw InvalidArgument(fmt::format("n_points={} must be positive", n_points));
  if (!(h > 0.0)) throw InvalidArgument(fmt::format("step h={} must be positive", h));

  const auto [lo, hi] = spec.bounding_box();
  std::mt19937_64 gen(stream_seed(seed, 0));
  std::vector<GroupPoint> accepted;
  const std::size_t batch = 4 * static_cast<std::size_t>(n_points);
  for (int round = 0; round < 100 && accepted.size() < static_cast<std::size_t>(n_points); ++round) {
    std::vector<GroupPoint> candidates(batch);
    for (auto& c : candidates) {
      c = {uniform(gen, lo[0], hi[0]), uniform(gen, lo[1], hi[1]), uniform(gen, lo[2], hi[2])};
    }
    std::vector<std::uint8_t> keep(batch, 0);
    parallel_for(batch, [&](std::size_t i) {
      const GroupPoint& c = candidates[i];
      if (spec.kind == DomainKind::cc_ball) {
        const GroupPoint local = group_multiply(group_inverse(spec.center), c);
        if (std::hypot(local.x1, local.x2) < 0.05 * spec.radius) return;
      }
      keep[i] = boundary_distance(spec, c) > 3.0 * h ? 1 : 0;
    });
    for (std::size_t i = 0; i < batch && accepted.size() < static_cast<std::size_t>(n_points); ++i) {
      if (keep[i]) accepted.push_back(candidates[i]);
    }
  }
  if (accepted.empty()) throw InvalidArgument("eikonal_residual: no admissible interior points");

  std::vector<double> deviation(accepted.size());
  parallel_for(accepted.size(), [&](std::size_t i) {
    const auto g = horizontal_gradient(spec, accepted[i], h);
    deviation[i] = std::abs(g[0] * g[0] + g[1] * g[1] - 1.0);
  });
  EikonalStats stats;
  stats.count = deviation.size();
  double sum = 0.0;
  for (const double v : deviation) {
    sum += v;
    stats.max = std::max(stats.max, v);
  }
  stats.mean = sum / static_cast<double>(stats.count);
  return stats;
}

}  // namespace heisenbound
