#pragma once

// Carnot-Caratheodory geometry of the first Heisenberg group H = R^3 with
//
//   (x1, x2, x3) * (y1, y2, y3) = (x1 + y1, x2 + y2, x3 + y3 - (x1 y2 - x2 y1) / 2)
//
// and horizontal frame X1 = d1 + (x2/2) d3, X2 = d2 - (x1/2) d3.
//
// Unit-speed geodesics from the origin are parametrized by arc length t,
// curvature k and launch angle theta. With w = k t:
//
//   x1 = (cos(theta) - cos(w + theta)) / k
//   x2 = (sin(w + theta) - sin(theta)) / k
//   x3 = (w - sin(w)) / (2 k^2)
//
// and the arc is minimizing up to t = 2 pi / |k|, where it reaches the x3 axis
// (the cut locus of the origin).

#include <cstdint>

namespace heisenbound {

struct GroupPoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  friend bool operator==(const GroupPoint&, const GroupPoint&) = default;
};

struct GeodesicCoord {
  double t = 0.0;      // arc length, >= 0
  double k = 0.0;      // curvature; t <= 2 pi / |k| when k != 0
  double theta = 0.0;  // launch angle in [0, 2 pi)
};

struct CCMetrics {
  double unit_ball_volume = 0.0;
  double estimate_stderr = 0.0;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Points closer than this to the x3 axis are treated as lying on it.
inline constexpr double kAxisTolerance = 1e-12;

GroupPoint group_multiply(const GroupPoint& a, const GroupPoint& b) noexcept;
GroupPoint group_inverse(const GroupPoint& a) noexcept;

/// Anisotropic dilation (r x1, r x2, r^2 x3). Throws InvalidArgument for r <= 0.
GroupPoint dilate(double r, const GroupPoint& a);

/// Endpoint of the geodesic arc. Throws InvalidArgument when the coordinate
/// violates t >= 0 or t |k| <= 2 pi.
GroupPoint geodesic_point(const GeodesicCoord& g);

/// Determinant of the geodesic coordinate map at (t, k, theta):
/// (k t sin(k t) - 2 (1 - cos(k t))) / k^4, with the k -> 0 limit -t^4/12.
/// Non-positive on 0 <= |k| t <= 2 pi and independent of theta.
double geodesic_jacobian(const GeodesicCoord& g);

/// Ratio x3 / |x'|^2 reached by a geodesic with |k| t = w, i.e.
/// (w - sin w) / (8 sin^2(w/2)). Strictly increasing from 0 to infinity on (0, 2 pi).
double height_ratio(double w);

/// Checks that height_ratio is strictly increasing on an n-point grid of (0, 2 pi).
bool height_ratio_is_monotone(int n = 10000);

/// Inverse of the geodesic coordinate map: a minimizing coordinate with
/// geodesic_point(result) == p. On the x3 axis the angle is not unique and 0 is
/// returned; at the origin all fields are 0. Throws InvalidArgument on
/// non-finite input and NumericalFailure if the root finder stalls.
GeodesicCoord geodesic_coordinates(const GroupPoint& p);

/// d(p, 0).
double cc_distance_origin(const GroupPoint& p);

/// d(a, b) = d(0, a^-1 * b).
double cc_distance(const GroupPoint& a, const GroupPoint& b);

/// Volume of the unit CC ball by composite Gauss-Legendre quadrature of the
/// geodesic Jacobian with `quadrature_resolution` panels per axis (>= 16).
/// estimate_stderr is the difference from the half-resolution rule.
CCMetrics unit_ball_volume(int quadrature_resolution);

/// Cached high-resolution value of |B_1(0)|.
double unit_ball_volume_reference();

/// Height of the bounding box of B_r(0): max |x3| over the ball is r^2 / (2 pi).
double ball_height_bound(double r);

/// Monte Carlo estimate of |B_r(0)| by rejection sampling the box
/// [-r, r]^2 x [-r^2/(2 pi), r^2/(2 pi)]. Deterministic for a fixed seed,
/// independent of the number of worker threads.
CCMetrics mc_ball_volume(double r, std::int64_t n_samples, std::uint64_t seed);

}  // namespace heisenbound
