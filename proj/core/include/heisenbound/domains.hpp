#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "heisenbound/hgeom.hpp"

namespace heisenbound {

using Vec3 = std::array<double, 3>;

enum class DomainKind { box, euclidean_ball, cc_ball };

/// Open bounded domain: an axis-aligned box, a Euclidean ball, or a CC ball
/// {x : d(center, x) < radius}.
struct DomainSpec {
  DomainKind kind = DomainKind::box;
  Vec3 min{0.0, 0.0, 0.0};
  Vec3 max{1.0, 1.0, 1.0};
  GroupPoint center{};
  double radius = 1.0;

  static DomainSpec box(const Vec3& lo, const Vec3& hi);
  static DomainSpec euclidean_ball(const GroupPoint& c, double r);
  static DomainSpec cc_ball(const GroupPoint& c, double r);

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  bool contains(const GroupPoint& p) const;

  /// Axis-aligned box enclosing the closure of the domain.
  std::array<Vec3, 2> bounding_box() const;

  /// Lebesgue measure; for CC balls radius^4 * |B_1(0)|.
  double exact_volume() const;

  /// Characteristic length used to scale tolerances.
  double size() const;
};

const char* to_string(DomainKind kind);

/// Image of the domain under the Heisenberg dilation. Euclidean balls are not
/// closed under it and are rejected with InvalidArgument.
DomainSpec dilate(double r, const DomainSpec& spec);

DomainSpec parse_domain(const std::string& json_text);
DomainSpec load_domain_file(const std::filesystem::path& path);
std::string to_json(const DomainSpec& spec);

/// Occupancy grid over the bounding box. Every axis of the box is split into
/// the same number of cells, so spacing may differ per axis.
struct VoxelDomain {
  Vec3 origin{};
  Vec3 spacing{};
  std::array<int, 3> dims{};
  std::vector<std::uint8_t> mask;

  std::size_t cell_count() const { return mask.size(); }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k;
  }
  std::array<int, 3> cell(std::size_t index) const;
  GroupPoint cell_center(int i, int j, int k) const;
  GroupPoint cell_center(std::size_t index) const;
  bool occupied(int i, int j, int k) const;
  std::size_t occupied_count() const;
  double cell_volume() const { return spacing[0] * spacing[1] * spacing[2]; }
  double volume() const { return cell_volume() * static_cast<double>(occupied_count()); }
};

inline constexpr int kMinResolution = 8;
inline constexpr int kDefaultBoundarySamples = 256;
inline constexpr int kMinBoundarySamples = 100;

/// Throws InvalidArgument if resolution < 8.
VoxelDomain voxelize(const DomainSpec& spec, int resolution);

/// CC distance from p to the complement of the domain; 0 outside and on the
/// boundary. n_boundary_samples controls the sampled parts (>= 100).
double boundary_distance(const DomainSpec& spec, const GroupPoint& p,
                         int n_boundary_samples = kDefaultBoundarySamples);

/// boundary_distance evaluated at every occupied cell center (0 elsewhere).
struct DistanceField {
  VoxelDomain grid;
  std::vector<double> distance;

  double max() const;
};

DistanceField distance_field(const DomainSpec& spec, int resolution,
                             int n_boundary_samples = kDefaultBoundarySamples);

/// sup of d over the domain: best grid value polished by compass search.
double in_radius(const DomainSpec& spec, const DistanceField& field,
                 int n_boundary_samples = kDefaultBoundarySamples);
double in_radius(const DomainSpec& spec, int resolution);

/// Voxel measure of {x in domain : d(x) < beta}. Requires 0 < beta <= in_radius.
double tube_volume(const DistanceField& field, double beta, double in_radius);
double tube_volume(const DomainSpec& spec, double beta, int resolution);

/// Geometric beta grid R, R/1.15, ..., n_beta points.
std::vector<double> sigma_beta_grid(double in_radius, int n_beta);

/// min over the beta grid of tube_volume / beta. n_beta >= 8.
double sigma(const DistanceField& field, double in_radius, int n_beta);
double sigma(const DomainSpec& spec, int resolution, int n_beta);

struct DomainMetrics {
  double volume = 0.0;
  double in_radius = 0.0;
  double sigma = 0.0;
  double unit_ball_volume = 0.0;
};

DomainMetrics domain_metrics(const DomainSpec& spec, int resolution, int n_beta = 16);

struct EikonalStats {
  double mean = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Deviation of |X1 d|^2 + |X2 d|^2 from 1, with X_i d from central
/// differences along the left-invariant fields. Points are drawn uniformly
/// from the domain with d > 3h; for CC balls points within 0.05 radius of the
/// center's vertical axis (where d has a ridge) are skipped.
EikonalStats eikonal_residual(const DomainSpec& spec, int n_points, double h,
                              std::uint64_t seed = 1);

/// Central differences (X1 d, X2 d) at p with step h.
std::array<double, 2> horizontal_gradient(const DomainSpec& spec, const GroupPoint& p, double h,
                                          int n_boundary_samples = kDefaultBoundarySamples);

}  // namespace heisenbound
