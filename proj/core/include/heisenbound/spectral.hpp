#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "heisenbound/domains.hpp"

namespace heisenbound {

/// Discrete Dirichlet form a[u] = sum_cells h1 h2 h3 (|X1 u|^2 + |X2 u|^2) on
/// the occupied cells of a voxel grid, with
///
///   X1 u ~ D1 u + (x2/2) D3 u,   X2 u ~ D2 u - (x1/2) D3 u
///
/// built from forward differences and zero extension outside the mask. Rows are
/// taken over the grid plus a one-cell halo so both sides see the Dirichlet
/// condition.
struct SparseForm {
  Eigen::SparseMatrix<double> matrix;  // symmetric positive definite
  Vec3 spacing{};
  std::vector<std::size_t> cells;      // unknown -> voxel index
  std::uint64_t grid_id = 0;

  int dimension() const { return static_cast<int>(matrix.rows()); }
  double mass() const { return spacing[0] * spacing[1] * spacing[2]; }
  double value(const Eigen::VectorXd& u) const { return u.dot(matrix * u); }
  std::vector<Eigen::Triplet<double>> entries() const;
};

/// FNV-1a hash of the grid geometry and mask; identifies the grid a spectrum
/// was computed on.
std::uint64_t grid_id(const VoxelDomain& vox);

/// Throws InvalidArgument for an empty mask.
SparseForm assemble(const VoxelDomain& vox);

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> residuals;    // ||K v - lambda v|| for unit v
  int count = 0;
  std::uint64_t grid_id = 0;

  double max_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
};

/// The m smallest eigenvalues of A v = lambda h1 h2 h3 v, by shift-invert
/// block Krylov with full reorthogonalization. Requires 1 <= m <= dim/4 and
/// tol > 0; throws NumericalFailure (with the converged count) when the basis
/// limit is reached first.
Spectrum lowest_eigenvalues(const SparseForm& form, int m, double tol = 1e-8,
                            std::uint64_t seed = 7);

struct RefinementStudy {
  std::vector<int> resolutions;
  std::vector<Spectrum> spectra;
  std::vector<double> extrapolated;  // Richardson estimate per eigenvalue index
  std::vector<double> order;         // observed convergence order per index (NaN if undefined)
};

/// Spectra on each resolution (h = 1/resolution) and Richardson extrapolation
/// from the last two (order 1) or three (observed order) grids.
RefinementStudy refine_study(const DomainSpec& spec, const std::vector<int>& resolutions, int m,
                             double tol = 1e-8);

/// Richardson helpers on a sequence of values at mesh sizes h (descending h).
double observed_order(const std::vector<double>& h, const std::vector<double>& values);
double richardson_extrapolate(double h_coarse, double v_coarse, double h_fine, double v_fine,
                              double order);

/// CSV with header `index,eigenvalue,residual`, 1-based index.
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);

}  // namespace heisenbound
