#include "heisenbound/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <ostream>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "heisenbound/errors.hpp"
#include "heisenbound/random.hpp"

namespace heisenbound {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

struct RowTerm {
  long column;
  double weight;
};

using Matrix = Eigen::MatrixXd;

void fill_random(Eigen::Ref<Matrix> block, std::mt19937_64& gen) {
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    for (Eigen::Index i = 0; i < block.rows(); ++i) block(i, j) = uniform(gen, -1.0, 1.0);
  }
}

// Orthonormalizes the columns of w against basis(:, 0:k) and each other.
// Columns that vanish are replaced by random directions.
void orthonormalize(const Matrix& basis, Eigen::Index k, Matrix& w, std::mt19937_64& gen) {
  const auto prior = basis.leftCols(k);
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      auto col = w.col(c);
      const double before = col.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (k > 0) col -= prior * (prior.transpose() * col);
        for (Eigen::Index q = 0; q < c; ++q) col -= w.col(q) * w.col(q).dot(col);
      }
      const double after = col.norm();
      if (after > 1e-10 * before && after > 0.0) {
        col /= after;
        break;
      }
      fill_random(w.col(c), gen);
    }
  }
}

}  // namespace

std::vector<Eigen::Triplet<double>> SparseForm::entries() const {
  std::vector<Eigen::Triplet<double>> out;
  out.reserve(static_cast<std::size_t>(matrix.nonZeros()));
  for (int col = 0; col < matrix.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, col); it; ++it) {
      out.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  return out;
}

std::uint64_t grid_id(const VoxelDomain& vox) {
  std::uint64_t h = kFnvOffset;
  fnv_bytes(h, vox.origin.data(), sizeof(vox.origin));
  fnv_bytes(h, vox.spacing.data(), sizeof(vox.spacing));
  fnv_bytes(h, vox.dims.data(), sizeof(vox.dims));
  fnv_bytes(h, vox.mask.data(), vox.mask.size());
  return h;
}

SparseForm assemble(const VoxelDomain& vox) {
  const std::size_t n_cells = vox.cell_count();
  std::vector<long> unknown(n_cells, -1);
  SparseForm form;
  form.spacing = vox.spacing;
  form.grid_id = grid_id(vox);
  for (std::size_t i = 0; i < n_cells; ++i) {
    if (vox.mask[i]) {
      unknown[i] = static_cast<long>(form.cells.size());
      form.cells.push_back(i);
    }
  }
  if (form.cells.empty()) throw InvalidArgument("assemble: the voxel mask is empty");

  const auto [h1, h2, h3] = vox.spacing;
  auto column = [&](int i, int j, int k) -> long {
    return vox.occupied(i, j, k) ? unknown[vox.index(i, j, k)] : -1;
  };

  // K = sum over rows r of r^T r; the form matrix is h1 h2 h3 K.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(form.cells.size() * 20);
  auto add_row = [&](const std::array<RowTerm, 3>& row) {
    for (const RowTerm& a : row) {
      if (a.column < 0) continue;
      for (const RowTerm& b : row) {
        if (b.column < 0) continue;
        triplets.emplace_back(a.column, b.column, a.weight * b.weight);
      }
    }
  };

  for (int i = -1; i < vox.dims[0]; ++i) {
    for (int j = -1; j < vox.dims[1]; ++j) {
      for (int k = -1; k < vox.dims[2]; ++k) {
        const long here = column(i, j, k);
        const long up1 = column(i + 1, j, k);
        const long up2 = column(i, j + 1, k);
        const long up3 = column(i, j, k + 1);
        if (here < 0 && up1 < 0 && up2 < 0 && up3 < 0) continue;
        const GroupPoint x = vox.cell_center(i, j, k);
        const double c1 = 0.5 * x.x2 / h3;
        const double c2 = -0.5 * x.x1 / h3;
        add_row({RowTerm{up1, 1.0 / h1}, RowTerm{here, -1.0 / h1 - c1}, RowTerm{up3, c1}});
        add_row({RowTerm{up2, 1.0 / h2}, RowTerm{here, -1.0 / h2 - c2}, RowTerm{up3, c2}});
      }
    }
  }

  const auto n = static_cast<Eigen::Index>(form.cells.size());
  form.matrix.resize(n, n);
  form.matrix.setFromTriplets(triplets.begin(), triplets.end());
  form.matrix *= h1 * h2 * h3;
  form.matrix.makeCompressed();
  return form;
}

Spectrum lowest_eigenvalues(const SparseForm& form, int m, double tol, std::uint64_t seed) {
  const Eigen::Index n = form.dimension();
  if (m < 1 || 4 * static_cast<Eigen::Index>(m) > n) {
    throw InvalidArgument(
        fmt::format("num_eigs={} must satisfy 1 <= num_eigs <= dimension/4 = {}", m, n / 4));
  }
  if (!(tol > 0.0)) throw InvalidArgument(fmt::format("tol={} must be positive", tol));

  // Operator eigenvalues: K v = lambda v with K = A / (h1 h2 h3).
  const Eigen::SparseMatrix<double> op = form.matrix / form.mass();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(op);
  if (factor.info() != Eigen::Success) {
    throw NumericalFailure("sparse factorization of the form failed", 0.0);
  }

  const Eigen::Index block = std::min<Eigen::Index>(8, n);
  const Eigen::Index cap = std::min<Eigen::Index>(n, std::max<Eigen::Index>(400, 10 * m));
  std::mt19937_64 gen(stream_seed(seed, static_cast<std::uint64_t>(n)));

  Matrix basis(n, cap);
  Matrix projected = Matrix::Zero(cap, cap);  // basis^T K basis
  Eigen::Index k = 0;

  auto append = [&](Matrix w) {
    orthonormalize(basis, k, w, gen);
    basis.middleCols(k, w.cols()) = w;
    const Matrix kw = op * w;
    const Eigen::Index end = k + w.cols();
    projected.block(0, k, end, w.cols()) = basis.leftCols(end).transpose() * kw;
    projected.block(k, 0, w.cols(), end) = projected.block(0, k, end, w.cols()).transpose();
    k = end;
  };

  Matrix start(n, block);
  fill_random(start, gen);
  append(std::move(start));

  double worst = std::numeric_limits<double>::infinity();
  int converged = 0;
  while (true) {
    if (k >= m + block || k == n) {
      Eigen::SelfAdjointEigenSolver<Matrix> ritz(projected.topLeftCorner(k, k));
      const Matrix vectors = basis.leftCols(k) * ritz.eigenvectors().leftCols(m);
      const Eigen::VectorXd theta = ritz.eigenvalues().head(m);
      const Matrix residual = op * vectors - vectors * theta.asDiagonal();
      Spectrum out;
      converged = 0;
      worst = 0.0;
      for (int i = 0; i < m; ++i) {
        const double r = residual.col(i).norm() / vectors.col(i).norm();
        out.eigenvalues.push_back(theta(i));
        out.residuals.push_back(r);
        worst = std::max(worst, r);
        if (r <= tol && converged == i) ++converged;
      }
      if (converged == m) {
        if (!(out.eigenvalues.front() > 0.0)) {
          throw NumericalFailure("lowest eigenvalue is not positive", worst, converged);
        }
        out.count = m;
        out.grid_id = form.grid_id;
        return out;
      }
    }
    const Eigen::Index next = std::min(block, n - k);
    if (next <= 0 || k + next > cap) break;
    Matrix w = factor.solve(Matrix(basis.middleCols(k - block, block))).leftCols(next);
    append(std::move(w));
  }
  throw NumericalFailure(
      fmt::format("eigensolver reached its basis limit of {} vectors with {}/{} eigenpairs converged",
                  cap, converged, m),
      worst, converged);
}

double observed_order(const std::vector<double>& h, const std::vector<double>& values) {
  if (h.size() != 3 || values.size() != 3) {
    throw InvalidArgument("observed_order needs exactly three grids");
  }
  const double d1 = values[0] - values[1];
  const double d2 = values[1] - values[2];
  if (d1 == 0.0 || d2 == 0.0 || (d1 > 0.0) != (d2 > 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double target = d1 / d2;
  auto ratio = [&](double p) {
    return (std::pow(h[0], p) - std::pow(h[1], p)) / (std::pow(h[1], p) - std::pow(h[2], p));
  };
  double lo = 0.01;
  double hi = 10.0;
  if (target <= ratio(lo) || target >= ratio(hi)) return std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ratio(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double richardson_extrapolate(double h_coarse, double v_coarse, double h_fine, double v_fine,
                              double order) {
  const double ratio = std::pow(h_fine / h_coarse, order);
  return v_fine + (v_fine - v_coarse) * ratio / (1.0 - ratio);
}

RefinementStudy refine_study(const DomainSpec& spec, const std::vector<int>& resolutions, int m,
                             double tol) {
  if (resolutions.size() < 2) throw InvalidArgument("refine_study needs at least 2 resolutions");
  RefinementStudy study;
  study.resolutions = resolutions;
  for (const int res : resolutions) {
    study.spectra.push_back(lowest_eigenvalues(assemble(voxelize(spec, res)), m, tol));
  }
  const std::size_t g = resolutions.size();
  const double h_c = 1.0 / resolutions[g - 2];
  const double h_f = 1.0 / resolutions[g - 1];
  for (int j = 0; j < m; ++j) {
    double p = 1.0;
    double reported = std::numeric_limits<double>::quiet_NaN();
    if (g >= 3) {
      reported = observed_order(
          {1.0 / resolutions[g - 3], h_c, h_f},
          {study.spectra[g - 3].eigenvalues[j], study.spectra[g - 2].eigenvalues[j],
           study.spectra[g - 1].eigenvalues[j]});
      if (std::isfinite(reported)) p = reported;
    }
    study.order.push_back(reported);
    study.extrapolated.push_back(richardson_extrapolate(
        h_c, study.spectra[g - 2].eigenvalues[j], h_f, study.spectra[g - 1].eigenvalues[j], p));
  }
  return study;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "index,eigenvalue,residual\n";
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    out << fmt::format("{},{:.9g},{:.9g}\n", i + 1, spectrum.eigenvalues[i], spectrum.residuals[i]);
  }
}

}  // namespace heisenbound
