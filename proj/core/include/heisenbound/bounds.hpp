#pragma once

#include <span>
#include <vector>

#include "heisenbound/domains.hpp"
#include "heisenbound/spectral.hpp"

namespace heisenbound {

struct BoundParams {
  double volume = 0.0;            // |Omega|
  double in_radius = 0.0;         // R(Omega)
  double unit_ball_volume = 0.0;  // |B_1(0)|
  double sigma = 0.0;             // inf_beta |Omega^beta| / beta
  double hardy_c = 2.0;           // Hardy constant c >= 2

  void validate() const;
};

BoundParams make_params(const DomainSpec& spec, const DomainMetrics& metrics, double hardy_c = 2.0);

/// sum_k (lambda - lambda_k)_+ over the computed eigenvalues. Throws
/// CoverageError for lambda above the largest one.
double riesz_mean(std::span<const double> eigenvalues, double lambda);
double riesz_mean(const Spectrum& spectrum, double lambda);

/// |Omega| lambda^3 / 96.
double hl_bound(const BoundParams& params, double lambda);

/// |B_1|^2 R^6 lambda^2 / (3 2^9 |Omega|).
double melas_correction(const BoundParams& params, double lambda);
double melas_bound(const BoundParams& params, double lambda);

/// Largest lambda at which melas_bound vanishes: |B_1|^2 R^6 / (16 |Omega|^2).
double melas_threshold(const BoundParams& params);

/// Lower bound for sum_{j<=n} lambda_j:
/// (8 sqrt2 / 3) |Omega|^{-1/2} n^{3/2} + |B_1|^2 R^6 |Omega|^{-2} n / 48.
double liyau_sum_bound(const BoundParams& params, int n);

/// Exponent 2 + 1/(c+2) of lambda in the Hardy-improved correction.
double improved_exponent(double hardy_c);

/// Coefficient K with correction = K lambda^{improved_exponent}:
/// ((1+2/c)/96) sigma^{(2c+2)/(c+2)} (4c+4)^{-(2c+2)/(c+2)} |Omega|^{-1/(1+2/c)}.
double improved_coefficient(const BoundParams& params);
double improved_correction(const BoundParams& params, double lambda);
double improved_bound(const BoundParams& params, double lambda);

/// sup_i (p x_i - f_i) for convex non-decreasing samples on an ascending grid.
/// The conjugate of a piecewise-linear interpolant attains its sup at a knot,
/// so the kink of max{0, .} is handled exactly when it is a grid point.
double legendre_transform(std::span<const double> x, std::span<const double> f, double p);

/// f** at the sample points using the segment slopes as dual grid.
std::vector<double> double_legendre(std::span<const double> x, std::span<const double> f);

struct HardyQuotient {
  double quotient = 0.0;        // a[g] / int g^2/d^2 with g = d^{1/2+eps}
  double hardy_estimate = 0.0;  // reciprocal, the c^2 the sequence probes
  double form = 0.0;            // a[g]
  double weighted_norm = 0.0;   // int g^2 / d^2
};

/// Evaluates the Hardy test sequence g_eps = d^{1/2+eps} on a voxel grid of a
/// CC ball, with X_i g from the chain rule and central differences of d.
HardyQuotient hardy_quotient(const DomainSpec& spec, double epsilon, int resolution);

struct BoundReport {
  std::vector<double> lambda_grid;
  std::vector<double> riesz;
  std::vector<double> hl;
  std::vector<double> melas;
  std::vector<double> improved;  // empty unless requested
  std::vector<double> margin_hl;
  std::vector<double> margin_melas;
  std::vector<double> margin_improved;
  double valid_up_to = 0.0;
  double slack = 0.02;
  int violations = 0;  // margins below -slack * hl

  bool has_improved() const { return !improved.empty(); }
  bool ok() const { return violations == 0; }
};

struct VerifyOptions {
  double slack = 0.02;
  bool include_improved = false;
};

BoundReport verify(const Spectrum& spectrum, const BoundParams& params,
                   std::span<const double> lambda_grid, const VerifyOptions& options = {});

/// n equally spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace heisenbound
