#pragma once

#include "ncbm/estimate.hpp"
#include "ncbm/linalg.hpp"
#include "ncbm/quadrature.hpp"
#include "ncbm/rng.hpp"

#include <cstdint>
#include <span>

namespace ncbm {

enum class Ensemble { GUE, GOE };

/// Normalization constants of the Gaussian ensembles and of the
/// noncolliding transition densities:
///   C1 = (2 pi)^{N/2} prod Gamma(j),  C2 = 2^{N/2} prod Gamma(j/2),
///   C3 = 2^{N/2} pi^{N^2/2},          C4 = 2^{N/2} pi^{N(N+1)/4}.
struct NormalizationConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
};

NormalizationConstants constants(std::size_t n);

/// Psi(u) = int_0^u exp(-v^2) dv = (sqrt(pi)/2) erf(u).
double psi(double u);

/// Factor c_M such that c_M * pf(Psi-matrix) -> 1 when all gaps grow;
/// obtained as 1 / pf of the M x M matrix whose upper entries are Psi(inf).
double survival_calibration(std::size_t even_dim);

/// Karlin-McGregor density det[G_t(x_j, y_i)] of absorbing Brownian motion
/// in the chamber. Requires t > 0 and x strictly ordered.
DensityValue f_N(double t, const WeylVector& x, const WeylVector& y);
double f_N(double t, std::span<const double> x, std::span<const double> y);

enum class SurvivalMethodKind { Pfaffian, Quadrature, MonteCarlo };

struct SurvivalMethod {
  SurvivalMethodKind kind = SurvivalMethodKind::Pfaffian;
  // Monte Carlo
  std::size_t samples = 100000;
  std::size_t steps = 256;
  std::uint64_t seed = 0;
  // Quadrature
  QuadratureOptions quadrature{};

  static SurvivalMethod pfaffian() { return {}; }
  static SurvivalMethod quadrature_method(double rel_tol = 1e-6) {
    SurvivalMethod m;
    m.kind = SurvivalMethodKind::Quadrature;
    m.quadrature.rel_tol = rel_tol;
    return m;
  }
  static SurvivalMethod montecarlo(std::size_t samples, std::uint64_t seed, std::size_t steps = 256) {
    SurvivalMethod m;
    m.kind = SurvivalMethodKind::MonteCarlo;
    m.samples = samples;
    m.seed = seed;
    m.steps = steps;
    return m;
  }
};

struct SurvivalResult {
  SurvivalMethodKind method = SurvivalMethodKind::Pfaffian;
  double value = 0.0;
  double se = 0.0;          // Monte Carlo only
  std::size_t count = 0;    // Monte Carlo only
  double quad_error = 0.0;  // Quadrature only
  bool converged = true;    // Quadrature only

  MCEstimate estimate() const { return {value, se, count}; }
};

/// Probability that Brownian motions started at strictly ordered x do not
/// collide up to time t. Quadrature is limited to N <= 4.
SurvivalResult survival_N(double t, const WeylVector& x, const SurvivalMethod& method = {});

/// Pfaffian evaluator on raw coordinates; hot path of the finite-horizon drift.
/// Returns 1 for t == 0 with strictly ordered x.
double survival_pfaffian(double t, std::span<const double> x);

/// Transition density of Dyson's model: from the origin (s = 0, x = 0) or
/// from a strictly ordered x. Returns 0 on the chamber boundary.
DensityValue p_N(double s, const WeylVector& x, double t, const WeylVector& y);
double p_N_origin(double t, std::span<const double> y);

/// Transition density of the finite-horizon noncolliding system, 0 <= s < t <= T.
DensityValue g_N_T(double horizon, double s, const WeylVector& x, double t, const WeylVector& y);
double g_N_T_origin(double horizon, double t, std::span<const double> y);

/// Eigenvalue densities of GUE(t) and GOE(t) on the chamber.
DensityValue eigen_density(Ensemble kind, const WeylVector& x, double t);
double eigen_density(Ensemble kind, std::span<const double> x, double t);

/// Matrix-space densities mu^GUE(H, t), mu^GOE(A, t).
DensityValue matrix_density(const HermitianMatrix& h, double t);
DensityValue matrix_density(const SymmetricMatrix& a, double t);
/// mu^GUE(H, t) evaluated from Tr H^2 alone.
double gue_density_from_trace(std::size_t n, double trace_square, double t);
double goe_density_from_trace(std::size_t n, double trace_square, double t);

/// Truncation box [lo, hi] for chamber quadrature of densities started near x
/// at time t: the spread of x widened by (8 + 2 sqrt(N)) sqrt(t) on each side.
std::pair<double, double> chamber_box(double t, std::span<const double> x);

}  // namespace ncbm
