#pragma once

#include "ncbm/estimate.hpp"
#include "ncbm/linalg.hpp"
#include "ncbm/quadrature.hpp"
#include "ncbm/rng.hpp"

#include <cstdint>

namespace ncbm {

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the columns
/// of Q rotated by the phases of diag(R).
ComplexMatrix sample_haar_unitary(std::size_t n, RngStream& rng);

/// Haar-distributed orthogonal matrix (same construction over the reals).
RealMatrix sample_haar_orthogonal(std::size_t n, RngStream& rng);

struct HCQuery {
  WeylVector x;
  WeylVector y;
  double sigma = 1.0;
  std::size_t samples = 100000;

  /// Validates strict ordering, matching sizes, sigma > 0 and samples >= 1.
  static HCQuery make(std::vector<double> x, std::vector<double> y, double sigma, std::size_t samples);
};

/// exp{-(1/2 sigma^2) Tr(Lambda_x - U^dagger Lambda_y U)^2} for one unitary U.
double hc_integrand(const WeylVector& x, const WeylVector& y, double sigma, const ComplexMatrix& u);

/// Monte Carlo average of the integrand over Haar unitaries.
/// Sample k uses RngStream(seed, k).
MCEstimate hc_lhs(const HCQuery& q, std::uint64_t seed);

/// C1(N) sigma^{N^2} / (h_N(x) h_N(y)) det[G_{sigma^2}(x_i, y_j)].
double hc_rhs(const HCQuery& q);

/// sigma^2 = t (T - t) / T and alpha = T / t^2.
struct ConvolutionParams {
  double sigma2 = 0.0;
  double alpha = 0.0;
  static ConvolutionParams from(double horizon, double t);
};

struct ConvolutionResult {
  ConvolutionParams params;
  MCEstimate mc;
  double closed_form = 0.0;
  double closed_form_error = 0.0;
};

/// Monte Carlo estimate of int mu^GOE(A, 1/alpha) mu^GUE(H - A, sigma^2) V(dA)
/// with A drawn from GOE(1/alpha).
MCEstimate convolution_mc(const HermitianMatrix& h, double horizon, double t, std::size_t samples,
                          std::uint64_t seed);

/// The same integral written over GOE eigenvalues a in the chamber and the
/// orthogonal frame V: prefactor * int da h_N(a) e^{-alpha |a|^2 / 2}
/// <exp{-Tr(H - V Lambda_a V^T)^2 / 2 sigma^2}>_V. N <= 3; the O(N) average is
/// done by quadrature (angle for N = 2, Euler angles for N = 3).
/// `error` receives the change between the last two refinements.
double convolution_closed_form(const HermitianMatrix& h, double horizon, double t, double* error = nullptr);

ConvolutionResult convolution_density(const HermitianMatrix& h, double horizon, double t, std::size_t samples,
                                      std::uint64_t seed);

/// C_U(N) h_N(y)^2 int dU q(0, O, t, U^dagger Lambda_y U) with C_U = C3 / C1, estimated
/// jointly over Haar U and one GOE(1/alpha) draw per sample. Should equal
/// g_N^T(0, 0, t, y).
MCEstimate unitary_averaged_eigen_density(const WeylVector& y, double horizon, double t, std::size_t samples,
                                          std::uint64_t seed);

}  // namespace ncbm
