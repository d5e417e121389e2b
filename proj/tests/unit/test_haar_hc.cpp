#include "ncbm/densities.hpp"
#include "ncbm/haar_hc.hpp"
#include "ncbm/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ncbm;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> eigen_angles(const ComplexMatrix& u) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(u);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::arg(es.eigenvalues()(i)));
  return out;
}

}  // namespace

TEST(Haar, Unitary) {
  RngStream rng(1);
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    for (int k = 0; k < 50; ++k) {
      const auto u = sample_haar_unitary(n, rng);
      EXPECT_LT((u.adjoint() * u - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
      const auto v = sample_haar_orthogonal(n, rng);
      EXPECT_LT((v.transpose() * v - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Haar, OneByOnePhaseUniform) {
  std::vector<double> phase;
  for (std::uint64_t r = 0; r < 10000; ++r) {
    RngStream rng(2, r);
    const Complex z = sample_haar_unitary(1, rng)(0, 0);
    EXPECT_NEAR(std::abs(z), 1.0, 1e-14);
    phase.push_back(std::arg(z) + kPi);
  }
  EXPECT_GT(ks_one_sample(phase, [](double x) { return std::clamp(x / (2.0 * kPi), 0.0, 1.0); }).p_value, 0.01);
}

TEST(Haar, FirstMoment) {
  for (std::size_t n : {2u, 3u, 4u}) {
    std::vector<double> m;
    for (std::uint64_t r = 0; r < 20000; ++r) {
      RngStream rng(3, r);
      m.push_back(std::norm(sample_haar_unitary(n, rng)(0, 0)));
    }
    EXPECT_TRUE(estimate_mean(m).within(1.0 / static_cast<double>(n), 3.0)) << "n=" << n;
  }
}

TEST(Haar, LeftInvariance) {
  RngStream vr(4);
  const auto v = sample_haar_unitary(3, vr);
  std::vector<double> a, b;
  for (std::uint64_t r = 0; r < 5000; ++r) {
    RngStream r1(5, r), r2(6, r);
    for (double x : eigen_angles(sample_haar_unitary(3, r1))) a.push_back(x);
    for (double x : eigen_angles(v * sample_haar_unitary(3, r2))) b.push_back(x);
  }
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.01);
}

TEST(Haar, PhaseCorrectionMatters) {
  // without the correction the diagonal of R is positive and E[u_11] would be biased;
  // with it, E[Re u_11] = 0
  std::vector<double> re;
  for (std::uint64_t r = 0; r < 20000; ++r) {
    RngStream rng(7, r);
    re.push_back(sample_haar_unitary(2, rng)(0, 0).real());
  }
  EXPECT_TRUE(estimate_mean(re).within(0.0, 3.0));
}

TEST(HarishChandra, QueryValidation) {
  EXPECT_THROW(HCQuery::make({0.0, 1.0}, {0.0}, 1.0, 10), std::invalid_argument);
  EXPECT_THROW(HCQuery::make({0.0, 1.0}, {0.0, 1.0}, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(HCQuery::make({0.0, 1.0}, {0.0, 1.0}, 1.0, 0), std::invalid_argument);
  EXPECT_THROW(HCQuery::make({1.0, 1.0}, {0.0, 1.0}, 1.0, 10), std::invalid_argument);
}

TEST(HarishChandra, OneDimensionExact) {
  const auto q = HCQuery::make({0.3}, {-0.4}, 0.8, 100);
  const double expected = std::exp(-0.49 / (2.0 * 0.64));
  const auto lhs = hc_lhs(q, 1);
  EXPECT_NEAR(lhs.mean, expected, 1e-14);
  EXPECT_LT(lhs.se, 1e-15);
  EXPECT_NEAR(hc_rhs(q), expected, 1e-14);
}

TEST(HarishChandra, PinnedValue) {
  const auto q = HCQuery::make({0.0, 1.0}, {0.0, 1.0}, 1.0, 100000);
  // 2 pi (G_1(0,0)^2 - G_1(0,1)^2)
  const double g00 = 1.0 / std::sqrt(2.0 * kPi), g01 = std::exp(-0.5) / std::sqrt(2.0 * kPi);
  EXPECT_NEAR(hc_rhs(q), 2.0 * kPi * (g00 * g00 - g01 * g01), 1e-14);
  EXPECT_NEAR(hc_rhs(q), 1.0 - std::exp(-1.0), 1e-14);
  EXPECT_TRUE(hc_lhs(q, 11).within(1.0 - std::exp(-1.0), 3.0));
}

TEST(HarishChandra, IdentityOnGrid) {
  for (double sigma : {0.5, 1.0, 2.0}) {
    const auto q2 = HCQuery::make({-0.4, 0.9}, {0.1, 1.3}, sigma, 40000);
    EXPECT_TRUE(hc_lhs(q2, 12).within(hc_rhs(q2), 3.0)) << "sigma=" << sigma;
    const auto q3 = HCQuery::make({-1.0, 0.2, 0.8}, {-0.5, 0.0, 1.1}, sigma, 40000);
    EXPECT_TRUE(hc_lhs(q3, 13).within(hc_rhs(q3), 3.0)) << "sigma=" << sigma;
  }
}

TEST(HarishChandra, SymmetryAndScaling) {
  const auto q = HCQuery::make({-0.2, 0.5, 1.0}, {0.0, 0.3, 1.4}, 0.9, 40000);
  const auto r = HCQuery::make({0.0, 0.3, 1.4}, {-0.2, 0.5, 1.0}, 0.9, 40000);
  EXPECT_TRUE(agree(hc_lhs(q, 14), hc_lhs(r, 15)));
  EXPECT_NEAR(hc_rhs(q), hc_rhs(r), 1e-12);
  const double c = 2.5;
  const auto s = HCQuery::make({-0.2 * c, 0.5 * c, 1.0 * c}, {0.0, 0.3 * c, 1.4 * c}, 0.9 * c, 10);
  EXPECT_NEAR(hc_rhs(s), hc_rhs(q), 1e-10);
}

TEST(Convolution, Parameters) {
  const auto p = ConvolutionParams::from(2.0, 0.5);
  EXPECT_DOUBLE_EQ(p.sigma2, 0.5 * 1.5 / 2.0);
  EXPECT_DOUBLE_EQ(p.alpha, 2.0 / 0.25);
  EXPECT_THROW(ConvolutionParams::from(1.0, 1.0), std::domain_error);
  EXPECT_THROW(ConvolutionParams::from(1.0, 0.0), std::domain_error);
}

TEST(Convolution, OneDimensionVarianceAddition) {
  const std::vector<double> d{0.7};
  const auto h = HermitianMatrix::diagonal(d);
  const double exact = heat_kernel(0.6, 0.0, 0.7);
  EXPECT_NEAR(convolution_closed_form(h, 1.5, 0.6), exact, 1e-12 * exact);
  EXPECT_TRUE(convolution_mc(h, 1.5, 0.6, 40000, 1).within(exact, 3.0));
}

TEST(Convolution, TwoDimensionMonteCarloMatchesClosedForm) {
  const std::vector<double> d{0.5, -0.5};
  const auto r = convolution_density(HermitianMatrix::diagonal(d), 2.0, 1.0, 100000, 2);
  EXPECT_TRUE(r.mc.within(r.closed_form, 3.0)) << r.mc.mean << " vs " << r.closed_form;
  EXPECT_LT(r.closed_form_error, 1e-8 * r.closed_form);
}

TEST(Convolution, ComplexAndThreeDimensional) {
  ComplexMatrix m(2, 2);
  m << Complex(0.2, 0), Complex(0.3, -0.4), Complex(0.3, 0.4), Complex(-0.6, 0);
  const auto r2 = convolution_density(HermitianMatrix(m), 1.0, 0.4, 100000, 3);
  EXPECT_TRUE(r2.mc.within(r2.closed_form, 3.0)) << r2.mc.mean << " vs " << r2.closed_form;
  const std::vector<double> d{-0.4, 0.1, 0.6};
  const auto r3 = convolution_density(HermitianMatrix::diagonal(d), 1.0, 0.5, 100000, 4);
  EXPECT_TRUE(r3.mc.within(r3.closed_form, 3.0)) << r3.mc.mean << " vs " << r3.closed_form;
}

TEST(Convolution, ModeAtZero) {
  const double at_zero = convolution_closed_form(HermitianMatrix::zero(2), 2.0, 1.0);
  const std::vector<double> d{0.6, -0.8};
  const auto h = HermitianMatrix::diagonal(d);
  EXPECT_LT(convolution_closed_form(h, 2.0, 1.0), at_zero);
  // a different matrix with the same trace norm
  ComplexMatrix m(2, 2);
  m << Complex(0.0, 0), Complex(0.0, std::sqrt(0.5)), Complex(0.0, -std::sqrt(0.5)), Complex(0.0, 0);
  EXPECT_NEAR(HermitianMatrix(m).trace_square(), h.trace_square(), 1e-12);
  EXPECT_LT(convolution_mc(HermitianMatrix(m), 2.0, 1.0, 20000, 5).mean, at_zero);
}

TEST(Convolution, UnitaryAverageGivesFiniteHorizonDensity) {
  const double horizon = 1.0, t = 0.5;
  for (const auto& y : {WeylVector::strict({-0.4, 0.5}), WeylVector::strict({-1.0, 0.2})}) {
    const auto est = unitary_averaged_eigen_density(y, horizon, t, 100000, 6);
    const double g = g_N_T(horizon, 0.0, WeylVector::origin(2), t, y);
    EXPECT_TRUE(est.within(g, 3.0)) << est.mean << " +- " << est.se << " vs " << g;
  }
}
