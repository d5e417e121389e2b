#include "ncbm/densities.hpp"
#include "ncbm/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ncbm;

namespace {

double normal_cdf(double x, double var) { return 0.5 * std::erfc(-x / std::sqrt(2.0 * var)); }

SDEConfig config(std::size_t n, double horizon, std::size_t steps) {
  SDEConfig c;
  c.n = n;
  c.horizon = horizon;
  c.dt = horizon / static_cast<double>(steps);
  return c;
}

}  // namespace

TEST(TabulatedCdf, InterpolatesAndNormalizes) {
  const TabulatedCdf c({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0});
  EXPECT_DOUBLE_EQ(c.raw_mass(), 4.0);
  EXPECT_DOUBLE_EQ(c(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(c(0.5), 0.125);
  EXPECT_DOUBLE_EQ(c(1.5), 0.625);
  EXPECT_DOUBLE_EQ(c(3.0), 1.0);
  EXPECT_THROW(TabulatedCdf({0.0}, {0.0}), std::invalid_argument);
}

TEST(MarginalCdf, OneParticleIsGaussian) {
  const auto c = marginal_cdf(1, 0, -8.0, 8.0, [](std::span<const double> y) { return heat_kernel(1.0, 0.0, y[0]); });
  for (double x : {-2.0, -0.5, 0.0, 1.3}) EXPECT_NEAR(c(x), normal_cdf(x, 1.0), 2e-4);
  EXPECT_NEAR(c.raw_mass(), 1.0, 1e-9);
}

TEST(MarginalCdf, AveragedGUEMarginalsGiveOneEigenvalueDensity) {
  // pooled eigenvalues of GUE(1), N = 2: the one-point density is
  // (1/2) sum_k phi_k(x)^2 with Hermite functions; its CDF at 0 is 1/2 by symmetry
  const auto f = [](std::span<const double> y) { return eigen_density(Ensemble::GUE, y, 1.0); };
  const auto c0 = marginal_cdf(2, 0, -8.0, 8.0, f);
  const auto c1 = marginal_cdf(2, 1, -8.0, 8.0, f);
  const auto pooled = average({c0, c1});
  EXPECT_NEAR(pooled(0.0), 0.5, 1e-6);
  EXPECT_NEAR(c0(0.0) + c1(0.0), 1.0, 1e-6);
  EXPECT_NEAR(c0.raw_mass(), 1.0, 1e-6);
  // one-point density (1/2)(phi_0^2 + phi_1^2) with phi_k orthonormal for the weight exp(-x^2/2)
  const auto one_point = [](double x) {
    return 0.5 * (1.0 + x * x) * std::exp(-x * x / 2.0) / std::sqrt(2.0 * 3.141592653589793);
  };
  const double cdf1 = integrate_interval(one_point, -12.0, 1.0, 16);
  EXPECT_NEAR(pooled(1.0), cdf1, 2e-4);
}

TEST(SuiteReport, GreenLogic) {
  SuiteReport s;
  s.allowed_failures = 1;
  s.checks.push_back({"a", true, true, {}});
  s.checks.push_back({"b", false, true, {}});
  EXPECT_TRUE(s.green());
  s.checks.push_back({"c", false, true, {}});
  EXPECT_FALSE(s.green());
  s.checks.pop_back();
  s.checks.push_back({"d", false, false, {}});
  EXPECT_FALSE(s.green());
  EXPECT_EQ(s.first_failure(), "b");
  EXPECT_EQ(s.to_json()["schema_version"], kReportSchemaVersion);
}

TEST(SuiteReport, Allowance) {
  EXPECT_EQ(ks_failure_allowance(0), 1u);
  EXPECT_EQ(ks_failure_allowance(10), 1u);
  EXPECT_EQ(ks_failure_allowance(11), 2u);
  EXPECT_EQ(ks_failure_allowance(22), 3u);
}

TEST(StateAt, FindsGridTimes) {
  Trajectory tr;
  tr.times = {0.0, 0.5, 1.0};
  tr.states = {WeylVector::origin(1), WeylVector::ordered({0.5}), WeylVector::ordered({1.0})};
  EXPECT_EQ(state_at(tr, 0.5)[0], 0.5);
  EXPECT_THROW(state_at(tr, 0.7), std::invalid_argument);
}

TEST(Imhof, ConstantReducesToOneForOneParticle) {
  for (double horizon : {0.5, 1.0, 7.0}) EXPECT_NEAR(imhof_constant(1, horizon), 1.0, 1e-14);
  // C1(2) T^{1/2} / C2(2) = sqrt(pi T)
  EXPECT_NEAR(imhof_constant(2, 3.0), std::sqrt(3.0 * 3.141592653589793), 1e-12);
}

TEST(Imhof, OneParticleWeightIsOne) {
  const auto r = imhof_check(config(1, 1.0, 64), default_imhof_functionals(1.0), 500, 3);
  EXPECT_DOUBLE_EQ(r.normalization.mean, 1.0);
  EXPECT_DOUBLE_EQ(r.normalization.se, 0.0);
  for (const auto& f : r.functionals) EXPECT_TRUE(agree(f.direct, f.reweighted));
}

TEST(Imhof, TwoParticleNormalization) {
  const auto s = imhof_suite(config(2, 1.0, 256), 4000, 5);
  EXPECT_TRUE(s.green()) << s.to_json().dump();
}

TEST(Suites, Deterministic) {
  const auto a = theorem22_suite(config(2, 1.0, 64), {0.5, 1.0}, 300, 9);
  const auto b = theorem22_suite(config(2, 1.0, 64), {0.5, 1.0}, 300, 9);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  const auto c = theorem22_suite(config(2, 1.0, 64), {0.5, 1.0}, 300, 10);
  EXPECT_NE(a.to_json().dump(), c.to_json().dump());
}

TEST(Suites, FiniteHorizonSuiteOneParticle) {
  const auto s = theorem22_suite(config(1, 1.0, 128), {0.25, 0.5, 0.75, 1.0}, 3000, 11);
  EXPECT_TRUE(s.green()) << s.to_json().dump();
  EXPECT_GE(s.checks.size(), 5u);
}

TEST(Suites, FiniteHorizonSuiteRejectsOffGridTimes) {
  EXPECT_THROW(theorem22_suite(config(2, 1.0, 64), {0.3}, 10, 1), std::invalid_argument);
  EXPECT_THROW(theorem22_suite(config(2, 1.0, 64), {1.5}, 10, 1), std::invalid_argument);
}

TEST(Suites, RetryRunsOnceMoreOnFailure) {
  int calls = 0;
  const auto runs = run_with_retry(
      [&](std::uint64_t seed) {
        ++calls;
        SuiteReport s;
        s.seed = seed;
        s.checks.push_back({"x", seed == 8, false, {}});
        return s;
      },
      7);
  EXPECT_EQ(calls, 2);
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[1].seed, 8u);
  EXPECT_TRUE(runs[1].green());
}

TEST(Suites, HCOneParticleExact) {
  HCSuiteOptions o;
  o.n = 1;
  o.samples = 10;
  EXPECT_TRUE(hc_suite(o, 1).green());
}
