#include "ncbm/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ncbm;

TEST(Quadrature, IntervalPolynomialExact) {
  // 10-point Gauss-Legendre integrates degree 19 exactly
  const double v = integrate_interval([](double x) { return std::pow(x, 19) + 3.0 * x * x; }, -1.0, 2.0, 1);
  EXPECT_NEAR(v, (std::pow(2.0, 20) - 1.0) / 20.0 + 9.0, 1e-9);
}

TEST(Quadrature, OrderedSimplexVolume) {
  // volume of 0 <= y1 < y2 < y3 <= 1 is 1/3!
  const auto r = integrate_chamber(3, 0.0, 1.0, [](std::span<const double>) { return 1.0; });
  EXPECT_NEAR(r.value, 1.0 / 6.0, 1e-12);
  EXPECT_TRUE(r.converged);
}

TEST(Quadrature, SymmetricIntegrandOverChamber) {
  // a symmetric integrand over the chamber is 1/N! of its integral over R^N
  for (std::size_t n : {1u, 2u, 3u}) {
    const double f = std::tgamma(static_cast<double>(n) + 1.0);
    const auto r = integrate_chamber(n, -9.0, 9.0, [](std::span<const double> y) {
      double s = 0.0;
      for (double v : y) s += v * v;
      return std::exp(-0.5 * s) / std::pow(2.0 * std::numbers::pi, 0.5 * static_cast<double>(y.size()));
    });
    EXPECT_NEAR(r.value * f, 1.0, 1e-8) << "n=" << n;
  }
}

TEST(Quadrature, SegmentsSplitAtAFixedPoint) {
  // one coordinate below z = 0.3 and two above it, inside [0, 1]
  const double z = 0.3;
  std::vector<OrderedSegment> segs{{1, 0.0, z}, {2, z, 1.0}};
  const double v = integrate_ordered_fixed(segs, 2, [](std::span<const double> y) {
    EXPECT_EQ(y.size(), 3u);
    return 1.0;
  });
  EXPECT_NEAR(v, z * (1.0 - z) * (1.0 - z) / 2.0, 1e-12);
}

TEST(Quadrature, CompositeNodes) {
  std::vector<double> x, w;
  composite_gauss_nodes(0.0, 2.0, 3, x, w);
  EXPECT_EQ(x.size(), 30u);
  double s = 0.0;
  for (double v : w) s += v;
  EXPECT_NEAR(s, 2.0, 1e-14);
}
