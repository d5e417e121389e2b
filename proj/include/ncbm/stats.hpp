#pragma once

#include "ncbm/estimate.hpp"

#include <cstddef>
#include <functional>
#include <span>

namespace ncbm {

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t m = 0;  // 0 for one-sample tests
};

/// Complementary CDF of the asymptotic Kolmogorov distribution,
/// P(K > lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// Asymptotic p-value for statistic D at effective sample size ne
/// (Stephens' correction (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) D).
double ks_p_value(double statistic, double effective_n);

KSResult ks_two_sample(std::span<const double> a, std::span<const double> b);
KSResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Upper tail of the chi-squared distribution.
double chi_squared_survival(double x, double dof);

}  // namespace ncbm
