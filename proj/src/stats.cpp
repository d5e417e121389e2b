#include "ncbm/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ncbm {

// ---------------------------------------------------------------------------
// Estimates

double MCEstimate::z_score(double reference) const {
  const double d = mean - reference;
  if (se == 0.0) return d == 0.0 ? 0.0 : std::copysign(INFINITY, d);
  return d / se;
}

bool MCEstimate::within(double reference, double k) const {
  return std::abs(mean - reference) <= k * se;
}

bool agree(const MCEstimate& a, const MCEstimate& b, double k) {
  return std::abs(a.mean - b.mean) <= k * std::sqrt(a.se * a.se + b.se * b.se);
}

void MeanAccumulator::merge(const MeanAccumulator& o) noexcept {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double delta = o.mean_ - mean_;
  const double total = na + nb;
  mean_ += delta * nb / total;
  m2_ += o.m2_ + delta * delta * na * nb / total;
  n_ += o.n_;
}

MCEstimate MeanAccumulator::estimate() const noexcept {
  const double se = n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  return {mean_, se, n_};
}

MCEstimate estimate_mean(std::span<const double> samples) {
  MeanAccumulator acc;
  for (double v : samples) acc.add(v);
  return acc.estimate();
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi form of the CDF converges fast for small lambda
    const double pi = std::numbers::pi;
    const double y = std::exp(-pi * pi / (8.0 * lambda * lambda));
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) sum += std::pow(y, (2 * k - 1) * (2 * k - 1));
    const double cdf = std::sqrt(2.0 * pi) / lambda * sum;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-300) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_p_value(double statistic, double effective_n) {
  const double sn = std::sqrt(effective_n);
  return kolmogorov_survival((sn + 0.12 + 0.11 / sn) * statistic);
}

KSResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  KSResult r;
  r.statistic = d;
  r.n = x.size();
  r.m = y.size();
  r.p_value = ks_p_value(d, n * m / (n + m));
  return r;
}

KSResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  KSResult r;
  r.statistic = std::clamp(d, 0.0, 1.0);
  r.n = x.size();
  r.p_value = ks_p_value(r.statistic, n);
  return r;
}

double chi_squared_survival(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), x));
}

}  // namespace ncbm
