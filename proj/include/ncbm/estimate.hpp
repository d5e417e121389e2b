#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace ncbm {

enum class DensityDomain { Chamber, MatrixSpace };

/// Density value tagged with the measure it is taken against.
struct DensityValue {
  double value = 0.0;
  DensityDomain domain = DensityDomain::Chamber;
  operator double() const noexcept { return value; }
};

/// Monte Carlo mean with its standard error.
struct MCEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;

  /// Number of standard errors between this estimate and a reference value.
  double z_score(double reference) const;
  /// True if |mean - reference| <= k * se (exact equality when se == 0).
  bool within(double reference, double k = 3.0) const;
};

/// Joint test |a - b| <= k * sqrt(se_a^2 + se_b^2).
bool agree(const MCEstimate& a, const MCEstimate& b, double k = 3.0);

/// Welford running mean/variance. `merge` combines partial accumulators by
/// count-weighted means (Chan et al.).
class MeanAccumulator {
 public:
  void add(double x) noexcept {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  void merge(const MeanAccumulator& o) noexcept;
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  MCEstimate estimate() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

MCEstimate estimate_mean(std::span<const double> samples);

}  // namespace ncbm
