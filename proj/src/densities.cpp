#include "ncbm/densities.hpp"

#include "ncbm/parallel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ncbm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxCalibratedDim = 64;

void require_positive(double t, const char* what) {
  if (!(t > 0.0)) throw std::domain_error(std::string(what) + ": time must be positive");
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

bool strictly_ordered(std::span<const double> x) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i - 1] < x[i])) return false;
  }
  return true;
}

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

std::size_t bordered_dim(std::size_t n) { return n % 2 == 0 ? n : n + 1; }

double calibration_uncached(std::size_t m) {
  const double inf_value = 0.5 * std::sqrt(kPi);
  return 1.0 / pfaffian(SkewMatrix::from_upper(m, [&](std::size_t, std::size_t) { return inf_value; }));
}

}  // namespace

NormalizationConstants constants(std::size_t n) {
  if (n == 0) throw std::invalid_argument("constants: N must be positive");
  const double nd = static_cast<double>(n);
  double log_gamma_int = 0.0;
  double log_gamma_half = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    log_gamma_int += std::lgamma(static_cast<double>(j));
    log_gamma_half += std::lgamma(0.5 * static_cast<double>(j));
  }
  NormalizationConstants c;
  c.c1 = std::exp(0.5 * nd * std::log(2.0 * kPi) + log_gamma_int);
  c.c2 = std::exp(0.5 * nd * std::log(2.0) + log_gamma_half);
  c.c3 = std::exp(0.5 * nd * std::log(2.0) + 0.5 * nd * nd * std::log(kPi));
  c.c4 = std::exp(0.5 * nd * std::log(2.0) + 0.25 * nd * (nd + 1.0) * std::log(kPi));
  return c;
}

double psi(double u) { return 0.5 * std::sqrt(kPi) * std::erf(u); }

double survival_calibration(std::size_t even_dim) {
  if (even_dim % 2 != 0) throw std::invalid_argument("survival_calibration: odd dimension");
  static const std::array<double, kMaxCalibratedDim / 2 + 1> table = [] {
    std::array<double, kMaxCalibratedDim / 2 + 1> t{};
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = calibration_uncached(2 * k);
    return t;
  }();
  if (even_dim <= kMaxCalibratedDim) return table[even_dim / 2];
  return calibration_uncached(even_dim);
}

double f_N(double t, std::span<const double> x, std::span<const double> y) {
  require_positive(t, "f_N");
  require_same_size(x.size(), y.size(), "f_N");
  const auto n = static_cast<Eigen::Index>(x.size());
  RealMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = heat_kernel(t, x[j], y[i]);
  }
  return determinant(g);
}

DensityValue f_N(double t, const WeylVector& x, const WeylVector& y) {
  if (!x.is_strict()) throw std::invalid_argument("f_N: x must be strictly ordered");
  return {f_N(t, x.coords(), y.coords()), DensityDomain::Chamber};
}

double survival_pfaffian(double t, std::span<const double> x) {
  const std::size_t n = x.size();
  if (!strictly_ordered(x)) return 0.0;
  if (n <= 1 || t == 0.0) return 1.0;
  require_positive(t, "survival_pfaffian");
  const std::size_t m = bordered_dim(n);
  const double scale = 1.0 / (2.0 * std::sqrt(t));
  const double border = 0.5 * std::sqrt(kPi);
  const SkewMatrix a = SkewMatrix::from_upper(m, [&](std::size_t i, std::size_t j) {
    return j < n ? psi((x[j] - x[i]) * scale) : border;
  });
  return survival_calibration(m) * pfaffian(a);
}

namespace {

SurvivalResult survival_quadrature(double t, const WeylVector& x, const QuadratureOptions& opts) {
  const std::size_t n = x.size();
  if (n > 4) throw std::invalid_argument("survival_N: quadrature is limited to N <= 4");
  const auto [lo, hi] = chamber_box(t, x.coords());
  const auto xs = x.coords();
  const auto r = integrate_chamber(n, lo, hi, [&](std::span<const double> y) { return f_N(t, xs, y); }, opts);
  SurvivalResult out;
  out.method = SurvivalMethodKind::Quadrature;
  out.value = r.value;
  out.quad_error = r.error;
  out.converged = r.converged;
  return out;
}

SurvivalResult survival_montecarlo(double t, const WeylVector& x, const SurvivalMethod& m) {
  if (m.samples == 0 || m.steps == 0) throw std::invalid_argument("survival_N: montecarlo needs samples and steps");
  const std::size_t n = x.size();
  const double dt = t / static_cast<double>(m.steps);
  const double sd = std::sqrt(dt);
  std::vector<unsigned char> survived(m.samples, 0);
  parallel_for(m.samples, [&](std::size_t s) {
    RngStream rng(m.seed, s);
    std::vector<double> pos(x.coords().begin(), x.coords().end());
    std::vector<double> next(n);
    for (std::size_t k = 0; k < m.steps; ++k) {
      for (std::size_t i = 0; i < n; ++i) next[i] = pos[i] + sd * rng.normal();
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d0 = pos[i + 1] - pos[i];
        const double d1 = next[i + 1] - next[i];
        if (d1 <= 0.0) return;
        // the gap is a Brownian motion of variance 2 dt; bridge hitting probability
        if (rng.uniform() < std::exp(-d0 * d1 / dt)) return;
      }
      pos.swap(next);
    }
    survived[s] = 1;
  });
  MeanAccumulator acc;
  for (unsigned char v : survived) acc.add(static_cast<double>(v));
  SurvivalResult out;
  out.method = SurvivalMethodKind::MonteCarlo;
  out.value = acc.mean();
  out.se = acc.estimate().se;
  out.count = acc.count();
  return out;
}

}  // namespace

SurvivalResult survival_N(double t, const WeylVector& x, const SurvivalMethod& method) {
  require_positive(t, "survival_N");
  if (!x.is_strict()) throw std::invalid_argument("survival_N: x must be strictly ordered");
  switch (method.kind) {
    case SurvivalMethodKind::Pfaffian: {
      SurvivalResult r;
      r.value = survival_pfaffian(t, x.coords());
      return r;
    }
    case SurvivalMethodKind::Quadrature:
      return survival_quadrature(t, x, method.quadrature);
    case SurvivalMethodKind::MonteCarlo:
      return survival_montecarlo(t, x, method);
  }
  throw std::invalid_argument("survival_N: unknown method");
}

double p_N_origin(double t, std::span<const double> y) {
  require_positive(t, "p_N");
  const double n = static_cast<double>(y.size());
  const double h = vandermonde(y);
  const double c1 = constants(y.size()).c1;
  return std::pow(t, -0.5 * n * n) / c1 * std::exp(-squared_norm(y) / (2.0 * t)) * h * h;
}

DensityValue p_N(double s, const WeylVector& x, double t, const WeylVector& y) {
  require_same_size(x.size(), y.size(), "p_N");
  if (!(s >= 0.0) || !(t > s)) throw std::domain_error("p_N: requires 0 <= s < t");
  if (!y.is_strict()) return {0.0, DensityDomain::Chamber};
  if (s == 0.0 && x.is_origin()) return {p_N_origin(t, y.coords()), DensityDomain::Chamber};
  if (!x.is_strict()) throw std::invalid_argument("p_N: x must be strictly ordered or the origin at s = 0");
  const double v = f_N(t - s, x.coords(), y.coords()) * vandermonde(y) / vandermonde(x);
  return {v, DensityDomain::Chamber};
}

double g_N_T_origin(double horizon, double t, std::span<const double> y) {
  require_positive(t, "g_N_T");
  if (t > horizon) throw std::domain_error("g_N_T: t exceeds the horizon T");
  const double n = static_cast<double>(y.size());
  const double c2 = constants(y.size()).c2;
  const double survival = survival_pfaffian(horizon - t, y);
  return std::pow(horizon, 0.25 * n * (n - 1.0)) * std::pow(t, -0.5 * n * n) / c2 *
         std::exp(-squared_norm(y) / (2.0 * t)) * vandermonde(y) * survival;
}

DensityValue g_N_T(double horizon, double s, const WeylVector& x, double t, const WeylVector& y) {
  require_same_size(x.size(), y.size(), "g_N_T");
  if (!(horizon > 0.0)) throw std::domain_error("g_N_T: horizon must be positive");
  if (!(s >= 0.0) || !(t > s)) throw std::domain_error("g_N_T: requires 0 <= s < t");
  if (t > horizon) throw std::domain_error("g_N_T: t exceeds the horizon T");
  if (!y.is_strict()) return {0.0, DensityDomain::Chamber};
  if (s == 0.0 && x.is_origin()) return {g_N_T_origin(horizon, t, y.coords()), DensityDomain::Chamber};
  if (!x.is_strict()) throw std::invalid_argument("g_N_T: x must be strictly ordered or the origin at s = 0");
  const double num = f_N(t - s, x.coords(), y.coords()) * survival_pfaffian(horizon - t, y.coords());
  const double den = survival_pfaffian(horizon - s, x.coords());
  return {num / den, DensityDomain::Chamber};
}

double eigen_density(Ensemble kind, std::span<const double> x, double t) {
  require_positive(t, "eigen_density");
  if (!strictly_ordered(x)) return 0.0;
  const double n = static_cast<double>(x.size());
  const auto c = constants(x.size());
  const double gauss = std::exp(-squared_norm(x) / (2.0 * t));
  const double h = vandermonde(x);
  if (kind == Ensemble::GUE) return std::pow(t, -0.5 * n * n) / c.c1 * gauss * h * h;
  return std::pow(t, -0.25 * n * (n + 1.0)) / c.c2 * gauss * h;
}

DensityValue eigen_density(Ensemble kind, const WeylVector& x, double t) {
  return {eigen_density(kind, x.coords(), t), DensityDomain::Chamber};
}

double gue_density_from_trace(std::size_t n, double trace_square, double t) {
  require_positive(t, "matrix_density");
  const double nd = static_cast<double>(n);
  return std::pow(t, -0.5 * nd * nd) / constants(n).c3 * std::exp(-trace_square / (2.0 * t));
}

double goe_density_from_trace(std::size_t n, double trace_square, double t) {
  require_positive(t, "matrix_density");
  const double nd = static_cast<double>(n);
  return std::pow(t, -0.25 * nd * (nd + 1.0)) / constants(n).c4 * std::exp(-trace_square / (2.0 * t));
}

DensityValue matrix_density(const HermitianMatrix& h, double t) {
  return {gue_density_from_trace(h.size(), h.trace_square(), t), DensityDomain::MatrixSpace};
}

DensityValue matrix_density(const SymmetricMatrix& a, double t) {
  return {goe_density_from_trace(a.size(), a.trace_square(), t), DensityDomain::MatrixSpace};
}

std::pair<double, double> chamber_box(double t, std::span<const double> x) {
  double lo = 0.0;
  double hi = 0.0;
  if (!x.empty()) {
    lo = *std::min_element(x.begin(), x.end());
    hi = *std::max_element(x.begin(), x.end());
  }
  const double margin = (8.0 + 2.0 * std::sqrt(static_cast<double>(x.size()))) * std::sqrt(t);
  return {lo - margin, hi + margin};
}

}  // namespace ncbm
