#include "ncbm/sde.hpp"

#include "ncbm/densities.hpp"
#include "ncbm/format.hpp"
#include "ncbm/paths.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ncbm {

namespace {

using DriftFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

bool acceptable(std::span<const double> x, double min_gap) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] - x[i - 1] >= min_gap)) return false;
  }
  return true;
}

class Integrator {
 public:
  Integrator(const SDEConfig& cfg, DriftFn drift, RngStream& rng)
      : cfg_(cfg), drift_(std::move(drift)), rng_(rng), drift_buf_(cfg.n), prop_(cfg.n) {}

  // Advances x over [t, t + h] driven by the Brownian increment dw. On guard
  // rejection the increment is split at its midpoint by bridge sampling.
  bool advance(std::vector<double>& x, double t, double h, std::vector<double> dw, int depth) {
    drift_(t, x, drift_buf_);
    for (std::size_t i = 0; i < x.size(); ++i) prop_[i] = x[i] + drift_buf_[i] * h + dw[i];
    if (acceptable(prop_, cfg_.min_gap) && tame(x, h)) {
      x = prop_;
      return true;
    }
    if (depth >= cfg_.max_halvings) return false;
    ++halvings_;
    std::vector<double> first(x.size());
    std::vector<double> second(x.size());
    const double sd = std::sqrt(0.25 * h);
    for (std::size_t i = 0; i < x.size(); ++i) {
      first[i] = 0.5 * dw[i] + sd * rng_.normal();
      second[i] = dw[i] - first[i];
    }
    return advance(x, t, 0.5 * h, std::move(first), depth + 1) &&
           advance(x, t + 0.5 * h, 0.5 * h, std::move(second), depth + 1);
  }

  // The drift diverges like 1/gap; an Euler move larger than a fraction of
  // the current gap overshoots and is refined instead.
  bool tame(const std::vector<double>& x, double h) const {
    if (cfg_.drift_fraction <= 0.0 || x.size() < 2) return true;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < x.size(); ++i) gap = std::min(gap, x[i] - x[i - 1]);
    for (double b : drift_buf_) {
      if (std::abs(b) * h > cfg_.drift_fraction * gap) return false;
    }
    return true;
  }

  Trajectory run(double t_end, const std::vector<double>& start, double t_start) {
    Trajectory tr;
    const double dt = cfg_.step();
    std::vector<double> x = start;
    tr.times.push_back(t_start);
    tr.states.push_back(WeylVector::ordered(x));
    std::vector<double> dw(cfg_.n);
    const double span = t_end - t_start;
    const auto steps = static_cast<std::size_t>(std::max(0.0, std::ceil(span / dt - 1e-9)));
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = t_start + static_cast<double>(k) * dt;
      const double next = k + 1 == steps ? t_end : t_start + static_cast<double>(k + 1) * dt;
      const double h = next - t;
      for (std::size_t i = 0; i < cfg_.n; ++i) dw[i] = rng_.normal(std::sqrt(h));
      if (!advance(x, t, h, dw, 0)) {
        tr.failed = true;
        break;
      }
      tr.times.push_back(next);
      tr.states.push_back(WeylVector::strict(x));
    }
    tr.halvings = halvings_;
    return tr;
  }

 private:
  const SDEConfig& cfg_;
  DriftFn drift_;
  RngStream& rng_;
  std::vector<double> drift_buf_;
  std::vector<double> prop_;
  std::size_t halvings_ = 0;
};

double default_fd_step(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return 1e-4 * (1.0 + m);
}

}  // namespace

void SDEConfig::validate() const {
  if (n == 0) throw std::invalid_argument("SDEConfig: N must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("SDEConfig: horizon must be positive");
  if (dt < 0.0) throw std::invalid_argument("SDEConfig: dt must be positive");
  if (!(min_gap > 0.0)) throw std::invalid_argument("SDEConfig: guard threshold must be positive");
  if (drift_fraction < 0.0) throw std::invalid_argument("SDEConfig: drift fraction must be >= 0");
  if (fd_step < 0.0) throw std::invalid_argument("SDEConfig: finite-difference step must be positive");
  if (max_halvings < 0) throw std::invalid_argument("SDEConfig: max_halvings must be >= 0");
  if (start == StartMode::Interior) {
    if (start_point.size() != n) throw std::invalid_argument("SDEConfig: start point has the wrong dimension");
    for (std::size_t i = 1; i < n; ++i) {
      if (!(start_point[i - 1] < start_point[i])) {
        throw std::invalid_argument("SDEConfig: start point must be strictly ordered");
      }
    }
  }
}

std::vector<double> dyson_drift(std::span<const double> x) {
  std::vector<double> b(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j != i) b[i] += 1.0 / (x[i] - x[j]);
    }
  }
  return b;
}

std::vector<double> drift_bT(double t, std::span<const double> x, double horizon, double h) {
  if (!(t < horizon)) throw std::domain_error("drift_bT: requires t < T");
  if (!(h > 0.0)) throw std::invalid_argument("drift_bT: step must be positive");
  const std::size_t n = x.size();
  std::vector<double> b(n, 0.0);
  if (n <= 1) return b;
  const double s = horizon - t;
  std::vector<double> xp(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    double room = std::numeric_limits<double>::infinity();
    if (i > 0) room = std::min(room, x[i] - x[i - 1]);
    if (i + 1 < n) room = std::min(room, x[i + 1] - x[i]);
    const double hi = std::min(h, 0.25 * room);
    xp[i] = x[i] + hi;
    const double up = survival_pfaffian(s, xp);
    xp[i] = x[i] - hi;
    const double down = survival_pfaffian(s, xp);
    xp[i] = x[i];
    if (up > 0.0 && down > 0.0) {
      b[i] = (std::log(up) - std::log(down)) / (2.0 * hi);
    } else {
      // survival underflowed; use the small-gap limit of the log-gradient
      double d = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) d += 1.0 / (x[i] - x[j]);
      }
      b[i] = d;
    }
  }
  return b;
}

WeylVector sample_xit_eigenvalues(std::size_t n, double t, double horizon, RngStream& rng) {
  const auto ni = static_cast<Eigen::Index>(n);
  ComplexMatrix m = ComplexMatrix::Zero(ni, ni);
  const double sd_diag = std::sqrt(t);
  const double sd_re = std::sqrt(0.5 * t);
  const double sd_im = std::sqrt(0.5 * t * (horizon - t) / horizon);
  for (Eigen::Index i = 0; i < ni; ++i) {
    m(i, i) = rng.normal(sd_diag);
    for (Eigen::Index j = i + 1; j < ni; ++j) {
      const double re = rng.normal(sd_re);
      const double im = rng.normal(sd_im);
      m(i, j) = Complex(re, im);
      m(j, i) = Complex(re, -im);
    }
  }
  return ordered_eigenvalues(HermitianMatrix(m));
}

Trajectory simulate_dyson(const SDEConfig& cfg, double t_end, RngStream& rng) {
  cfg.validate();
  if (!(t_end > 0.0)) throw std::invalid_argument("simulate_dyson: t_end must be positive");
  Integrator integ(
      cfg,
      [](double, std::span<const double> x, std::span<double> out) {
        const auto b = dyson_drift(x);
        std::copy(b.begin(), b.end(), out.begin());
      },
      rng);

  if (cfg.start == StartMode::Interior) return integ.run(t_end, cfg.start_point, 0.0);

  const double t1 = std::min(cfg.step(), t_end);
  const WeylVector first = ordered_eigenvalues(sample_gue(cfg.n, t1, rng));
  Trajectory tail = integ.run(t_end, std::vector<double>(first.coords().begin(), first.coords().end()), t1);
  tail.times.insert(tail.times.begin(), 0.0);
  tail.states.insert(tail.states.begin(), WeylVector::origin(cfg.n));
  return tail;
}

Trajectory simulate_noncolliding_T(const SDEConfig& cfg, double t_end, RngStream& rng) {
  cfg.validate();
  const double horizon = cfg.horizon;
  if (!(t_end > 0.0) || t_end > horizon) {
    throw std::invalid_argument("simulate_noncolliding_T: requires 0 < t_end <= T");
  }
  const double dt = cfg.step();
  // Drift frozen at the penultimate grid time once within one step of T.
  const double last_drift_time = std::max(0.0, horizon - dt);
  Integrator integ(
      cfg,
      [&](double t, std::span<const double> x, std::span<double> out) {
        const double h = cfg.fd_step > 0.0 ? cfg.fd_step : default_fd_step(x);
        const auto b = drift_bT(std::min(t, last_drift_time), x, horizon, h);
        std::copy(b.begin(), b.end(), out.begin());
      },
      rng);

  if (cfg.start == StartMode::Interior) return integ.run(t_end, cfg.start_point, 0.0);

  const double t1 = std::min(dt, t_end);
  const WeylVector first = sample_xit_eigenvalues(cfg.n, t1, horizon, rng);
  Trajectory tail = integ.run(t_end, std::vector<double>(first.coords().begin(), first.coords().end()), t1);
  tail.times.insert(tail.times.begin(), 0.0);
  tail.states.insert(tail.states.begin(), WeylVector::origin(cfg.n));
  return tail;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr, bool header) {
  const std::size_t n = tr.states.empty() ? 0 : tr.states.front().size();
  if (header) {
    out << "time";
    for (std::size_t i = 0; i < n; ++i) out << ",x" << i + 1;
    out << '\n';
  }
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    out << format_double(tr.times[k]);
    for (double v : tr.states[k].coords()) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace ncbm
