#pragma once

#include "ncbm/linalg.hpp"
#include "ncbm/rng.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace ncbm {

enum class StartMode { OriginBootstrap, Interior };

struct SDEConfig {
  std::size_t n = 2;
  double horizon = 1.0;                 // T of the finite-horizon system
  double dt = 0.0;                      // 0: horizon / 1024
  StartMode start = StartMode::OriginBootstrap;
  std::vector<double> start_point;      // Interior mode only, strictly ordered
  double min_gap = 1e-8;                // collision guard threshold
  double drift_fraction = 0.5;          // reject steps whose drift move exceeds this share of the smallest gap; 0 disables
  int max_halvings = 50;                // nested bridge refinements per step
  double fd_step = 0.0;                 // 0: 1e-4 * (1 + |x|_inf)

  double step() const { return dt > 0.0 ? dt : horizon / 1024.0; }
  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<WeylVector> states;
  bool failed = false;           // guard exhausted; path truncated at the failing step
  std::size_t halvings = 0;      // guard sub-steps taken
};

/// Sum_{j != i} 1 / (x_i - x_j).
std::vector<double> dyson_drift(std::span<const double> x);

/// Gradient of ln N_N(T - t, x) by central differences with step h
/// (shrunk so that perturbed points stay ordered). Requires t < T.
std::vector<double> drift_bT(double t, std::span<const double> x, double horizon, double h);

/// Euler-Maruyama for Dyson's model up to t_end.
Trajectory simulate_dyson(const SDEConfig& cfg, double t_end, RngStream& rng);

/// Euler-Maruyama for the system conditioned not to collide on (0, T],
/// t_end <= T.
Trajectory simulate_noncolliding_T(const SDEConfig& cfg, double t_end, RngStream& rng);

/// Ordered eigenvalues of one draw of the finite-horizon matrix at time t:
/// diagonal N(0, t), off-diagonal real N(0, t/2), imaginary N(0, t (T - t) / (2T)).
WeylVector sample_xit_eigenvalues(std::size_t n, double t, double horizon, RngStream& rng);

/// CSV with header time,x1..xN.
void write_trajectory_csv(std::ostream& out, const Trajectory& tr, bool header = true);

}  // namespace ncbm
