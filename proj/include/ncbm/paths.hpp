#pragma once

#include "ncbm/linalg.hpp"
#include "ncbm/rng.hpp"

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace ncbm {

/// Strictly increasing times starting at 0, all within [0, horizon].
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(std::vector<double> times, double horizon);

  /// steps + 1 equally spaced times on [0, horizon].
  static TimeGrid uniform(double horizon, std::size_t steps);

  std::size_t size() const noexcept { return times_.size(); }
  double operator[](std::size_t k) const { return times_[k]; }
  const std::vector<double>& times() const noexcept { return times_; }
  double horizon() const noexcept { return horizon_; }
  double mesh() const noexcept { return mesh_; }
  bool ends_at_horizon() const noexcept { return !times_.empty() && times_.back() == horizon_; }
  /// Index of a grid time equal to t (within 1e-12 relative), if any.
  std::optional<std::size_t> index_of(double t) const;

 private:
  std::vector<double> times_;
  double horizon_ = 0.0;
  double mesh_ = 0.0;
};

struct ScalarPath {
  TimeGrid grid;
  std::vector<double> values;
};

struct MatrixPath {
  TimeGrid grid;
  std::vector<HermitianMatrix> values;
};

enum class MatrixModel { GUE, GOE, XiT };

/// Standard Brownian motion on the grid, B(0) = 0.
ScalarPath sample_brownian(const TimeGrid& grid, RngStream& rng);

/// Brownian bridge of duration T from 0 to `endpoint`, sampled by exact
/// Gaussian conditioning along the grid.
ScalarPath sample_bridge(const TimeGrid& grid, double horizon, double endpoint, RngStream& rng);

/// Independent scalar drivers of one realization of the finite-horizon
/// process: real parts B^R_ij (i <= j), imaginary bridges beta_ij (i < j)
/// pinned at 0 at time T, and B^R_ij(T).
struct XiTDrivers {
  std::size_t n = 0;
  double horizon = 0.0;
  TimeGrid grid;
  std::vector<ScalarPath> real;                     // packed upper triangle incl. diagonal
  std::vector<ScalarPath> imag;                     // packed strict upper triangle
  std::vector<std::optional<double>> real_endpoint; // B^R_ij(T), packed like `real`
};

/// Row-major index of (i, j), i <= j, in the packed upper triangle.
std::size_t packed_index(std::size_t n, std::size_t i, std::size_t j);
/// Row-major index of (i, j), i < j, in the packed strict upper triangle.
std::size_t strict_packed_index(std::size_t n, std::size_t i, std::size_t j);

XiTDrivers sample_xit_drivers(std::size_t n, const TimeGrid& grid, double horizon, RngStream& rng);
MatrixPath assemble_xit(const XiTDrivers& drivers);

/// Matrix-valued process of the given model. Every scalar driver uses its own
/// substream of `rng`, so the result depends only on rng's key.
MatrixPath build_matrix_process(MatrixModel kind, std::size_t n, const TimeGrid& grid, double horizon,
                                RngStream& rng);

/// Process pinned at H at time T: each real/imaginary component is an
/// independent bridge to the matching entry (off-diagonal components end at
/// sqrt(2) times the entry before the 1/sqrt(2) scaling).
MatrixPath build_pinned_process(std::size_t n, const TimeGrid& grid, double horizon, const HermitianMatrix& h,
                                RngStream& rng);

/// Splits a realization into Theta1 (bridge parts) and Theta2 ((t/T) B^R(T)).
/// Throws if any B^R(T) is missing.
std::pair<MatrixPath, MatrixPath> theta_decomposition(const XiTDrivers& drivers);

std::vector<WeylVector> eigenvalue_path(const MatrixPath& mp);

/// Samples a single GUE(t) or GOE(t) matrix.
HermitianMatrix sample_gue(std::size_t n, double t, RngStream& rng);
SymmetricMatrix sample_goe(std::size_t n, double t, RngStream& rng);

/// CSV: time, then entries row-major with real/imag interleaved.
void write_matrix_path_csv(std::ostream& out, const MatrixPath& mp, bool header = true);

}  // namespace ncbm
