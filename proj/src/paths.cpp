#include "ncbm/paths.hpp"

#include "ncbm/format.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ncbm {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2 = 1.41421356237309504880;

// Substream layout inside one replicate stream.
constexpr std::uint64_t kRealDriverBase = 0;
constexpr std::uint64_t kImagDriverBase = 1u << 20;

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_within_horizon(const TimeGrid& grid, double horizon, const char* what) {
  if (grid.size() == 0) throw std::invalid_argument(std::string(what) + ": empty grid");
  if (grid.times().back() > horizon) throw std::invalid_argument(std::string(what) + ": grid time beyond T");
}

}  // namespace

// ---------------------------------------------------------------------------
// TimeGrid

TimeGrid::TimeGrid(std::vector<double> times, double horizon) : times_(std::move(times)), horizon_(horizon) {
  if (times_.empty()) throw std::invalid_argument("TimeGrid: empty grid");
  if (times_.front() != 0.0) throw std::invalid_argument("TimeGrid: must start at 0");
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k] > times_[k - 1])) throw std::invalid_argument("TimeGrid: times must increase strictly");
    mesh_ = std::max(mesh_, times_[k] - times_[k - 1]);
  }
  if (!(horizon_ > 0.0) || times_.back() > horizon_) throw std::invalid_argument("TimeGrid: last time exceeds T");
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("TimeGrid::uniform: steps must be positive");
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
  t.back() = horizon;
  return TimeGrid(std::move(t), horizon);
}

std::optional<std::size_t> TimeGrid::index_of(double t) const {
  const double tol = 1e-12 * std::max(1.0, horizon_);
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (std::abs(times_[k] - t) <= tol) return k;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Scalar drivers

ScalarPath sample_brownian(const TimeGrid& grid, RngStream& rng) {
  if (grid.size() == 0) throw std::invalid_argument("sample_brownian: empty grid");
  ScalarPath p{grid, std::vector<double>(grid.size(), 0.0)};
  for (std::size_t k = 1; k < grid.size(); ++k) {
    p.values[k] = p.values[k - 1] + rng.normal(std::sqrt(grid[k] - grid[k - 1]));
  }
  return p;
}

ScalarPath sample_bridge(const TimeGrid& grid, double horizon, double endpoint, RngStream& rng) {
  require_within_horizon(grid, horizon, "sample_bridge");
  ScalarPath p{grid, std::vector<double>(grid.size(), 0.0)};
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double prev = p.values[k - 1];
    const double remaining = horizon - grid[k - 1];
    const double dt = grid[k] - grid[k - 1];
    if (grid[k] == horizon) {
      p.values[k] = endpoint;
      continue;
    }
    const double mean = prev + (endpoint - prev) * dt / remaining;
    const double var = dt * (horizon - grid[k]) / remaining;
    p.values[k] = mean + rng.normal(std::sqrt(var));
  }
  return p;
}

std::size_t packed_index(std::size_t n, std::size_t i, std::size_t j) {
  // rows 0..i-1 hold n, n-1, ..., n-i+1 entries
  return i * n - i * (i - 1) / 2 + (j - i);
}

std::size_t strict_packed_index(std::size_t n, std::size_t i, std::size_t j) {
  return i * (n - 1) - i * (i - 1) / 2 + (j - i - 1);
}

// ---------------------------------------------------------------------------
// Matrix processes

namespace {

MatrixPath assemble(std::size_t n, const TimeGrid& grid, const std::vector<ScalarPath>& real,
                    const std::vector<ScalarPath>* imag) {
  MatrixPath mp{grid, {}};
  mp.values.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    ComplexMatrix m = ComplexMatrix::Zero(ix(n), ix(n));
    for (std::size_t i = 0; i < n; ++i) {
      m(ix(i), ix(i)) = real[packed_index(n, i, i)].values[k];
      for (std::size_t j = i + 1; j < n; ++j) {
        const double re = kInvSqrt2 * real[packed_index(n, i, j)].values[k];
        const double im = imag ? kInvSqrt2 * (*imag)[strict_packed_index(n, i, j)].values[k] : 0.0;
        m(ix(i), ix(j)) = Complex(re, im);
        m(ix(j), ix(i)) = Complex(re, -im);
      }
    }
    mp.values.emplace_back(m);
  }
  return mp;
}

std::vector<ScalarPath> real_brownian_drivers(std::size_t n, const TimeGrid& grid, RngStream& rng) {
  std::vector<ScalarPath> out;
  out.reserve(n * (n + 1) / 2);
  for (std::size_t d = 0; d < n * (n + 1) / 2; ++d) {
    RngStream s = rng.substream(kRealDriverBase + d);
    out.push_back(sample_brownian(grid, s));
  }
  return out;
}

}  // namespace

XiTDrivers sample_xit_drivers(std::size_t n, const TimeGrid& grid, double horizon, RngStream& rng) {
  require_within_horizon(grid, horizon, "sample_xit_drivers");
  XiTDrivers d;
  d.n = n;
  d.horizon = horizon;
  d.grid = grid;
  const std::size_t n_real = n * (n + 1) / 2;
  d.real.reserve(n_real);
  d.real_endpoint.reserve(n_real);
  for (std::size_t k = 0; k < n_real; ++k) {
    RngStream s = rng.substream(kRealDriverBase + k);
    ScalarPath b = sample_brownian(grid, s);
    const double last_t = grid.times().back();
    const double end = last_t == horizon ? b.values.back() : b.values.back() + s.normal(std::sqrt(horizon - last_t));
    d.real.push_back(std::move(b));
    d.real_endpoint.emplace_back(end);
  }
  for (std::size_t k = 0; k < n * (n - 1) / 2; ++k) {
    RngStream s = rng.substream(kImagDriverBase + k);
    d.imag.push_back(sample_bridge(grid, horizon, 0.0, s));
  }
  return d;
}

MatrixPath assemble_xit(const XiTDrivers& drivers) {
  return assemble(drivers.n, drivers.grid, drivers.real, &drivers.imag);
}

MatrixPath build_matrix_process(MatrixModel kind, std::size_t n, const TimeGrid& grid, double horizon,
                                RngStream& rng) {
  if (n == 0) throw std::invalid_argument("build_matrix_process: N must be positive");
  switch (kind) {
    case MatrixModel::GUE: {
      auto real = real_brownian_drivers(n, grid, rng);
      std::vector<ScalarPath> imag;
      for (std::size_t k = 0; k < n * (n - 1) / 2; ++k) {
        RngStream s = rng.substream(kImagDriverBase + k);
        imag.push_back(sample_brownian(grid, s));
      }
      return assemble(n, grid, real, &imag);
    }
    case MatrixModel::GOE:
      return assemble(n, grid, real_brownian_drivers(n, grid, rng), nullptr);
    case MatrixModel::XiT:
      return assemble_xit(sample_xit_drivers(n, grid, horizon, rng));
  }
  throw std::invalid_argument("build_matrix_process: invalid kind");
}

MatrixPath build_pinned_process(std::size_t n, const TimeGrid& grid, double horizon, const HermitianMatrix& h,
                                RngStream& rng) {
  if (h.size() != n) throw std::invalid_argument("build_pinned_process: H has the wrong dimension");
  require_within_horizon(grid, horizon, "build_pinned_process");
  std::vector<ScalarPath> real;
  std::vector<ScalarPath> imag;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      RngStream s = rng.substream(kRealDriverBase + packed_index(n, i, j));
      const double target = i == j ? h(i, i).real() : kSqrt2 * h(i, j).real();
      real.push_back(sample_bridge(grid, horizon, target, s));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      RngStream s = rng.substream(kImagDriverBase + strict_packed_index(n, i, j));
      imag.push_back(sample_bridge(grid, horizon, kSqrt2 * h(i, j).imag(), s));
    }
  }
  MatrixPath mp = assemble(n, grid, real, &imag);
  if (grid.ends_at_horizon()) mp.values.back() = h;  // exact pinning
  return mp;
}

std::pair<MatrixPath, MatrixPath> theta_decomposition(const XiTDrivers& drivers) {
  const std::size_t n = drivers.n;
  for (const auto& e : drivers.real_endpoint) {
    if (!e) throw std::invalid_argument("theta_decomposition: missing B^R(T) endpoint");
  }
  std::vector<ScalarPath> bridge_part;
  std::vector<ScalarPath> endpoint_part;
  for (std::size_t k = 0; k < drivers.real.size(); ++k) {
    const ScalarPath& b = drivers.real[k];
    const double end = *drivers.real_endpoint[k];
    ScalarPath p1{b.grid, b.values};
    ScalarPath p2{b.grid, std::vector<double>(b.values.size())};
    for (std::size_t s = 0; s < b.values.size(); ++s) {
      const double drift = b.grid[s] / drivers.horizon * end;
      p2.values[s] = drift;
      p1.values[s] = b.values[s] - drift;
    }
    bridge_part.push_back(std::move(p1));
    endpoint_part.push_back(std::move(p2));
  }
  MatrixPath theta1 = assemble(n, drivers.grid, bridge_part, &drivers.imag);
  MatrixPath theta2 = assemble(n, drivers.grid, endpoint_part, nullptr);
  return {std::move(theta1), std::move(theta2)};
}

std::vector<WeylVector> eigenvalue_path(const MatrixPath& mp) {
  std::vector<WeylVector> out;
  out.reserve(mp.values.size());
  for (const auto& h : mp.values) out.push_back(ordered_eigenvalues(h));
  return out;
}

HermitianMatrix sample_gue(std::size_t n, double t, RngStream& rng) {
  ComplexMatrix m = ComplexMatrix::Zero(ix(n), ix(n));
  const double sd = std::sqrt(t);
  const double off = std::sqrt(0.5 * t);
  for (std::size_t i = 0; i < n; ++i) {
    m(ix(i), ix(i)) = rng.normal(sd);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double re = rng.normal(off);
      const double im = rng.normal(off);
      m(ix(i), ix(j)) = Complex(re, im);
      m(ix(j), ix(i)) = Complex(re, -im);
    }
  }
  return HermitianMatrix(m);
}

SymmetricMatrix sample_goe(std::size_t n, double t, RngStream& rng) {
  RealMatrix m = RealMatrix::Zero(ix(n), ix(n));
  const double sd = std::sqrt(t);
  const double off = std::sqrt(0.5 * t);
  for (std::size_t i = 0; i < n; ++i) {
    m(ix(i), ix(i)) = rng.normal(sd);
    for (std::size_t j = i + 1; j < n; ++j) {
      m(ix(i), ix(j)) = m(ix(j), ix(i)) = rng.normal(off);
    }
  }
  return SymmetricMatrix(m);
}

void write_matrix_path_csv(std::ostream& out, const MatrixPath& mp, bool header) {
  const std::size_t n = mp.values.empty() ? 0 : mp.values.front().size();
  if (header) {
    out << "time";
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out << ",re_" << i + 1 << "_" << j + 1 << ",im_" << i + 1 << "_" << j + 1;
    }
    out << '\n';
  }
  for (std::size_t k = 0; k < mp.values.size(); ++k) {
    out << format_double(mp.grid[k]);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Complex z = mp.values[k](i, j);
        out << ',' << format_double(z.real()) << ',' << format_double(z.imag());
      }
    }
    out << '\n';
  }
}

}  // namespace ncbm
