#include "ncbm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ncbm {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_square(Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (rows != cols) {
    throw std::invalid_argument(std::string(what) + ": matrix is not square (" +
                                std::to_string(rows) + "x" + std::to_string(cols) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// WeylVector

WeylVector WeylVector::ordered(std::vector<double> coords) {
  for (std::size_t i = 1; i < coords.size(); ++i) {
    if (!(coords[i - 1] <= coords[i])) {
      throw std::invalid_argument("WeylVector: coordinates are not ordered");
    }
  }
  return WeylVector(std::move(coords));
}

WeylVector WeylVector::strict(std::vector<double> coords) {
  for (std::size_t i = 1; i < coords.size(); ++i) {
    if (!(coords[i - 1] < coords[i])) {
      throw std::invalid_argument("WeylVector: coordinates are not strictly ordered");
    }
  }
  return WeylVector(std::move(coords));
}

WeylVector WeylVector::sorted(std::vector<double> coords) {
  std::sort(coords.begin(), coords.end());
  return WeylVector(std::move(coords));
}

WeylVector WeylVector::origin(std::size_t n) { return WeylVector(std::vector<double>(n, 0.0)); }

bool WeylVector::is_strict() const noexcept {
  for (std::size_t i = 1; i < coords_.size(); ++i) {
    if (!(coords_[i - 1] < coords_[i])) return false;
  }
  return true;
}

bool WeylVector::is_origin() const noexcept {
  return std::all_of(coords_.begin(), coords_.end(), [](double v) { return v == 0.0; });
}

double WeylVector::min_gap() const noexcept {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < coords_.size(); ++i) gap = std::min(gap, coords_[i] - coords_[i - 1]);
  return gap;
}

double WeylVector::squared_norm() const noexcept {
  double s = 0.0;
  for (double v : coords_) s += v * v;
  return s;
}

// ---------------------------------------------------------------------------
// Matrix wrappers

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m, double tol) {
  require_square(m.rows(), m.cols(), "HermitianMatrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol * scale) {
        throw std::invalid_argument("HermitianMatrix: input is not Hermitian");
      }
    }
  }
  m_ = m;
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    m_(i, i) = Complex(m_(i, i).real(), 0.0);
    for (Eigen::Index j = i + 1; j < m_.cols(); ++j) m_(j, i) = std::conj(m_(i, j));
  }
}

HermitianMatrix HermitianMatrix::zero(std::size_t n) {
  return HermitianMatrix(ComplexMatrix::Zero(idx(n), idx(n)));
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> d) {
  ComplexMatrix m = ComplexMatrix::Zero(idx(d.size()), idx(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(idx(i), idx(i)) = d[i];
  return HermitianMatrix(m);
}

HermitianMatrix HermitianMatrix::from_real(const RealMatrix& m, double tol) {
  return HermitianMatrix(m.cast<Complex>(), tol);
}

HermitianMatrix HermitianMatrix::conjugated(const ComplexMatrix& u) const {
  // round-off breaks exact Hermiticity; symmetrize before re-validating
  ComplexMatrix c = u.adjoint() * m_ * u;
  ComplexMatrix sym = 0.5 * (c + c.adjoint());
  return HermitianMatrix(sym);
}

double HermitianMatrix::trace() const { return m_.trace().real(); }

double HermitianMatrix::trace_square() const { return m_.squaredNorm(); }

double HermitianMatrix::max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

bool HermitianMatrix::is_real(double tol) const {
  return m_.size() == 0 || m_.imag().cwiseAbs().maxCoeff() <= tol;
}

SymmetricMatrix::SymmetricMatrix(const RealMatrix& m, double tol) {
  require_square(m.rows(), m.cols(), "SymmetricMatrix");
  const double scale = std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
  if (m.size() && (m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw std::invalid_argument("SymmetricMatrix: input is not symmetric");
  }
  m_ = 0.5 * (m + m.transpose());
}

SkewMatrix::SkewMatrix(const RealMatrix& m, double tol) {
  require_square(m.rows(), m.cols(), "SkewMatrix");
  const double scale = std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
  if (m.size() && (m + m.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw std::invalid_argument("SkewMatrix: input is not skew-symmetric");
  }
  m_ = 0.5 * (m - m.transpose());
}

// ---------------------------------------------------------------------------
// Kernels

double vandermonde(std::span<const double> x) {
  double p = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) p *= (x[j] - x[i]);
  }
  return p;
}

double heat_kernel(double t, double x, double y) {
  if (!(t > 0.0)) throw std::domain_error("heat_kernel: t must be positive");
  const double d = y - x;
  return std::exp(-d * d / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

WeylVector ordered_eigenvalues(const HermitianMatrix& h) {
  if (h.size() == 0) return WeylVector::ordered({});
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("ordered_eigenvalues: solver failed");
  const auto& ev = solver.eigenvalues();
  // Eigen returns ascending values
  return WeylVector::sorted(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

EigenDecomposition eigen_decompose(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen_decompose: solver failed");
  const auto& ev = solver.eigenvalues();
  return {WeylVector::sorted(std::vector<double>(ev.data(), ev.data() + ev.size())),
          solver.eigenvectors()};
}

double pfaffian(const SkewMatrix& skew) {
  const Eigen::Index n = static_cast<Eigen::Index>(skew.size());
  if (n % 2 != 0) throw std::invalid_argument("pfaffian: odd dimension");
  if (n == 0) return 1.0;

  RealMatrix a = skew.matrix();
  double pf = 1.0;
  for (Eigen::Index k = 0; k < n - 1; k += 2) {
    // pivot: largest entry in column k below the subdiagonal
    Eigen::Index rel = 0;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&rel);
    const Eigen::Index kp = k + 1 + rel;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    const double pivot = a(k, k + 1);
    if (pivot == 0.0) return 0.0;
    pf *= pivot;
    if (k + 2 < n) {
      const Eigen::Index m = n - k - 2;
      const Eigen::VectorXd tau = a.row(k).segment(k + 2, m).transpose() / pivot;
      const Eigen::VectorXd col = a.col(k + 1).segment(k + 2, m);
      a.block(k + 2, k + 2, m, m) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

double determinant(const RealMatrix& m) {
  require_square(m.rows(), m.cols(), "determinant");
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<RealMatrix>(m).determinant();
}

Complex determinant(const ComplexMatrix& m) {
  require_square(m.rows(), m.cols(), "determinant");
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<ComplexMatrix>(m).determinant();
}

}  // namespace ncbm
