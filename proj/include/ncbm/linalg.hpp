#pragma once

#include <Eigen/Dense>

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace ncbm {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Point of the closed Weyl chamber x_1 <= x_2 <= ... <= x_N.
///
/// `ordered` accepts ties, `strict` rejects them. Both reject unsorted input;
/// use `sorted` to sort arbitrary coordinates first.
class WeylVector {
 public:
  WeylVector() = default;

  static WeylVector ordered(std::vector<double> coords);
  static WeylVector strict(std::vector<double> coords);
  static WeylVector sorted(std::vector<double> coords);
  static WeylVector origin(std::size_t n);

  std::size_t size() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

  bool is_strict() const noexcept;
  bool is_origin() const noexcept;
  double min_gap() const noexcept;
  double squared_norm() const noexcept;

  friend bool operator==(const WeylVector&, const WeylVector&) = default;

 private:
  explicit WeylVector(std::vector<double> coords) : coords_(std::move(coords)) {}
  std::vector<double> coords_;
};

/// Dense complex Hermitian matrix. Construction enforces exact Hermiticity
/// (the lower triangle is rebuilt from the upper one after a tolerance check).
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& m, double tol = 1e-12);

  static HermitianMatrix zero(std::size_t n);
  static HermitianMatrix diagonal(std::span<const double> d);
  static HermitianMatrix from_real(const RealMatrix& m, double tol = 1e-12);

  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  Complex operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  /// U^dagger H U for a unitary U.
  HermitianMatrix conjugated(const ComplexMatrix& u) const;
  double trace() const;
  double trace_square() const;
  double max_abs() const;
  bool is_real(double tol = 0.0) const;

 private:
  ComplexMatrix m_;
};

class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const RealMatrix& m, double tol = 1e-12);

  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const RealMatrix& matrix() const noexcept { return m_; }
  double trace_square() const { return m_.squaredNorm(); }
  HermitianMatrix as_hermitian() const { return HermitianMatrix::from_real(m_); }

 private:
  RealMatrix m_;
};

/// Real skew-symmetric matrix with zero diagonal.
class SkewMatrix {
 public:
  SkewMatrix() = default;
  explicit SkewMatrix(const RealMatrix& m, double tol = 1e-12);
  /// Builds the skew matrix from its strict upper triangle, `upper(i, j)` for i < j.
  template <class F>
  static SkewMatrix from_upper(std::size_t n, F&& upper) {
    RealMatrix m = RealMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double a = upper(i, j);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a;
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = -a;
      }
    }
    SkewMatrix s;
    s.m_ = std::move(m);
    return s;
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const RealMatrix& matrix() const noexcept { return m_; }

 private:
  RealMatrix m_;
};

struct Tolerances {
  double hermitian = 1e-12;
  double eigen_residual = 1e-9;
  double pfaffian_relative = 1e-8;
  double determinant_relative = 1e-10;
};

/// prod_{i<j} (x_j - x_i).
double vandermonde(std::span<const double> x);
inline double vandermonde(const WeylVector& x) { return vandermonde(x.coords()); }

/// Gaussian heat kernel G_t(x, y). Throws for t <= 0.
double heat_kernel(double t, double x, double y);

WeylVector ordered_eigenvalues(const HermitianMatrix& h);

struct EigenDecomposition {
  WeylVector values;
  ComplexMatrix vectors;  // columns, matching `values`
};
EigenDecomposition eigen_decompose(const HermitianMatrix& h);

/// Pfaffian by Parlett-Reid skew tridiagonalization with partial pivoting.
/// Throws std::invalid_argument for odd dimension.
double pfaffian(const SkewMatrix& a);

double determinant(const RealMatrix& m);
Complex determinant(const ComplexMatrix& m);

}  // namespace ncbm
