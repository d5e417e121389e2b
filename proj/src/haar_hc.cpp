#include "ncbm/haar_hc.hpp"

#include "ncbm/densities.hpp"
#include "ncbm/parallel.hpp"
#include "ncbm/paths.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace ncbm {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

MCEstimate parallel_mean(std::size_t samples, std::uint64_t seed,
                         const std::function<double(RngStream&)>& draw) {
  std::vector<double> values(samples);
  parallel_for(samples, [&](std::size_t k) {
    RngStream rng(seed, k);
    values[k] = draw(rng);
  });
  return estimate_mean(values);
}

}  // namespace

ComplexMatrix sample_haar_unitary(std::size_t n, RngStream& rng) {
  ComplexMatrix z(ix(n), ix(n));
  const double sd = std::sqrt(0.5);
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double re = rng.normal(sd);
      const double im = rng.normal(sd);
      z(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const Complex d = r(i, i);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(i) *= d / mag;
  }
  return q;
}

RealMatrix sample_haar_orthogonal(std::size_t n, RngStream& rng) {
  RealMatrix z(ix(n), ix(n));
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<RealMatrix> qr(z);
  RealMatrix q = qr.householderQ();
  const RealMatrix& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Harish-Chandra identity

HCQuery HCQuery::make(std::vector<double> x, std::vector<double> y, double sigma, std::size_t samples) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("HCQuery: x and y must have the same positive size");
  if (!(sigma > 0.0)) throw std::invalid_argument("HCQuery: sigma must be positive");
  if (samples == 0) throw std::invalid_argument("HCQuery: samples must be >= 1");
  return HCQuery{WeylVector::strict(std::move(x)), WeylVector::strict(std::move(y)), sigma, samples};
}

double hc_integrand(const WeylVector& x, const WeylVector& y, double sigma, const ComplexMatrix& u) {
  const std::size_t n = x.size();
  ComplexMatrix ly = ComplexMatrix::Zero(ix(n), ix(n));
  for (std::size_t i = 0; i < n; ++i) ly(ix(i), ix(i)) = y[i];
  ComplexMatrix m = -(u.adjoint() * ly * u);
  for (std::size_t i = 0; i < n; ++i) m(ix(i), ix(i)) += x[i];
  // Tr M^2 = ||M||_F^2 for Hermitian M
  return std::exp(-m.squaredNorm() / (2.0 * sigma * sigma));
}

MCEstimate hc_lhs(const HCQuery& q, std::uint64_t seed) {
  return parallel_mean(q.samples, seed, [&](RngStream& rng) {
    return hc_integrand(q.x, q.y, q.sigma, sample_haar_unitary(q.x.size(), rng));
  });
}

double hc_rhs(const HCQuery& q) {
  const std::size_t n = q.x.size();
  const double s2 = q.sigma * q.sigma;
  RealMatrix g(ix(n), ix(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) g(ix(i), ix(j)) = heat_kernel(s2, q.x[i], q.y[j]);
  }
  const double nn = static_cast<double>(n * n);
  return constants(n).c1 * std::pow(q.sigma, nn) / (vandermonde(q.x) * vandermonde(q.y)) * determinant(g);
}

// ---------------------------------------------------------------------------
// GOE * GUE convolution

ConvolutionParams ConvolutionParams::from(double horizon, double t) {
  if (!(t > 0.0) || !(t < horizon)) throw std::domain_error("convolution: requires 0 < t < T");
  return {t * (horizon - t) / horizon, horizon / (t * t)};
}

MCEstimate convolution_mc(const HermitianMatrix& h, double horizon, double t, std::size_t samples,
                          std::uint64_t seed) {
  const auto p = ConvolutionParams::from(horizon, t);
  const std::size_t n = h.size();
  return parallel_mean(samples, seed, [&](RngStream& rng) {
    const SymmetricMatrix a = sample_goe(n, 1.0 / p.alpha, rng);
    const ComplexMatrix diff = h.matrix() - a.matrix().cast<Complex>();
    return gue_density_from_trace(n, diff.squaredNorm(), p.sigma2);
  });
}

namespace {

// Quadrature node on O(N): diagonal of V^T Re(H) V and the Haar weight.
struct FrameNode {
  std::array<double, 3> b{};
  double w = 0.0;
};

std::vector<FrameNode> frame_nodes(const RealMatrix& re_h, int level) {
  const std::size_t n = static_cast<std::size_t>(re_h.rows());
  std::vector<FrameNode> nodes;
  auto push = [&](const RealMatrix& v, double w) {
    FrameNode node;
    node.w = w;
    for (std::size_t k = 0; k < n; ++k) {
      const Eigen::VectorXd col = v.col(ix(k));
      node.b[k] = col.dot(re_h * col);
    }
    nodes.push_back(node);
  };
  if (n == 1) {
    push(RealMatrix::Identity(1, 1), 1.0);
  } else if (n == 2) {
    // conjugation by a rotation has period pi in the angle
    const int k_count = 32 << level;
    for (int k = 0; k < k_count; ++k) {
      const double th = kPi * k / k_count;
      RealMatrix v(2, 2);
      v << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      push(v, 1.0 / k_count);
    }
  } else if (n == 3) {
    const int k_count = 8 << level;
    std::vector<double> beta_nodes;
    std::vector<double> beta_weights;
    composite_gauss_nodes(0.0, kPi, 1 << level, beta_nodes, beta_weights);
    auto rz = [](double a) {
      RealMatrix r(3, 3);
      r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
      return r;
    };
    auto ry = [](double a) {
      RealMatrix r(3, 3);
      r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
      return r;
    };
    for (int i = 0; i < k_count; ++i) {
      const RealMatrix a = rz(2.0 * kPi * i / k_count);
      for (std::size_t jb = 0; jb < beta_nodes.size(); ++jb) {
        const RealMatrix ab = a * ry(beta_nodes[jb]);
        const double wb = beta_weights[jb] * std::sin(beta_nodes[jb]) / 2.0;
        for (int k = 0; k < k_count; ++k) {
          push(ab * rz(2.0 * kPi * k / k_count), wb / (static_cast<double>(k_count) * k_count));
        }
      }
    }
  } else {
    throw std::invalid_argument("convolution_closed_form: N <= 3 only");
  }
  return nodes;
}

double closed_form_level(const HermitianMatrix& h, const ConvolutionParams& p, int level) {
  const std::size_t n = h.size();
  const double nd = static_cast<double>(n);
  const auto c = constants(n);
  const RealMatrix re_h = h.matrix().real();
  const auto nodes = frame_nodes(re_h, level);
  const double tr_h2 = h.trace_square();
  const double inv2s = 1.0 / (2.0 * p.sigma2);

  const double curvature = p.alpha + 1.0 / p.sigma2;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(re_h, Eigen::EigenvaluesOnly);
  const double spectral = es.eigenvalues().cwiseAbs().maxCoeff();
  const double reach = spectral / (p.sigma2 * curvature) + (8.0 + 2.0 * std::sqrt(nd)) / std::sqrt(curvature);

  const double prefactor = std::pow(p.sigma2, -0.5 * nd * nd) * std::pow(p.alpha, 0.25 * nd * (nd + 1.0)) / (c.c3 * c.c2);
  const int panels = 2 << level;
  const double integral = integrate_ordered_fixed(
      std::vector<OrderedSegment>{{n, -reach, reach}}, panels, [&](std::span<const double> a) {
        double a2 = 0.0;
        for (double v : a) a2 += v * v;
        const double base = -0.5 * p.alpha * a2 - (tr_h2 + a2) * inv2s;
        double avg = 0.0;
        for (const auto& node : nodes) {
          double tilt = 0.0;
          for (std::size_t k = 0; k < n; ++k) tilt += a[k] * node.b[k];
          avg += node.w * std::exp(base + 2.0 * tilt * inv2s);
        }
        return vandermonde(a) * avg;
      });
  return prefactor * integral;
}

}  // namespace

double convolution_closed_form(const HermitianMatrix& h, double horizon, double t, double* error) {
  const auto p = ConvolutionParams::from(horizon, t);
  const std::size_t n = h.size();
  if (n == 0 || n > 3) throw std::invalid_argument("convolution_closed_form: N <= 3 only");
  const int max_level = n == 3 ? 1 : 4;
  double prev = closed_form_level(h, p, 0);
  double cur = prev;
  for (int level = 1; level <= max_level; ++level) {
    cur = closed_form_level(h, p, level);
    const double diff = std::abs(cur - prev);
    if (error) *error = diff;
    if (diff <= 1e-10 * std::abs(cur)) break;
    prev = cur;
  }
  return cur;
}

ConvolutionResult convolution_density(const HermitianMatrix& h, double horizon, double t, std::size_t samples,
                                      std::uint64_t seed) {
  ConvolutionResult r;
  r.params = ConvolutionParams::from(horizon, t);
  r.mc = convolution_mc(h, horizon, t, samples, seed);
  r.closed_form = convolution_closed_form(h, horizon, t, &r.closed_form_error);
  return r;
}

MCEstimate unitary_averaged_eigen_density(const WeylVector& y, double horizon, double t, std::size_t samples,
                                          std::uint64_t seed) {
  const auto p = ConvolutionParams::from(horizon, t);
  const std::size_t n = y.size();
  const auto c = constants(n);
  const double hy = vandermonde(y);
  const double scale = c.c3 / c.c1 * hy * hy;
  ComplexMatrix ly = ComplexMatrix::Zero(ix(n), ix(n));
  for (std::size_t i = 0; i < n; ++i) ly(ix(i), ix(i)) = y[i];
  return parallel_mean(samples, seed, [&](RngStream& rng) {
    const ComplexMatrix u = sample_haar_unitary(n, rng);
    const SymmetricMatrix a = sample_goe(n, 1.0 / p.alpha, rng);
    const ComplexMatrix diff = u.adjoint() * ly * u - a.matrix().cast<Complex>();
    return scale * gue_density_from_trace(n, diff.squaredNorm(), p.sigma2);
  });
}

}  // namespace ncbm
