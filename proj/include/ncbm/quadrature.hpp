#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ncbm {

/// Integrand over ordered coordinates; receives the free coordinates in order.
using OrderedIntegrand = std::function<double(std::span<const double>)>;

/// A run of `count` ordered coordinates confined to [lo, hi]:
/// lo <= y_1 < ... < y_count <= hi.
struct OrderedSegment {
  std::size_t count = 0;
  double lo = 0.0;
  double hi = 0.0;
};

struct QuadratureOptions {
  double rel_tol = 1e-6;
  double abs_tol = 1e-300;
  int initial_panels = 2;
  int max_panels = 64;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // |I_P - I_{P/2}| at the last refinement
  int panels = 0;
  bool converged = false;
};

/// Nested composite Gauss-Legendre rule (10 nodes per panel, `panels` panels
/// on every nested interval) over the concatenation of ordered segments.
double integrate_ordered_fixed(std::span<const OrderedSegment> segments, int panels,
                               const OrderedIntegrand& f);

/// Doubles the panel count until successive estimates agree to the tolerance.
QuadratureResult integrate_ordered(std::span<const OrderedSegment> segments,
                                   const OrderedIntegrand& f, const QuadratureOptions& opts = {});

/// Integral over the truncated chamber lo <= y_1 < ... < y_n <= hi.
QuadratureResult integrate_chamber(std::size_t n, double lo, double hi, const OrderedIntegrand& f,
                                   const QuadratureOptions& opts = {});

/// Composite Gauss-Legendre on [a, b] with `panels` panels of 10 nodes.
double integrate_interval(const std::function<double(double)>& f, double a, double b, int panels);

/// Nodes and weights of the composite rule on [a, b].
void composite_gauss_nodes(double a, double b, int panels, std::vector<double>& nodes,
                           std::vector<double>& weights);

}  // namespace ncbm
