#include "ncbm/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <stdexcept>

namespace ncbm {

namespace {

using Rule = boost::math::quadrature::gauss<double, 10>;

struct ReferenceRule {
  std::vector<double> x;
  std::vector<double> w;
};

const ReferenceRule& reference_rule() {
  static const ReferenceRule rule = [] {
    ReferenceRule r;
    const auto& ab = Rule::abscissa();
    const auto& wt = Rule::weights();
    for (std::size_t i = 0; i < ab.size(); ++i) {
      if (ab[i] == 0.0) {
        r.x.push_back(0.0);
        r.w.push_back(wt[i]);
      } else {
        r.x.push_back(-ab[i]);
        r.w.push_back(wt[i]);
        r.x.push_back(ab[i]);
        r.w.push_back(wt[i]);
      }
    }
    return r;
  }();
  return rule;
}

class NestedRule {
 public:
  NestedRule(std::span<const OrderedSegment> segments, int panels, const OrderedIntegrand& f)
      : f_(f), panels_(panels) {
    for (const auto& s : segments) {
      for (std::size_t k = 0; k < s.count; ++k) {
        dims_.push_back({s.lo, s.hi, k == 0});
      }
    }
    y_.resize(dims_.size());
  }

  double run() { return dims_.empty() ? f_(y_) : level(0); }

 private:
  struct Dim {
    double lo;
    double hi;
    bool segment_start;
  };

  double level(std::size_t k) {
    const Dim& d = dims_[k];
    const double a = d.segment_start ? d.lo : y_[k - 1];
    const double b = d.hi;
    if (!(b > a)) return 0.0;
    const auto& ref = reference_rule();
    const double width = (b - a) / panels_;
    const double half = 0.5 * width;
    double sum = 0.0;
    for (int p = 0; p < panels_; ++p) {
      const double mid = a + (p + 0.5) * width;
      double panel_sum = 0.0;
      for (std::size_t q = 0; q < ref.x.size(); ++q) {
        y_[k] = mid + half * ref.x[q];
        const double v = (k + 1 == dims_.size()) ? f_(y_) : level(k + 1);
        panel_sum += ref.w[q] * v;
      }
      sum += half * panel_sum;
    }
    return sum;
  }

  const OrderedIntegrand& f_;
  int panels_;
  std::vector<Dim> dims_;
  std::vector<double> y_;
};

}  // namespace

double integrate_ordered_fixed(std::span<const OrderedSegment> segments, int panels,
                               const OrderedIntegrand& f) {
  if (panels < 1) throw std::invalid_argument("integrate_ordered_fixed: panels must be >= 1");
  return NestedRule(segments, panels, f).run();
}

QuadratureResult integrate_ordered(std::span<const OrderedSegment> segments,
                                   const OrderedIntegrand& f, const QuadratureOptions& opts) {
  QuadratureResult r;
  int panels = std::max(1, opts.initial_panels);
  double prev = integrate_ordered_fixed(segments, panels, f);
  while (panels < opts.max_panels) {
    panels *= 2;
    const double cur = integrate_ordered_fixed(segments, panels, f);
    r.value = cur;
    r.error = std::abs(cur - prev);
    r.panels = panels;
    if (r.error <= opts.rel_tol * std::abs(cur) || r.error <= opts.abs_tol) {
      r.converged = true;
      return r;
    }
    prev = cur;
  }
  if (r.panels == 0) {
    r.value = prev;
    r.panels = panels;
  }
  return r;
}

QuadratureResult integrate_chamber(std::size_t n, double lo, double hi, const OrderedIntegrand& f,
                                   const QuadratureOptions& opts) {
  const OrderedSegment seg{n, lo, hi};
  return integrate_ordered(std::span<const OrderedSegment>(&seg, 1), f, opts);
}

double integrate_interval(const std::function<double(double)>& f, double a, double b, int panels) {
  const OrderedSegment seg{1, a, b};
  return integrate_ordered_fixed(std::span<const OrderedSegment>(&seg, 1), panels,
                                 [&](std::span<const double> y) { return f(y[0]); });
}

void composite_gauss_nodes(double a, double b, int panels, std::vector<double>& nodes,
                           std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  const auto& ref = reference_rule();
  const double width = (b - a) / panels;
  const double half = 0.5 * width;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (std::size_t q = 0; q < ref.x.size(); ++q) {
      nodes.push_back(mid + half * ref.x[q]);
      weights.push_back(half * ref.w[q]);
    }
  }
}

}  // namespace ncbm
