#pragma once

#include <vector>

namespace dipsim {

// Result of a self-checked quadrature: `error` is the difference between the
// refined and base grids, and `converged` records whether that difference met
// the requested relative tolerance. Non-convergence is reported, not hidden.
struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

// Gauss-Legendre rule on [-1, 1], nodes ascending.
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);
  int order() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Composite rule along one axis: the Gauss-Legendre rule mapped onto each
// consecutive panel [edges[i], edges[i+1]].
struct AxisRule {
  std::vector<double> x;
  std::vector<double> w;
};

AxisRule axis_rule(const std::vector<double>& edges, const GaussLegendre& gl);

// Panel edges over [lo, hi]: the first panel is `first` wide and widths grow
// by `ratio`, capped at `cap` (cap <= 0 disables the cap). The geometric
// growth refines toward `lo`; the cap keeps oscillatory integrands resolved.
std::vector<double> geometric_edges(double lo, double hi, double first,
                                    double ratio, double cap = 0.0);

// Tensor-product integral of f(x, y) over two axis rules.
template <class F>
double tensor_integrate(const AxisRule& ax, const AxisRule& ay, F&& f) {
  double total = 0.0;
  for (std::size_t i = 0; i < ax.x.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < ay.x.size(); ++j)
      row += ay.w[j] * f(ax.x[i], ay.x[j]);
    total += ax.w[i] * row;
  }
  return total;
}

}  // namespace dipsim
