#include "dipsim/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace dipsim {

GaussLegendre::GaussLegendre(int order) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  nodes_.resize(order);
  weights_.resize(order);
  const int n = order;
  // Legendre value and derivative by the three-term recurrence.
  const auto eval = [n](double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 1) {
      p = p1;
      dp = 1.0;
      return;
    }
    for (int j = 1; j < n; ++j) {
      const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
      p0 = p1;
      p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
  };
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi-style initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      eval(x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    eval(x, p, dp);
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes_[half - 1] = 0.0;
}

AxisRule axis_rule(const std::vector<double>& edges, const GaussLegendre& gl) {
  if (edges.size() < 2) throw std::invalid_argument("need at least one panel");
  AxisRule rule;
  rule.x.reserve((edges.size() - 1) * gl.order());
  rule.w.reserve(rule.x.capacity());
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    if (!(b > a)) throw std::invalid_argument("edges must be increasing");
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < gl.order(); ++i) {
      rule.x.push_back(c + h * gl.nodes()[i]);
      rule.w.push_back(h * gl.weights()[i]);
    }
  }
  return rule;
}

std::vector<double> geometric_edges(double lo, double hi, double first,
                                    double ratio, double cap) {
  if (!(hi > lo)) throw std::invalid_argument("empty interval");
  if (!(first > 0.0) || !(ratio >= 1.0))
    throw std::invalid_argument("bad panel parameters");
  std::vector<double> edges{lo};
  double width = first;
  if (cap > 0.0 && width > cap) width = cap;
  while (edges.back() < hi) {
    double next = edges.back() + width;
    if (next > hi - 1e-12 * (hi - lo)) next = hi;
    edges.push_back(next);
    width *= ratio;
    if (cap > 0.0 && width > cap) width = cap;
    if (edges.size() > 200000)
      throw std::invalid_argument("panel budget exceeded");
  }
  return edges;
}

}  // namespace dipsim
