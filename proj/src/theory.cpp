#include "dipsim/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dipsim/errors.hpp"

namespace dipsim {

namespace {

void check_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be > 0");
}

void check_params(const TheoryParams& p) {
  check_positive(p.J, "J");
  check_positive(p.gamma, "gamma");
  check_positive(p.Lambda, "Lambda");
  check_positive(p.lambda1, "lambda1");
  check_positive(p.rel_tol, "rel_tol");
  if (p.m_d < 0.0) throw ConfigError("m_d must be >= 0");
  if (p.gl_order < 2) throw ConfigError("gl_order must be >= 2");
}

// Dimensionless combination the 1D coefficients are built from.
double stiffness_arg(double gamma, double J) {
  return 9.0 * J / (16.0 * gamma * gamma);
}

}  // namespace

double rho_s(double gamma, double J) {
  check_positive(gamma, "gamma");
  check_positive(J, "J");
  return 0.25 * std::cbrt(stiffness_arg(gamma, J));
}

double rho_bar(double J) {
  check_positive(J, "J");
  return 9.0 * J / 16.0;
}

double luttinger_K(const TheoryParams& p) {
  check_positive(p.J, "J");
  check_positive(p.gamma, "gamma");
  const double R = stiffness_arg(p.gamma, p.J);
  return 0.5 * M_PI * M_PI * std::pow(R, 1.0 / 6.0) *
         std::exp(std::cbrt(R) / 8.0 + p.E_b);
}

double gamma_critical(double J, double E_b) {
  check_positive(J, "J");
  TheoryParams p;
  p.J = J;
  p.E_b = E_b;
  const auto K_at = [&](double g) {
    p.gamma = g;
    return luttinger_K(p);
  };
  // K is strictly decreasing in gamma, so bracket the K = 2 crossing and
  // bisect to the floating-point fixed point.
  double lo = 1e-8, hi = 1e8;
  for (int grow = 0; K_at(lo) < 2.0; ++grow) {
    lo /= 100.0;
    if (grow > 100) throw std::runtime_error("no lower bracket for K = 2");
  }
  for (int grow = 0; K_at(hi) > 2.0; ++grow) {
    hi *= 100.0;
    if (grow > 100) throw std::runtime_error("no upper bracket for K = 2");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (K_at(mid) >= 2.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

struct Grid {
  AxisRule k;
  AxisRule w;
};

// Per-axis composite rules: geometric refinement toward the origin (where
// the integrands have all their structure) and a panel-width cap of half an
// oscillation period where a cos(k x) or cos(w t) factor is present.
Grid make_grid(const TheoryParams& p, double x, double t, double first_frac,
               int order) {
  const GaussLegendre gl(order);
  const double first = p.Lambda * first_frac;
  const double cap_k = x != 0.0 ? M_PI / std::abs(x) : 0.0;
  const double cap_w = t != 0.0 ? M_PI / std::abs(t) : 0.0;
  Grid g;
  g.k = axis_rule(geometric_edges(0.0, p.Lambda, first, 1.6, cap_k), gl);
  g.w = axis_rule(geometric_edges(0.0, p.Lambda, first, 1.6, cap_w), gl);
  return g;
}

double ln_renyi2_on_grid(const Grid& g, double x, double t,
                         const TheoryParams& p, Observable obs) {
  const std::size_t nk = g.k.x.size(), nw = g.w.x.size();
  std::vector<double> w2(nw), cwt(nw);
  for (std::size_t j = 0; j < nw; ++j) {
    w2[j] = g.w.x[j] * g.w.x[j];
    cwt[j] = std::cos(g.w.x[j] * t);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < nk; ++i) {
    const double k = g.k.x[i];
    const double k2 = k * k;
    const double ckx = std::cos(k * x);
    const double lk2md = p.lambda1 * k2 + p.m_d;
    const double numk = obs == Observable::dipole ? k2 : 1.0;
    double row = 0.0;
    for (std::size_t j = 0; j < nw; ++j) {
      const double d1 = w2[j] + k2;
      const double d2 = w2[j] + lk2md;
      row += g.w.w[j] * w2[j] * (1.0 - ckx * cwt[j]) / (d1 * d1 * d2);
    }
    total += g.k.w[i] * numk * row;
  }
  // Folding [-Lambda, Lambda]^2 onto the first quadrant: the sin*sin part of
  // cos(kx - wt) is odd in k and drops out.
  return -4.0 * total;
}

double density_on_grid(const Grid& g, double r, double t,
                       const TheoryParams& p, Observable obs) {
  const std::size_t nk = g.k.x.size(), nw = g.w.x.size();
  const double sigma = p.Lambda / 6.0;
  const double inv_s2 = 1.0 / (sigma * sigma);
  std::vector<double> w2(nw), bw(nw);
  for (std::size_t j = 0; j < nw; ++j) {
    const double w = g.w.x[j];
    w2[j] = w * w;
    bw[j] = g.w.w[j] * std::cos(w * t) * std::exp(-w2[j] * inv_s2);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < nk; ++i) {
    const double k = g.k.x[i];
    const double k2 = k * k;
    const double numk = obs == Observable::dipole ? k2 : k2 * k2;
    const double ak =
        g.k.w[i] * numk * std::cos(k * r) * std::exp(-k2 * inv_s2);
    const double lk2md = p.lambda1 * k2 + p.m_d;
    double row = 0.0;
    for (std::size_t j = 0; j < nw; ++j) row += bw[j] / (w2[j] + lk2md);
    total += ak * row;
  }
  return 4.0 * total;
}

// Base grid vs refined grid (doubled order, quartered first panel). The
// refined value is returned; the difference is the error estimate.
template <class Eval>
QuadResult self_checked(const TheoryParams& p, double x, double t,
                        Eval&& eval) {
  constexpr double kFirstFrac = 1e-6;
  const Grid base = make_grid(p, x, t, kFirstFrac, p.gl_order);
  const Grid fine = make_grid(p, x, t, kFirstFrac / 4.0, 2 * p.gl_order);
  const double v0 = eval(base);
  const double v1 = eval(fine);
  QuadResult res;
  res.value = v1;
  res.error = std::abs(v1 - v0);
  res.converged = res.error <= p.rel_tol * std::max(std::abs(v1), 1e-300);
  return res;
}

}  // namespace

QuadResult ln_renyi2_integral(double x, double t, const TheoryParams& p,
                              Observable obs) {
  check_params(p);
  if (!std::isfinite(x) || !std::isfinite(t))
    throw ConfigError("x and t must be finite");
  return self_checked(p, x, t, [&](const Grid& g) {
    return ln_renyi2_on_grid(g, x, t, p, obs);
  });
}

QuadResult density_correlator_theory(double r, double t,
                                     const TheoryParams& p, Observable obs) {
  check_params(p);
  if (!std::isfinite(r) || !std::isfinite(t))
    throw ConfigError("r and t must be finite");
  return self_checked(p, r, t, [&](const Grid& g) {
    return density_on_grid(g, r, t, p, obs);
  });
}

namespace {

ScalingLaw law(Observable obs) {
  ScalingLaw s;
  s.observable = obs;
  return s;
}

}  // namespace

PhaseTable exponent_table(Phase phase, int dim) {
  if (dim != 1 && dim != 2) throw ConfigError("dim must be 1 or 2");
  PhaseTable t{law(Observable::charge), law(Observable::dipole)};
  if (dim == 1) {
    switch (phase) {
      case Phase::weak_weak:
        // Charge sharpens at any nonzero rate in 1D: no such phase.
        throw ConfigError(
            "weak-weak is not a 1D phase (charge sharpens for any nonzero "
            "measurement rate)");
      case Phase::sharp_weak:
        // Charge sharp / dipole fuzzy.
        t.charge.has_variance_form = true;
        t.charge.ell_exp = 2.0;
        t.charge.t_exp = 4.0;
        t.charge.tau_ell_exp = 0.5;
        t.charge.sharpening_log = true;
        t.charge.renyi2_order = OrderType::none;
        t.charge.density_power = -4.0;
        t.dipole.has_variance_form = true;
        t.dipole.ell_exp = 2.0;
        t.dipole.t_exp = 2.0;
        t.dipole.tau_ell_exp = 1.0;
        t.dipole.sharpening_ell_exp = 1.0;
        t.dipole.renyi2_order = OrderType::quasi_long_range;
        t.dipole.density_power = -2.0;
        return t;
      case Phase::sharp_sharp:
        for (ScalingLaw* s : {&t.charge, &t.dipole}) {
          s->has_variance_form = true;
          s->ell_exp = 1.0;
          s->t_exp = 0.0;
          s->exp_sqrt_md_decay = true;
          s->tau_log = true;
          s->sharpening_log = true;
          s->renyi2_order = OrderType::none;
        }
        return t;
    }
  }
  switch (phase) {
    case Phase::weak_weak:
      t.charge.tau_ell_exp = 2.0;
      t.charge.sharpening_ell_exp = 2.0;
      t.charge.dynamical_z = 2.0;
      t.charge.renyi2_order = OrderType::quasi_long_range;
      t.dipole.tau_ell_exp = 4.0;
      t.dipole.sharpening_ell_exp = 2.0;
      t.dipole.dynamical_z = 2.0;
      t.dipole.renyi2_order = OrderType::long_range;
      return t;
    case Phase::sharp_weak:
      t.charge.has_variance_form = true;
      t.charge.ell_exp = 4.0;
      t.charge.t_exp = 5.0;
      t.charge.sharpening_log = true;
      t.charge.renyi2_order = OrderType::none;
      t.dipole.has_variance_form = true;
      t.dipole.ell_exp = 4.0;
      t.dipole.t_exp = 3.0;
      t.dipole.sharpening_ell_exp = 2.0;
      t.dipole.dynamical_z = 1.0;
      t.dipole.renyi2_order = OrderType::long_range;
      return t;
    case Phase::sharp_sharp:
      for (ScalingLaw* s : {&t.charge, &t.dipole}) {
        s->tau_log = true;
        s->sharpening_log = true;
        s->renyi2_order = OrderType::none;
      }
      return t;
  }
  throw ConfigError("unknown phase label");
}

double variance_scaling(double ell, double t, Phase phase, int dim,
                        Observable obs, const TheoryParams& p) {
  if (!(ell > 0.0) || !(t > 0.0))
    throw ConfigError("ell and t must be > 0");
  const PhaseTable table = exponent_table(phase, dim);
  const ScalingLaw& s =
      obs == Observable::charge ? table.charge : table.dipole;
  if (!s.has_variance_form)
    throw ConfigError(
        "no closed-form variance scaling is tabulated for this phase");
  double v = std::pow(ell, s.ell_exp) / std::pow(t, s.t_exp);
  if (s.exp_sqrt_md_decay) {
    if (p.m_d < 0.0) throw ConfigError("m_d must be >= 0");
    v *= std::exp(-std::sqrt(p.m_d) * t);
  }
  return v;
}

}  // namespace dipsim
