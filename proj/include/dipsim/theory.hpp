#pragma once

#include <optional>

#include "dipsim/quadrature.hpp"

namespace dipsim {

// Couplings and cutoffs for the field-theory evaluators. E_b and E_s are
// vortex core energies supplied by the user; lambda1 is the charge-vortex
// stiffness entering the gradient term, m_d the dipole-vortex mass (zero in
// the dipole-fuzzy phase, positive in the dipole-sharp phase).
struct TheoryParams {
  double J = 16.0 / 9.0;
  double gamma = 1.0;
  double E_b = 0.0;
  double E_s = 0.0;
  double lambda1 = 1.0;
  double m_d = 0.0;
  double Lambda = 50.0;   // momentum/frequency cutoff
  int gl_order = 8;       // Gauss-Legendre order per panel (base grid)
  double rel_tol = 1e-3;  // grid-doubling convergence tolerance
};

enum class Observable { charge, dipole };

// Dipole stiffness and charge coefficient of the coarse-grained action.
double rho_s(double gamma, double J);
double rho_bar(double J);

// Luttinger parameter of the dipole sine-Gordon theory; strictly decreasing
// in gamma, diverging as gamma -> 0.
double luttinger_K(const TheoryParams& params);

// Measurement rate where K crosses the BKT value 2; unique by monotonicity.
double gamma_critical(double J, double E_b);

// ln C_2(x, t): minus the double integral of
//   w^2 [k^2] (1 - cos(kx - wt)) / ((w^2+k^2)^2 (w^2 + lambda1 k^2 + m_d))
// over [-Lambda, Lambda]^2 (the k^2 factor only for the dipole observable).
// Value <= 0. The charge integrand with m_d = 0 is infrared log-divergent;
// the result is then reported with converged = false.
QuadResult ln_renyi2_integral(double x, double t, const TheoryParams& params,
                              Observable obs);

// Equal-kernel density correlator: integral of
//   N(k) cos(kr) cos(wt) exp(-(k^2+w^2)/sigma^2) / (w^2 + lambda1 k^2 + m_d)
// over [-Lambda, Lambda]^2 with N = k^2 (dipole) or k^4 (charge) and a
// Gaussian roll-off sigma = Lambda/6 that suppresses cutoff ringing below
// the r^-4 tail without shifting the asymptotic exponents.
QuadResult density_correlator_theory(double r, double t,
                                     const TheoryParams& params,
                                     Observable obs);

// ---- Tabulated asymptotic scaling laws ------------------------------------

enum class Phase { weak_weak, sharp_weak, sharp_sharp };
enum class OrderType { none, quasi_long_range, long_range };

// One row of the phase table. Optional fields are absent where the source
// analysis states no closed form; this table is a transcription, not a fit.
struct ScalingLaw {
  Observable observable = Observable::charge;
  // Variance of the conserved density in a region of size ell at time t:
  // sigma^2 ~ ell^ell_exp / t^t_exp, optionally times exp(-sqrt(m_d) t).
  bool has_variance_form = false;
  double ell_exp = 0.0;
  double t_exp = 0.0;
  bool exp_sqrt_md_decay = false;
  // Typical fluctuation-decay time tau(ell) ~ ell^a or ~ log(ell).
  std::optional<double> tau_ell_exp;
  bool tau_log = false;
  // Sharpening time t#(L) ~ L^a or ~ log(L).
  std::optional<double> sharpening_ell_exp;
  bool sharpening_log = false;
  std::optional<double> dynamical_z;
  OrderType renyi2_order = OrderType::none;
  // Equal-time connected density correlator power (e.g. -2, -4); absent
  // means exponential decay.
  std::optional<double> density_power;
};

struct PhaseTable {
  ScalingLaw charge;
  ScalingLaw dipole;
};

// Transcribed exponent table for the given phase and dimension. Throws for
// (weak_weak, dim = 1): the charge sharpens at any nonzero rate in 1D, so
// that phase does not exist there.
PhaseTable exponent_table(Phase phase, int dim);

// Evaluates the closed-form variance law sigma^2(ell, t) where one is
// tabulated; throws where the table has no closed form.
double variance_scaling(double ell, double t, Phase phase, int dim,
                        Observable obs, const TheoryParams& params);

}  // namespace dipsim
