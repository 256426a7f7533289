#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "dipsim/errors.hpp"
#include "dipsim/fitting.hpp"
#include "dipsim/theory.hpp"

using namespace dipsim;

namespace {

TheoryParams dipole_fuzzy() {
  TheoryParams p;
  p.m_d = 0.0;
  return p;
}

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i)
    xs.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return xs;
}

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("stiffness coefficients at the reference couplings") {
  CHECK(rho_s(1.0, 16.0 / 9.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rho_bar(16.0 / 9.0) == doctest::Approx(1.0).epsilon(1e-12));
  // rho_s ~ gamma^{-2/3}: multiplying gamma by 8 divides rho_s by 4.
  for (const double gamma : {0.2, 1.0, 3.7})
    CHECK(rho_s(8.0 * gamma, 1.3) ==
          doctest::Approx(rho_s(gamma, 1.3) / 4.0).epsilon(1e-12));
  CHECK_THROWS_AS(rho_s(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(rho_s(1.0, -2.0), ConfigError);
  CHECK_THROWS_AS(rho_bar(0.0), ConfigError);
}

TEST_CASE("Luttinger parameter at the reference point") {
  TheoryParams p;  // J = 16/9, gamma = 1, E_b = 0
  const double k = luttinger_K(p);
  // Closed form (pi^2/2) e^{1/8} = 5.5919 to the quoted precision.
  CHECK(std::abs(k - 0.5 * std::numbers::pi * std::numbers::pi *
                         std::exp(0.125)) < 1e-12);
  CHECK(std::abs(k - 5.5919) < 1e-3);
}

TEST_CASE("K decreases in gamma and diverges toward gamma -> 0") {
  TheoryParams p;
  double prev = 0.0;
  bool first = true;
  for (const double g : geometric(1e-3, 1e3, 61)) {
    p.gamma = g;
    const double k = luttinger_K(p);
    CHECK(k > 0.0);
    if (!first) CHECK(k < prev);
    prev = k;
    first = false;
  }
  p.gamma = 1e-3;
  CHECK(luttinger_K(p) > 1e6);
}

TEST_CASE("gamma_critical solves K = 2 and grows with the core energy") {
  for (const auto& [J, E_b] :
       std::vector<std::pair<double, double>>{{16.0 / 9.0, 0.0},
                                              {1.0, 0.5},
                                              {4.0, 1.0}}) {
    const double gc = gamma_critical(J, E_b);
    CHECK(gc > 0.0);
    TheoryParams p;
    p.J = J;
    p.E_b = E_b;
    p.gamma = gc;
    CHECK(std::abs(luttinger_K(p) - 2.0) < 1e-10);

    // A log-grid scan brackets the same crossing.
    const auto grid = geometric(1e-4, 1e4, 10000);
    bool bracketed = false;
    TheoryParams q = p;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      q.gamma = grid[i];
      const double a = luttinger_K(q) - 2.0;
      q.gamma = grid[i + 1];
      const double b = luttinger_K(q) - 2.0;
      if (a * b <= 0.0) {
        CHECK(gc >= grid[i]);
        CHECK(gc <= grid[i + 1]);
        bracketed = true;
        break;
      }
    }
    CHECK(bracketed);
  }
  CHECK(gamma_critical(16.0 / 9.0, 0.0) < gamma_critical(16.0 / 9.0, 0.5));
  CHECK(gamma_critical(16.0 / 9.0, 0.5) < gamma_critical(16.0 / 9.0, 1.0));
}

TEST_CASE("ln C2 vanishes at the origin and is even in x") {
  for (const auto obs : {Observable::charge, Observable::dipole}) {
    TheoryParams p = dipole_fuzzy();
    p.m_d = (obs == Observable::charge) ? 0.3 : 0.0;  // keep charge IR-finite
    const auto at0 = ln_renyi2_integral(0.0, 0.0, p, obs);
    CHECK(at0.converged);
    CHECK(std::abs(at0.value) < 1e-12);
    const auto plus = ln_renyi2_integral(3.7, 0.0, p, obs);
    const auto minus = ln_renyi2_integral(-3.7, 0.0, p, obs);
    CHECK(plus.value == doctest::Approx(minus.value).epsilon(1e-12));
  }
}

TEST_CASE("ln C2 is nonpositive and decreasing in |x| for the fuzzy dipole") {
  const TheoryParams p = dipole_fuzzy();
  double prev = 1.0;
  for (const double x : {1.0, 2.0, 5.0, 10.0, 30.0}) {
    const auto r = ln_renyi2_integral(x, 0.0, p, Observable::dipole);
    CHECK(r.converged);
    CHECK(r.value <= 1e-12);
    CHECK(r.value < prev);
    prev = r.value;
  }
}

TEST_CASE("fuzzy-dipole C2 decays as a power law (quasi-long-range order)") {
  const TheoryParams p = dipole_fuzzy();
  std::vector<double> xs = geometric(10.0, 100.0, 10);
  std::vector<double> c2;
  for (const double x : xs)
    c2.push_back(std::exp(ln_renyi2_integral(x, 0.0, p, Observable::dipole).value));
  const auto fit =
      fit_scaling(xs, c2, {FitForm::power, FitForm::exponential});
  CHECK(fit.best_fit().form == FitForm::power);
  CHECK(fit.best_fit().b < 0.0);  // decaying
}

TEST_CASE("charge replica integral is IR-divergent only at m_d = 0") {
  const TheoryParams fuzzy = dipole_fuzzy();
  const auto divergent = ln_renyi2_integral(5.0, 0.0, fuzzy, Observable::charge);
  CHECK_FALSE(divergent.converged);

  TheoryParams massive = fuzzy;
  massive.m_d = 0.5;
  const auto finite = ln_renyi2_integral(5.0, 0.0, massive, Observable::charge);
  CHECK(finite.converged);
  CHECK(finite.value <= 0.0);
  CHECK(std::isfinite(finite.value));
}

TEST_CASE("density correlator matches its asymptotic forms at r = 10") {
  const TheoryParams p = dipole_fuzzy();
  const double pi = std::numbers::pi;
  const auto dip = density_correlator_theory(10.0, 0.0, p, Observable::dipole);
  CHECK(dip.converged);
  CHECK(std::abs(dip.error) <= p.rel_tol * std::abs(dip.value));
  // Asymptotic -2 pi / r^2.
  CHECK(std::abs(dip.value - (-2.0 * pi / 100.0)) < 1e-8);

  const auto chg = density_correlator_theory(10.0, 0.0, p, Observable::charge);
  CHECK(chg.converged);
  // Asymptotic +12 pi / r^4.
  CHECK(std::abs(chg.value - (12.0 * pi / 1e4)) < 1e-8);
}

TEST_CASE("density correlator exponents: -2 (dipole) and -4 (charge)") {
  const TheoryParams p = dipole_fuzzy();
  const auto rs = geometric(10.0, 100.0, 12);
  for (const auto obs : {Observable::charge, Observable::dipole}) {
    std::vector<double> mags;
    for (const double r : rs) {
      const auto q = density_correlator_theory(r, 0.0, p, obs);
      CHECK(q.converged);
      mags.push_back(std::abs(q.value));
    }
    const auto fit = fit_scaling(rs, mags, {FitForm::power, FitForm::exponential});
    CHECK(fit.best_fit().form == FitForm::power);
    const double want = (obs == Observable::charge) ? -4.0 : -2.0;
    CHECK(std::abs(fit.best_fit().b - want) < 0.1);
  }
}

TEST_CASE("massive dipole vortices cut the correlator off exponentially") {
  TheoryParams p = dipole_fuzzy();
  p.m_d = 0.1;
  double prev = 1e9;
  for (const double r : {4.0, 8.0, 12.0, 16.0, 20.0}) {
    const auto q = density_correlator_theory(r, 0.0, p, Observable::dipole);
    CHECK(q.converged);
    CHECK(std::abs(q.value) < prev);
    prev = std::abs(q.value);
  }
  // Far smaller than the power-law value at the same r.
  const auto massless =
      density_correlator_theory(20.0, 0.0, dipole_fuzzy(), Observable::dipole);
  const auto massive =
      density_correlator_theory(20.0, 0.0, p, Observable::dipole);
  CHECK(std::abs(massive.value) < 0.1 * std::abs(massless.value));
}

TEST_CASE("transcribed exponent table, 1D") {
  CHECK_THROWS_AS(exponent_table(Phase::weak_weak, 1), ConfigError);
  CHECK_THROWS_AS(exponent_table(Phase::sharp_weak, 3), ConfigError);

  const auto sw = exponent_table(Phase::sharp_weak, 1);
  CHECK(sw.charge.has_variance_form);
  CHECK(sw.charge.ell_exp == 2.0);
  CHECK(sw.charge.t_exp == 4.0);
  CHECK_FALSE(sw.charge.exp_sqrt_md_decay);
  CHECK(sw.charge.tau_ell_exp == 0.5);
  CHECK_FALSE(sw.charge.tau_log);
  CHECK(sw.charge.sharpening_log);
  CHECK_FALSE(sw.charge.sharpening_ell_exp.has_value());
  CHECK(sw.charge.renyi2_order == OrderType::none);
  CHECK(sw.charge.density_power == -4.0);
  CHECK(sw.dipole.ell_exp == 2.0);
  CHECK(sw.dipole.t_exp == 2.0);
  CHECK(sw.dipole.tau_ell_exp == 1.0);
  CHECK(sw.dipole.sharpening_ell_exp == 1.0);
  CHECK_FALSE(sw.dipole.sharpening_log);
  CHECK(sw.dipole.renyi2_order == OrderType::quasi_long_range);
  CHECK(sw.dipole.density_power == -2.0);

  const auto ss = exponent_table(Phase::sharp_sharp, 1);
  for (const ScalingLaw* s : {&ss.charge, &ss.dipole}) {
    CHECK(s->has_variance_form);
    CHECK(s->ell_exp == 1.0);
    CHECK(s->t_exp == 0.0);
    CHECK(s->exp_sqrt_md_decay);
    CHECK(s->tau_log);
    CHECK(s->sharpening_log);
    CHECK(s->renyi2_order == OrderType::none);
    CHECK_FALSE(s->density_power.has_value());
  }
}

TEST_CASE("transcribed exponent table, 2D") {
  const auto ww = exponent_table(Phase::weak_weak, 2);
  CHECK_FALSE(ww.charge.has_variance_form);
  CHECK(ww.charge.tau_ell_exp == 2.0);
  CHECK(ww.charge.sharpening_ell_exp == 2.0);
  CHECK(ww.charge.dynamical_z == 2.0);
  CHECK(ww.charge.renyi2_order == OrderType::quasi_long_range);
  CHECK(ww.dipole.tau_ell_exp == 4.0);
  CHECK(ww.dipole.sharpening_ell_exp == 2.0);
  CHECK(ww.dipole.dynamical_z == 2.0);
  CHECK(ww.dipole.renyi2_order == OrderType::long_range);

  const auto sw = exponent_table(Phase::sharp_weak, 2);
  CHECK(sw.charge.has_variance_form);
  CHECK(sw.charge.ell_exp == 4.0);
  CHECK(sw.charge.t_exp == 5.0);
  CHECK(sw.charge.sharpening_log);
  CHECK(sw.charge.renyi2_order == OrderType::none);
  CHECK_FALSE(sw.charge.tau_ell_exp.has_value());
  CHECK(sw.dipole.ell_exp == 4.0);
  CHECK(sw.dipole.t_exp == 3.0);
  CHECK(sw.dipole.sharpening_ell_exp == 2.0);
  CHECK(sw.dipole.dynamical_z == 1.0);
  CHECK(sw.dipole.renyi2_order == OrderType::long_range);

  const auto ss = exponent_table(Phase::sharp_sharp, 2);
  for (const ScalingLaw* s : {&ss.charge, &ss.dipole}) {
    CHECK_FALSE(s->has_variance_form);
    CHECK(s->tau_log);
    CHECK(s->sharpening_log);
    CHECK(s->renyi2_order == OrderType::none);
  }
}

TEST_CASE("variance laws satisfy their homogeneity identities") {
  const TheoryParams p = dipole_fuzzy();
  // 1D fuzzy dipole: sigma^2 ~ ell^2 / t^2 is scale-free along ell = v t.
  const double base =
      variance_scaling(7.0, 3.0, Phase::sharp_weak, 1, Observable::dipole, p);
  CHECK(variance_scaling(14.0, 6.0, Phase::sharp_weak, 1, Observable::dipole,
                         p) == doctest::Approx(base).epsilon(1e-12));
  // 1D sharp charge: doubling t divides by 2^4.
  const double c1 =
      variance_scaling(7.0, 3.0, Phase::sharp_weak, 1, Observable::charge, p);
  const double c2 =
      variance_scaling(7.0, 6.0, Phase::sharp_weak, 1, Observable::charge, p);
  CHECK(c2 / c1 == doctest::Approx(std::pow(2.0, -4.0)).epsilon(1e-12));
  // 2D sharp-weak charge: doubling t divides by 2^5.
  const double d1 =
      variance_scaling(7.0, 3.0, Phase::sharp_weak, 2, Observable::charge, p);
  const double d2 =
      variance_scaling(7.0, 6.0, Phase::sharp_weak, 2, Observable::charge, p);
  CHECK(d2 / d1 == doctest::Approx(std::pow(2.0, -5.0)).epsilon(1e-12));
  // Sharp-sharp: the log-variance slope in t is -sqrt(m_d).
  TheoryParams massive = p;
  massive.m_d = 0.25;
  const double s1 = variance_scaling(5.0, 2.0, Phase::sharp_sharp, 1,
                                     Observable::charge, massive);
  const double s2 = variance_scaling(5.0, 6.0, Phase::sharp_sharp, 1,
                                     Observable::charge, massive);
  CHECK((std::log(s2) - std::log(s1)) / 4.0 ==
        doctest::Approx(-std::sqrt(0.25)).epsilon(1e-12));
}

TEST_CASE("variance laws reject what is not tabulated") {
  const TheoryParams p = dipole_fuzzy();
  CHECK_THROWS_AS(
      variance_scaling(5.0, 2.0, Phase::weak_weak, 2, Observable::charge, p),
      ConfigError);
  CHECK_THROWS_AS(
      variance_scaling(5.0, 2.0, Phase::sharp_sharp, 2, Observable::charge, p),
      ConfigError);
  CHECK_THROWS_AS(
      variance_scaling(-1.0, 2.0, Phase::sharp_weak, 1, Observable::charge, p),
      ConfigError);
  CHECK_THROWS_AS(
      variance_scaling(5.0, 0.0, Phase::sharp_weak, 1, Observable::charge, p),
      ConfigError);
}

}  // TEST_SUITE
