#include "dipsim/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dipsim {

const char* fit_form_name(FitForm form) {
  switch (form) {
    case FitForm::log_form: return "log";
    case FitForm::linear: return "linear";
    case FitForm::power: return "power";
    case FitForm::exponential: return "exponential";
  }
  return "?";
}

double FitResult::predict(double x) const {
  switch (form) {
    case FitForm::log_form: return a + b * std::log(x);
    case FitForm::linear: return a + b * x;
    case FitForm::power: return a * std::pow(x, b);
    case FitForm::exponential: return a * std::exp(b * x);
  }
  return 0.0;
}

namespace {

// Straight-line least squares in a transformed space; returns false when a
// transform is inadmissible (nonpositive argument of a log).
struct LineFit {
  double intercept = 0.0, slope = 0.0, slope_err = 0.0, rss = 0.0;
};

bool line_fit(const std::vector<double>& u, const std::vector<double>& v,
              LineFit& out) {
  const std::size_t n = u.size();
  double su = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(u[i]) || !std::isfinite(v[i])) return false;
    su += u[i];
    sv += v[i];
  }
  const double mu = su / n, mv = sv / n;
  double suu = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suv += (u[i] - mu) * (v[i] - mv);
  }
  if (suu <= 0.0) return false;
  out.slope = suv / suu;
  out.intercept = mv - out.slope * mu;
  out.rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = v[i] - (out.intercept + out.slope * u[i]);
    out.rss += r * r;
  }
  out.slope_err =
      n > 2 ? std::sqrt(std::max(0.0, out.rss / (double(n) - 2.0)) / suu)
            : 0.0;
  return true;
}

}  // namespace

ScalingFit fit_scaling(const std::vector<double>& x,
                       const std::vector<double>& y,
                       const std::vector<FitForm>& forms) {
  if (x.size() != y.size())
    throw std::invalid_argument("x and y lengths differ");
  if (x.size() < 4) throw std::invalid_argument("need at least 4 points");
  if (forms.empty()) throw std::invalid_argument("no forms requested");
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  if (*ymax - *ymin <= 1e-14 * std::max(1.0, std::abs(*ymax)))
    throw std::invalid_argument("degenerate series: y is constant");

  ScalingFit result;
  for (FitForm form : forms) {
    FitResult fr;
    fr.form = form;
    std::vector<double> u(x.size()), v(y.size());
    bool admissible = true;
    for (std::size_t i = 0; i < x.size() && admissible; ++i) {
      switch (form) {
        case FitForm::log_form:
          admissible = x[i] > 0.0;
          u[i] = std::log(x[i]);
          v[i] = y[i];
          break;
        case FitForm::linear:
          u[i] = x[i];
          v[i] = y[i];
          break;
        case FitForm::power:
          admissible = x[i] > 0.0 && y[i] > 0.0;
          u[i] = std::log(x[i]);
          v[i] = admissible ? std::log(y[i]) : 0.0;
          break;
        case FitForm::exponential:
          admissible = y[i] > 0.0;
          u[i] = x[i];
          v[i] = admissible ? std::log(y[i]) : 0.0;
          break;
      }
    }
    LineFit lf;
    if (admissible && line_fit(u, v, lf)) {
      fr.ok = true;
      fr.b = lf.slope;
      fr.b_err = lf.slope_err;
      fr.rss_fit = lf.rss;
      fr.a = (form == FitForm::power || form == FitForm::exponential)
                 ? std::exp(lf.intercept)
                 : lf.intercept;
      fr.rss_y = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fr.predict(x[i]);
        fr.rss_y += r * r;
      }
    }
    result.fits.push_back(fr);
  }

  double best_rss = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < result.fits.size(); ++i) {
    if (result.fits[i].ok && result.fits[i].rss_y < best_rss) {
      best_rss = result.fits[i].rss_y;
      result.best = i;
      any = true;
    }
  }
  if (!any)
    throw std::invalid_argument("no requested form admits this series");
  return result;
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty series");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

MedianCI bootstrap_median_ci(const std::vector<double>& values, int resamples,
                             Rng& rng) {
  if (values.empty()) throw std::invalid_argument("bootstrap of empty series");
  if (resamples < 2) throw std::invalid_argument("need >= 2 resamples");
  MedianCI ci;
  ci.median = median_of(values);
  std::vector<double> medians(resamples);
  std::vector<double> draw(values.size());
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < values.size(); ++i)
      draw[i] = values[rng.uniform_below(values.size())];
    medians[b] = median_of(draw);
  }
  std::sort(medians.begin(), medians.end());
  const auto rank = [&](double q) {
    const double pos = q * (resamples - 1);
    return medians[static_cast<std::size_t>(std::lround(pos))];
  };
  ci.lo = rank(0.025);
  ci.hi = rank(0.975);
  return ci;
}

}  // namespace dipsim
