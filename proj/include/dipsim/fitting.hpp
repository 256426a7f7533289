#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dipsim/rng.hpp"

namespace dipsim {

// Candidate functional forms for scaling fits:
//   log_form:    y = a + b ln(x)
//   linear:      y = a + b x
//   power:       y = a x^b        (fit in (ln x, ln y) space; needs y > 0)
//   exponential: y = a e^(b x)    (fit in (x, ln y) space; needs y > 0)
enum class FitForm { log_form, linear, power, exponential };

const char* fit_form_name(FitForm form);

struct FitResult {
  FitForm form = FitForm::linear;
  bool ok = false;      // data admissible for this form (positivity etc.)
  double a = 0.0;
  double b = 0.0;
  double b_err = 0.0;   // standard error of b in the fitted space
  double rss_fit = 0.0; // residual sum of squares in the fitted space
  double rss_y = 0.0;   // residual sum of squares in the original y space
  double predict(double x) const;
};

struct ScalingFit {
  std::vector<FitResult> fits;  // one per requested form, in request order
  std::size_t best = 0;         // index of the smallest rss_y among ok fits
  const FitResult& best_fit() const { return fits[best]; }
};

// Least-squares fit of every requested form; never discards points. Throws
// std::invalid_argument for fewer than 4 points, mismatched lengths, a
// constant series, or when no requested form is admissible.
ScalingFit fit_scaling(const std::vector<double>& x,
                       const std::vector<double>& y,
                       const std::vector<FitForm>& forms);

double median_of(std::vector<double> values);

struct MedianCI {
  double median = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Bootstrap percentile CI (2.5%/97.5%) of the median.
MedianCI bootstrap_median_ci(const std::vector<double>& values, int resamples,
                             Rng& rng);

}  // namespace dipsim
