#pragma once

#include <span>

namespace erasure {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_error = 0.0;
  double intercept_error = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs at least two distinct
/// x values; standard errors need at least three points and are zero otherwise.
LinearFit linear_regression(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
/// Unbiased sample variance.
double sample_variance(std::span<const double> v);

}  // namespace erasure
