#pragma once

#include <cmath>
#include <cstddef>

namespace erasure {

struct GoldenSectionResult {
  double x = 0.0;
  std::size_t iterations = 0;
};

/// Golden-section minimization of a unimodal function on [lo, hi], stopping
/// once the bracket is narrower than `tolerance` (absolute, in x).
///
/// `compare(x1, x2)` must return a value with the sign of f(x1) - f(x2). Taking
/// the difference directly lets callers evaluate it without the cancellation
/// that limits plain function-value comparisons to ~sqrt(eps) in x.
template <typename Compare>
GoldenSectionResult golden_section_minimize_by(Compare&& compare, double lo, double hi,
                                               double tolerance, std::size_t max_iterations = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  std::size_t it = 0;
  while (hi - lo > tolerance && it < max_iterations) {
    if (compare(c, d) < 0.0) {
      hi = d;
      d = c;
      c = hi - inv_phi * (hi - lo);
    } else {
      lo = c;
      c = d;
      d = lo + inv_phi * (hi - lo);
    }
    ++it;
  }
  return {0.5 * (lo + hi), it};
}

template <typename F>
GoldenSectionResult golden_section_minimize(F&& f, double lo, double hi, double tolerance,
                                            std::size_t max_iterations = 500) {
  return golden_section_minimize_by([&](double a, double b) { return f(a) - f(b); }, lo, hi,
                                    tolerance, max_iterations);
}

}  // namespace erasure
