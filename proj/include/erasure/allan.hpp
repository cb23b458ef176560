#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace erasure {

struct AllanPoint {
  std::size_t m = 0;   // averaging factor
  double tau = 0.0;    // m * sample_time, seconds
  double deviation = 0.0;
  double error = 0.0;  // jackknife standard error
};

using AllanResult = std::vector<AllanPoint>;

/// Overlapping Allan deviation of a fractional-frequency series at octave
/// averaging factors m = 1, 2, 4, ...:
///   sigma_y^2(m) = 1/2 < (ybar_{k+m} - ybar_k)^2 >  over all k,
/// where ybar_k averages m consecutive samples from k.
///
/// Errors come from a leave-one-block-out jackknife over the difference terms
/// with block length m. A factor m is reported only when at least two blocks
/// are available. Throws InvalidArgument for fewer than 4 samples.
AllanResult allan_deviation(std::span<const double> series, double sample_time);

/// Least-squares slope of log sigma against log tau over points with
/// tau <= max_tau.
double allan_loglog_slope(const AllanResult& result, double max_tau);

}  // namespace erasure
