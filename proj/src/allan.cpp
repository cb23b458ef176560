#include "erasure/allan.hpp"

#include <cmath>
#include <string>

#include "erasure/error.hpp"
#include "erasure/stats.hpp"

namespace erasure {

AllanResult allan_deviation(std::span<const double> series, double sample_time) {
  if (series.size() < 4) {
    throw InvalidArgument("Allan deviation needs at least 4 samples, got " +
                          std::to_string(series.size()));
  }
  if (!(sample_time > 0.0)) {
    throw InvalidArgument("sample time must be positive");
  }
  const std::size_t n = series.size();

  // Prefix sums of the series relative to its first sample; a constant series
  // then has exactly zero differences.
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (series[i] - series[0]);

  AllanResult result;
  std::vector<double> sq;
  for (std::size_t m = 1; 2 * m <= n; m *= 2) {
    const std::size_t terms = n - 2 * m + 1;
    const std::size_t blocks = terms / m;
    if (blocks < 2) break;

    const double inv_m = 1.0 / static_cast<double>(m);
    sq.assign(terms, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < terms; ++k) {
      const double first = (prefix[k + m] - prefix[k]) * inv_m;
      const double second = (prefix[k + 2 * m] - prefix[k + m]) * inv_m;
      sq[k] = (second - first) * (second - first);
      total += sq[k];
    }

    AllanPoint point;
    point.m = m;
    point.tau = static_cast<double>(m) * sample_time;
    point.deviation = std::sqrt(0.5 * total / static_cast<double>(terms));

    // Leave out one block of m consecutive difference terms; the last block
    // absorbs the remainder.
    std::vector<double> replicates;
    replicates.reserve(blocks);
    for (std::size_t j = 0; j < blocks; ++j) {
      const std::size_t begin = j * m;
      const std::size_t end = j + 1 == blocks ? terms : begin + m;
      double dropped = 0.0;
      for (std::size_t k = begin; k < end; ++k) dropped += sq[k];
      const double kept = static_cast<double>(terms - (end - begin));
      replicates.push_back(std::sqrt(0.5 * std::max(total - dropped, 0.0) / kept));
    }
    const double g = static_cast<double>(blocks);
    const double avg = mean(replicates);
    double ss = 0.0;
    for (double r : replicates) ss += (r - avg) * (r - avg);
    point.error = std::sqrt((g - 1.0) / g * ss);

    result.push_back(point);
  }
  return result;
}

double allan_loglog_slope(const AllanResult& result, double max_tau) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : result) {
    if (p.tau > max_tau) continue;
    if (!(p.deviation > 0.0)) {
      throw InvalidArgument("log-log slope undefined for a zero Allan deviation");
    }
    x.push_back(std::log(p.tau));
    y.push_back(std::log(p.deviation));
  }
  return linear_regression(x, y).slope;
}

}  // namespace erasure
