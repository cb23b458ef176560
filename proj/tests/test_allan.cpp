#include <doctest.h>

#include <cmath>
#include <random>

#include "erasure/allan.hpp"
#include "erasure/error.hpp"
#include "erasure/stats.hpp"

using namespace erasure;

namespace {

// Direct O(n m) evaluation of the overlapping estimator.
double brute_adev(const std::vector<double>& y, std::size_t m) {
  const std::size_t terms = y.size() - 2 * m + 1;
  double acc = 0;
  for (std::size_t k = 0; k < terms; ++k) {
    double a = 0, b = 0;
    for (std::size_t i = 0; i < m; ++i) {
      a += y[k + i];
      b += y[k + m + i];
    }
    const double d = (b - a) / static_cast<double>(m);
    acc += d * d;
  }
  return std::sqrt(0.5 * acc / static_cast<double>(terms));
}

std::vector<double> white(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> y(n);
  for (auto& v : y) v = g(rng);
  return y;
}

}  // namespace

TEST_CASE("overlapping estimator matches direct evaluation") {
  const auto y = white(1000, 11);
  const auto res = allan_deviation(y, 2.5);
  REQUIRE(!res.empty());
  std::size_t expect_m = 1;
  for (const auto& p : res) {
    CHECK(p.m == expect_m);
    CHECK(p.tau == doctest::Approx(2.5 * static_cast<double>(p.m)));
    CHECK(p.deviation == doctest::Approx(brute_adev(y, p.m)).epsilon(1e-10));
    CHECK(p.error > 0);
    expect_m *= 2;
  }
  // Largest m keeps at least two jackknife blocks.
  const auto m_last = res.back().m;
  CHECK((1000 - 2 * m_last + 1) / m_last >= 2);
  CHECK((1000 - 4 * m_last + 1) / (2 * m_last) < 2);
}

TEST_CASE("constant series has zero deviation") {
  std::vector<double> y(257, 3.7e-16);
  for (const auto& p : allan_deviation(y, 1.0)) {
    CHECK(p.deviation == 0.0);
    CHECK(p.error == 0.0);
  }
}

TEST_CASE("white frequency noise slope") {
  const auto res = allan_deviation(white(10000, 12), 1.0);
  CHECK(allan_loglog_slope(res, 1e9) == doctest::Approx(-0.5).epsilon(0.1));
  // Unit variance per sample: sigma(1) = 1.
  CHECK(res.front().deviation == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("linear drift slope") {
  std::vector<double> y(4096);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 1e-3 * static_cast<double>(i);
  const double slope = allan_loglog_slope(allan_deviation(y, 1.0), 1e9);
  CHECK(std::abs(slope - 1.0) <= 0.05);
}

TEST_CASE("jackknife error tracks the scatter of the white-noise estimate") {
  std::vector<double> at1;
  double jk = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto res = allan_deviation(white(2000, 100 + s), 1.0);
    at1.push_back(res[2].deviation);
    jk += res[2].error;
  }
  jk /= 200;
  const double scatter = std::sqrt(sample_variance(at1));
  CHECK(jk / scatter > 0.5);
  CHECK(jk / scatter < 2.0);
}

TEST_CASE("allan error paths") {
  std::vector<double> y{1, 2, 3};
  CHECK_THROWS_AS(allan_deviation(y, 1.0), InvalidArgument);
  y.push_back(4);
  CHECK_THROWS_AS(allan_deviation(y, 0.0), InvalidArgument);
  CHECK(allan_deviation(y, 1.0).size() == 1);
  std::vector<double> c(16, 1.0);
  CHECK_THROWS_AS(allan_loglog_slope(allan_deviation(c, 1.0), 1e9), InvalidArgument);
}
