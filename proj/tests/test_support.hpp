#pragma once

// Test-only oracles and generators. Nothing here calls into the library code
// paths it is used to check.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "erasure/estimation.hpp"
#include "erasure/fisher.hpp"

namespace erasure::testing {

inline constexpr double kPi = std::numbers::pi;

/// Closed-form outcome probabilities of the noisy Ramsey sensor, written out
/// directly rather than through the state/channel pipeline.
struct DirectProbs {
  double plus, minus, erased;
};

inline DirectProbs direct_probs(ChannelKind kind, double q, double phi, double theta) {
  const double d = phi - theta;
  switch (kind) {
    case ChannelKind::Depolarizing:
      return {(1 + (1 - q) * std::cos(d)) / 2, (1 - (1 - q) * std::cos(d)) / 2, 0.0};
    case ChannelKind::Dephasing:
      return {(1 + (1 - 2 * q) * std::cos(d)) / 2, (1 - (1 - 2 * q) * std::cos(d)) / 2, 0.0};
    case ChannelKind::Erasure:
      return {(1 - q) * (1 + std::cos(d)) / 2, (1 - q) * (1 - std::cos(d)) / 2, q};
  }
  return {0, 0, 0};
}

/// Fisher information from the analytic derivatives of direct_probs.
inline double direct_fisher(ChannelKind kind, double q, double phi, double theta) {
  const double d = phi - theta;
  const auto p = direct_probs(kind, q, phi, theta);
  double amp = 0.0;
  switch (kind) {
    case ChannelKind::Depolarizing:
      amp = 1 - q;
      break;
    case ChannelKind::Dephasing:
      amp = 1 - 2 * q;
      break;
    case ChannelKind::Erasure:
      amp = 1 - q;
      break;
  }
  const double dp = -amp * std::sin(d) / 2;  // d p_plus / d phi; d p_minus = -dp
  double f = 0.0;
  if (p.plus > 0) f += dp * dp / p.plus;
  if (p.minus > 0) f += dp * dp / p.minus;
  return f;
}

/// Noiseless Lissajous points x = o_a + (c_a/2) cos t, y = o_b + (c_b/2) cos(t + phi_d).
inline std::vector<ExcitationPair> synthetic_ellipse(std::size_t n, double phi_d, double c_a,
                                                     double c_b, double t0 = 0.1) {
  std::vector<ExcitationPair> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + 2 * kPi * static_cast<double>(i) / static_cast<double>(n);
    pts.push_back({0.5 + 0.5 * c_a * std::cos(t), 0.5 + 0.5 * c_b * std::cos(t + phi_d)});
  }
  return pts;
}

/// Shot-noise ellipse: common uniform phase per point, binomial readout of n atoms.
inline std::vector<ExcitationPair> noisy_ellipse(std::size_t n, double phi_d, std::uint64_t atoms,
                                                 double contrast, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
  std::vector<ExcitationPair> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = phase(rng);
    std::binomial_distribution<std::uint64_t> a(atoms, (1 + contrast * std::cos(t)) / 2);
    std::binomial_distribution<std::uint64_t> b(atoms, (1 + contrast * std::cos(t + phi_d)) / 2);
    pts.push_back({static_cast<double>(a(rng)) / static_cast<double>(atoms),
                   static_cast<double>(b(rng)) / static_cast<double>(atoms)});
  }
  return pts;
}

/// Multinomial counts for `shots` repetitions of the sensor.
inline CountRecord sample_counts(ChannelKind kind, double q, double phi, double theta,
                                 std::uint64_t shots, std::mt19937_64& rng) {
  const auto p = direct_probs(kind, q, phi, theta);
  CountRecord rec;
  rec.kind = kind;
  rec.q = q;
  rec.theta = theta;
  std::uint64_t remaining = shots;
  if (kind == ChannelKind::Erasure) {
    rec.n_erasure = std::binomial_distribution<std::uint64_t>(shots, q)(rng);
    remaining -= rec.n_erasure;
  }
  const double p_plus_given_kept = p.plus / (p.plus + p.minus);
  rec.n_plus = std::binomial_distribution<std::uint64_t>(remaining, p_plus_given_kept)(rng);
  rec.n_minus = remaining - rec.n_plus;
  return rec;
}

inline double variance_of(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

// General SLD quantum Fisher information for a unitary family generated by H:
// F = 2 sum_{i,j: l_i + l_j > 0} (l_i - l_j)^2 / (l_i + l_j) |<i|H|j>|^2.
inline double sld_qfi(const Matrix2c& rho, const Matrix2c& h) {
  Eigen::SelfAdjointEigenSolver<Matrix2c> eig(rho);
  const auto& l = eig.eigenvalues();
  const auto& v = eig.eigenvectors();
  double f = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double s = l(i) + l(j);
      if (s <= 1e-15) continue;
      const std::complex<double> hij = v.col(i).adjoint() * h * v.col(j);
      f += 2.0 * (l(i) - l(j)) * (l(i) - l(j)) / s * std::norm(hij);
    }
  }
  return f;
}

inline DensityMatrix2 random_pure(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return DensityMatrix2::pure({g(rng), g(rng)}, {g(rng), g(rng)});
}

inline Matrix2c random_hermitian(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix2c h;
  h << g(rng), std::complex<double>(g(rng), g(rng)), 0.0, g(rng);
  h(1, 0) = std::conj(h(0, 1));
  return h;
}

}  // namespace erasure::testing
