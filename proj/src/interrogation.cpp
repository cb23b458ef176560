#include "erasure/interrogation.hpp"

#include <cmath>
#include <string>

#include "erasure/error.hpp"
#include "erasure/golden_section.hpp"

namespace erasure {
namespace {

constexpr double kRelativeTolerance = 1e-10;

// F^{-1/2} = exp(k gamma t_c) with k = 1 for contrast decay, 1/2 for erasure.
double decay_exponent(ChannelKind kind) { return kind == ChannelKind::Erasure ? 0.5 : 1.0; }

void require_inputs(double gamma, double t_d) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("decay rate must be positive, got " + std::to_string(gamma));
  }
  if (!(t_d >= 0.0) || !std::isfinite(t_d)) {
    throw InvalidArgument("dead time must be >= 0, got " + std::to_string(t_d));
  }
}

}  // namespace

double model_instability(double gamma, double t_d, ChannelKind kind, double t_c) {
  return std::exp(decay_exponent(kind) * gamma * t_c) * std::sqrt(t_c + t_d) / t_c;
}

double model_log_instability_difference(double gamma, double t_d, ChannelKind kind, double t1,
                                        double t2) {
  const double du = std::log(t1 / t2);
  const double dt = t2 * std::expm1(du);
  return decay_exponent(kind) * gamma * dt + 0.5 * std::log1p(dt / (t2 + t_d)) - du;
}

OptimizationResult optimize_interrogation(double gamma, double t_d, ChannelKind kind) {
  require_inputs(gamma, t_d);
  const double lo = std::log(1e-3 / gamma);
  const double hi = std::log(1e3 / gamma);
  const auto compare = [&](double u1, double u2) {
    return model_log_instability_difference(gamma, t_d, kind, std::exp(u1), std::exp(u2));
  };
  const auto best = golden_section_minimize_by(compare, lo, hi, kRelativeTolerance);
  const double t_c = std::exp(best.x);
  return {t_c, model_instability(gamma, t_d, kind, t_c)};
}

std::vector<GainPoint> erasure_conversion_gain_curve(double gamma,
                                                     const std::vector<double>& t_d_grid) {
  std::vector<GainPoint> curve;
  curve.reserve(t_d_grid.size());
  for (double t_d : t_d_grid) {
    const auto depol = optimize_interrogation(gamma, t_d, ChannelKind::Depolarizing);
    const auto erased = optimize_interrogation(gamma, t_d, ChannelKind::Erasure);
    curve.push_back({t_d, depol.t_c_star, erased.t_c_star, depol.sigma_star / erased.sigma_star});
  }
  return curve;
}

}  // namespace erasure
