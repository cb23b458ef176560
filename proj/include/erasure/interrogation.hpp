#pragma once

#include <vector>

#include "erasure/states.hpp"

namespace erasure {

struct OptimizationResult {
  double t_c_star = 0.0;   // seconds
  double sigma_star = 0.0; // relative instability, common arbitrary units
};

/// Model instability of a QPN-limited comparison with interrogation time t_c
/// and dead time t_d, in units shared by both channel kinds:
///   sigma(t_c) = F(q)^{-1/2} sqrt(t_c + t_d) / t_c,  q = 1 - exp(-gamma t_c),
/// with F = (1-q)^2 for contrast decay (depolarizing, dephasing) and
/// F = (1-q) for erasure.
double model_instability(double gamma, double t_d, ChannelKind kind, double t_c);

/// log sigma(t1) - log sigma(t2), evaluated without cancellation.
double model_log_instability_difference(double gamma, double t_d, ChannelKind kind, double t1,
                                        double t2);

/// Golden-section search on log t_c over [1e-3/gamma, 1e3/gamma] to relative
/// tolerance 1e-10.
OptimizationResult optimize_interrogation(double gamma, double t_d, ChannelKind kind);

struct GainPoint {
  double t_d = 0.0;
  double t_c_depolarizing = 0.0;
  double t_c_erasure = 0.0;
  double gain = 0.0;  // sigma*_depolarizing / sigma*_erasure
};

std::vector<GainPoint> erasure_conversion_gain_curve(double gamma,
                                                     const std::vector<double>& t_d_grid);

}  // namespace erasure
