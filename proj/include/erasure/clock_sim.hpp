#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "erasure/allan.hpp"
#include "erasure/estimation.hpp"
#include "erasure/states.hpp"

namespace erasure {

enum class LaserPhaseModel { UniformRandomPerCycle, FixedSweep };

std::string_view to_string(LaserPhaseModel model);
LaserPhaseModel parse_laser_phase_model(std::string_view name);

/// Differential comparison of two ensembles probed with a common laser.
struct ComparisonConfig {
  double phi_d = 1.0;          // injected differential phase, radians in [0, pi]
  std::uint64_t n0 = 1000;     // atoms loaded per ensemble
  double t_c = 1.0;            // interrogation (Ramsey dark) time, s
  double t_d = 0.0;            // dead time per cycle, s
  double f0 = 4.29e14;         // reference transition frequency, Hz
  std::uint64_t cycles = 1000;
  NoiseChannel noise = NoiseChannel::with_probability(ChannelKind::Erasure, 0.0);
  double contrast_a = 1.0;
  double contrast_b = 1.0;
  LaserPhaseModel laser_phase_model = LaserPhaseModel::UniformRandomPerCycle;
  std::uint64_t seed = 20240917;
  std::size_t window = 100;    // cycles per ellipse fit
  bool shot_noise = true;      // false: excitation fractions take their expected values

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  double error_probability() const { return noise.probability(t_c); }
  double cycle_time() const { return t_c + t_d; }
};

struct CycleResult {
  std::uint64_t index = 0;
  double theta = 0.0;  // common laser phase
  double x_a = 0.0;
  double x_b = 0.0;
  std::uint64_t n_a = 0;  // surviving atoms
  std::uint64_t n_b = 0;
  /// False when every atom of an ensemble was erased; x_a, x_b are NaN then.
  bool valid = true;
};

/// Simulates all cycles. Cycle i draws from its own stream seeded by
/// (seed, i), so the result is bit-identical for any `threads` (0 = hardware
/// concurrency).
std::vector<CycleResult> run_comparison(const ComparisonConfig& config, unsigned threads = 1);

/// (1/2pi)(1/f0) sqrt(1/(N T_c tau)), times sqrt(2) for a differential comparison.
double crb_floor(double n, double t_c, double tau_total, double f0, bool differential);

struct ComparisonAnalysis {
  std::size_t cycles = 0;
  std::size_t invalid_cycles = 0;
  std::size_t windows = 0;
  std::size_t failed_windows = 0;
  double mean_survivors = 0.0;     // per ensemble, averaged over both
  double survival_fraction = 0.0;  // mean_survivors / N0
  double q_measured = 0.0;         // 1 - N / N0
  EllipseJackknife ellipse;        // fit over all valid cycles
  std::vector<double> phase_series;
  AllanResult allan;               // of phi_d / (2 pi T_c f0), sample time = window cycle times
  double sigma = 0.0;              // Allan deviation at one window
  double sigma_error = 0.0;
  double tau_window = 0.0;
  /// Differential QPN floor for N0 atoms over the interrogations in one window.
  double crb_floor = 0.0;
};

/// Ellipse fits, fractional-frequency conversion and Allan analysis of a run.
/// Throws SimulationDegenerate when more than 10% of cycles are invalid or
/// fewer than four windows yield a phase.
ComparisonAnalysis analyze_comparison(const ComparisonConfig& config,
                                      std::span<const CycleResult> cycles);

struct ScalingPoint {
  double q = 0.0;
  double sigma = 0.0;
  double sigma_error = 0.0;
  double q_measured = 0.0;  // 1 - N/N0 for erasure, 1 - C for contrast loss
};

/// One simulated comparison per grid value with the noise replaced by a fixed
/// probability q of the given kind. Grid values must lie in [0, 0.95]. Each
/// point uses its own stream seed derived from the base seed and the grid
/// index (not the kind, so kinds share random numbers point by point).
std::vector<ScalingPoint> instability_vs_error_rate(const ComparisonConfig& base,
                                                    std::span<const double> q_grid,
                                                    ChannelKind kind, unsigned threads = 1);

struct ScalingFit {
  /// Free log-log regression of sigma against (1 - q).
  double exponent = 0.0;
  double exponent_error = 0.0;
  /// sigma(q) = sigma0 (1 - q)^fixed_exponent, sigma0 the only free parameter
  /// (weighted by the jackknife errors).
  double fixed_exponent = 0.0;
  double sigma0 = 0.0;
  double sigma0_error = 0.0;
  double reduced_chi2 = 0.0;
};

ScalingFit fit_scaling(std::span<const ScalingPoint> curve, double fixed_exponent);

/// Exponent of the instability bound: -1/2 for erasure, -1 otherwise.
double expected_scaling_exponent(ChannelKind kind);

}  // namespace erasure
