#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string_view>

namespace erasure {

/// Single sensor: qubit Bloch vector plus population of the detectable leak
/// level |-1>. The full state is (1 - erasure_weight) (I + r.sigma)/2 +
/// erasure_weight |-1><-1|.
struct SensorState {
  std::array<double, 3> bloch{0.0, 0.0, 0.0};
  double erasure_weight = 0.0;
};

enum class ChannelKind { Depolarizing, Dephasing, Erasure };

std::string_view to_string(ChannelKind kind);
ChannelKind parse_channel_kind(std::string_view name);

/// Noise strength is either a fixed probability q or a rate gamma (1/s),
/// in which case q = 1 - exp(-gamma * T_c).
///
/// Dephasing scales coherences by (1 - 2q), so its contrast magnitude is
/// symmetric under q -> 1 - q and vanishes at q = 1/2.
class NoiseChannel {
 public:
  static NoiseChannel with_probability(ChannelKind kind, double q);
  static NoiseChannel with_rate(ChannelKind kind, double gamma);

  ChannelKind kind() const { return kind_; }
  bool has_rate() const { return has_rate_; }
  double rate() const { return value_; }

  /// Error probability after an interrogation of length t_c seconds.
  double probability(double t_c) const;

 private:
  NoiseChannel(ChannelKind kind, bool has_rate, double value)
      : kind_(kind), has_rate_(has_rate), value_(value) {}

  ChannelKind kind_;
  bool has_rate_;
  double value_;
};

/// Measurement basis |+-theta> = (|0> +- e^{i theta}|1>)/sqrt(2).
class MeasurementBasis {
 public:
  explicit MeasurementBasis(double theta = 0.0);
  double theta() const { return theta_; }

 private:
  double theta_;
};

struct OutcomeDistribution {
  double p_plus = 0.0;
  double p_minus = 0.0;
  double p_erasure = 0.0;
};

enum class Outcome { Plus, Minus, Erasure };

/// Reduces an angle into [0, 2 pi).
double wrap_angle(double angle);

SensorState prepare_plus();

/// Free evolution under exp(-i phi sigma_z / 2): rotates the Bloch vector by
/// phi about z.
SensorState accumulate_phase(const SensorState& state, double phi);

/// Throws InvalidArgument for q outside [0, 1].
SensorState apply_noise(const SensorState& state, ChannelKind kind, double q);

/// Terminal measurement in the given basis. Without erasure detection the
/// state must have no leak population.
OutcomeDistribution measure_probs(const SensorState& state, const MeasurementBasis& basis,
                                  bool erasure_detection);

Outcome sample_outcome(const OutcomeDistribution& dist, std::mt19937_64& rng);

}  // namespace erasure
