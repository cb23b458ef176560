#include "erasure/states.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "erasure/error.hpp"

namespace erasure {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNegativeProbabilityTolerance = 1e-14;
constexpr double kLeakTolerance = 1e-12;

void require_probability(double q, const char* what) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidArgument(std::string(what) + " must lie in [0, 1], got " + std::to_string(q));
  }
}

double clamp_probability(double p) {
  if (p < 0.0) {
    if (p < -kNegativeProbabilityTolerance) {
      throw Error("negative outcome probability " + std::to_string(p));
    }
    return 0.0;
  }
  return p;
}

}  // namespace

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Depolarizing:
      return "depolarizing";
    case ChannelKind::Dephasing:
      return "dephasing";
    case ChannelKind::Erasure:
      return "erasure";
  }
  return "unknown";
}

ChannelKind parse_channel_kind(std::string_view name) {
  if (name == "depolarizing") return ChannelKind::Depolarizing;
  if (name == "dephasing") return ChannelKind::Dephasing;
  if (name == "erasure") return ChannelKind::Erasure;
  throw InvalidArgument("unknown channel kind '" + std::string(name) +
                        "' (expected depolarizing, dephasing or erasure)");
}

NoiseChannel NoiseChannel::with_probability(ChannelKind kind, double q) {
  require_probability(q, "noise probability q");
  return NoiseChannel(kind, false, q);
}

NoiseChannel NoiseChannel::with_rate(ChannelKind kind, double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("noise rate gamma must be finite and >= 0, got " + std::to_string(gamma));
  }
  return NoiseChannel(kind, true, gamma);
}

double NoiseChannel::probability(double t_c) const {
  if (!has_rate_) return value_;
  return -std::expm1(-value_ * t_c);
}

double wrap_angle(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a value just below a multiple of 2 pi can round up to 2 pi.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

MeasurementBasis::MeasurementBasis(double theta) : theta_(wrap_angle(theta)) {}

SensorState prepare_plus() { return SensorState{{1.0, 0.0, 0.0}, 0.0}; }

SensorState accumulate_phase(const SensorState& state, double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  SensorState out = state;
  out.bloch[0] = c * state.bloch[0] - s * state.bloch[1];
  out.bloch[1] = s * state.bloch[0] + c * state.bloch[1];
  return out;
}

SensorState apply_noise(const SensorState& state, ChannelKind kind, double q) {
  require_probability(q, "noise probability q");
  SensorState out = state;
  switch (kind) {
    case ChannelKind::Depolarizing:
      for (double& r : out.bloch) r *= (1.0 - q);
      break;
    case ChannelKind::Dephasing:
      out.bloch[0] *= (1.0 - 2.0 * q);
      out.bloch[1] *= (1.0 - 2.0 * q);
      break;
    case ChannelKind::Erasure:
      // Survival probabilities multiply: 1 - w' = (1 - w)(1 - q).
      out.erasure_weight = state.erasure_weight + q * (1.0 - state.erasure_weight);
      break;
  }
  return out;
}

OutcomeDistribution measure_probs(const SensorState& state, const MeasurementBasis& basis,
                                  bool erasure_detection) {
  const double leak = state.erasure_weight;
  if (!erasure_detection && leak > kLeakTolerance) {
    throw InvalidArgument("measurement without erasure detection on a state with leak population " +
                          std::to_string(leak));
  }
  const double projection =
      state.bloch[0] * std::cos(basis.theta()) + state.bloch[1] * std::sin(basis.theta());
  const double kept = erasure_detection ? 1.0 - leak : 1.0;

  OutcomeDistribution dist;
  dist.p_plus = clamp_probability(kept * (1.0 + projection) / 2.0);
  dist.p_minus = clamp_probability(kept * (1.0 - projection) / 2.0);
  dist.p_erasure = erasure_detection ? clamp_probability(leak) : 0.0;
  return dist;
}

Outcome sample_outcome(const OutcomeDistribution& dist, std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  if (u < dist.p_plus) return Outcome::Plus;
  if (u < dist.p_plus + dist.p_minus) return Outcome::Minus;
  return Outcome::Erasure;
}

}  // namespace erasure
