#include "erasure/clock_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "erasure/error.hpp"
#include "erasure/random.hpp"
#include "erasure/stats.hpp"

namespace erasure {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxInvalidFraction = 0.10;
constexpr double kMaxScalingQ = 0.95;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw InvalidArgument("config field '" + field + "' " + why);
}

struct EnsembleDraw {
  double x = 0.0;
  std::uint64_t survivors = 0;
  bool valid = true;
};

EnsembleDraw draw_ensemble(const ComparisonConfig& cfg, double q, double contrast, double phase,
                           std::mt19937_64& rng) {
  const bool erasure = cfg.noise.kind() == ChannelKind::Erasure;
  double c = contrast;
  if (cfg.noise.kind() == ChannelKind::Depolarizing) c *= 1.0 - q;
  if (cfg.noise.kind() == ChannelKind::Dephasing) c *= 1.0 - 2.0 * q;
  const double p_plus = std::clamp((1.0 + c * std::cos(phase)) / 2.0, 0.0, 1.0);

  EnsembleDraw out;
  if (!cfg.shot_noise) {
    out.survivors = erasure ? static_cast<std::uint64_t>(
                                  std::llround(static_cast<double>(cfg.n0) * (1.0 - q)))
                            : cfg.n0;
    out.x = p_plus;
  } else {
    out.survivors = cfg.n0;
    // q = 0 loses nothing; skipping the draw keeps the stream aligned with
    // the other kinds.
    if (erasure && q > 0.0) {
      std::binomial_distribution<std::uint64_t> loss(cfg.n0, 1.0 - q);
      out.survivors = loss(rng);
    }
    if (out.survivors > 0) {
      std::binomial_distribution<std::uint64_t> readout(out.survivors, p_plus);
      out.x = static_cast<double>(readout(rng)) / static_cast<double>(out.survivors);
    }
  }
  if (out.survivors == 0) {
    out.valid = false;
    out.x = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

CycleResult simulate_cycle(const ComparisonConfig& cfg, double q, std::uint64_t index) {
  auto rng = make_stream(cfg.seed, index);
  CycleResult r;
  r.index = index;
  r.theta = cfg.laser_phase_model == LaserPhaseModel::FixedSweep
                ? kTwoPi * static_cast<double>(index) / static_cast<double>(cfg.cycles)
                : kTwoPi * uniform01(rng);
  const auto a = draw_ensemble(cfg, q, cfg.contrast_a, r.theta, rng);
  const auto b = draw_ensemble(cfg, q, cfg.contrast_b, r.theta + cfg.phi_d, rng);
  r.x_a = a.x;
  r.x_b = b.x;
  r.n_a = a.survivors;
  r.n_b = b.survivors;
  r.valid = a.valid && b.valid;
  if (!r.valid) {
    r.x_a = std::numeric_limits<double>::quiet_NaN();
    r.x_b = r.x_a;
  }
  return r;
}

}  // namespace

std::string_view to_string(LaserPhaseModel model) {
  return model == LaserPhaseModel::FixedSweep ? "fixed_sweep" : "uniform_random_per_cycle";
}

LaserPhaseModel parse_laser_phase_model(std::string_view name) {
  if (name == "uniform_random_per_cycle") return LaserPhaseModel::UniformRandomPerCycle;
  if (name == "fixed_sweep") return LaserPhaseModel::FixedSweep;
  throw InvalidArgument("config field 'laser_phase_model' must be uniform_random_per_cycle or "
                        "fixed_sweep, got '" + std::string(name) + "'");
}

void ComparisonConfig::validate() const {
  if (!(phi_d >= 0.0 && phi_d <= std::numbers::pi)) bad_field("phi_d", "must lie in [0, pi]");
  if (n0 < 1) bad_field("N0", "must be >= 1");
  if (!(t_c > 0.0) || !std::isfinite(t_c)) bad_field("T_c", "must be positive");
  if (!(t_d >= 0.0) || !std::isfinite(t_d)) bad_field("T_d", "must be >= 0");
  if (!(f0 > 0.0) || !std::isfinite(f0)) bad_field("f0", "must be positive");
  if (cycles < 1) bad_field("cycles", "must be >= 1");
  if (!(contrast_a >= 0.0 && contrast_a <= 1.0)) bad_field("contrast_a", "must lie in [0, 1]");
  if (!(contrast_b >= 0.0 && contrast_b <= 1.0)) bad_field("contrast_b", "must lie in [0, 1]");
  if (window < kDefaultMinEllipsePoints) bad_field("window", "must be >= 6");
}

std::vector<CycleResult> run_comparison(const ComparisonConfig& config, unsigned threads) {
  config.validate();
  const double q = config.error_probability();
  const auto total = static_cast<std::size_t>(config.cycles);
  std::vector<CycleResult> results(total);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) results[i] = simulate_cycle(config, q, i);
  };
  if (threads <= 1) {
    work(0, total);
    return results;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (total + threads - 1) / threads;
  for (std::size_t begin = 0; begin < total; begin += chunk) {
    pool.emplace_back(work, begin, std::min(total, begin + chunk));
  }
  return results;
}

double crb_floor(double n, double t_c, double tau_total, double f0, bool differential) {
  if (!(n > 0.0 && t_c > 0.0 && tau_total > 0.0 && f0 > 0.0)) {
    throw InvalidArgument("crb_floor arguments must all be positive");
  }
  const double floor = std::sqrt(1.0 / (n * t_c * tau_total)) / (2.0 * std::numbers::pi * f0);
  return differential ? std::sqrt(2.0) * floor : floor;
}

ComparisonAnalysis analyze_comparison(const ComparisonConfig& config,
                                      std::span<const CycleResult> cycles) {
  ComparisonAnalysis out;
  out.cycles = cycles.size();
  if (cycles.empty()) throw SimulationDegenerate("no cycles to analyze");

  std::vector<ExcitationPair> pairs;
  pairs.reserve(cycles.size());
  double survivors = 0.0;
  for (const auto& c : cycles) {
    survivors += static_cast<double>(c.n_a + c.n_b);
    if (c.valid) {
      pairs.push_back({c.x_a, c.x_b});
    } else {
      ++out.invalid_cycles;
    }
  }
  out.mean_survivors = survivors / (2.0 * static_cast<double>(cycles.size()));
  out.survival_fraction = out.mean_survivors / static_cast<double>(config.n0);
  out.q_measured = 1.0 - out.survival_fraction;

  if (static_cast<double>(out.invalid_cycles) >
      kMaxInvalidFraction * static_cast<double>(cycles.size())) {
    throw SimulationDegenerate(std::to_string(out.invalid_cycles) + " of " +
                               std::to_string(cycles.size()) +
                               " cycles lost every atom of an ensemble (limit 10%)");
  }
  if (pairs.size() < 2 * config.window) {
    throw SimulationDegenerate("fewer than two windows of valid cycles");
  }

  try {
    const std::size_t blocks =
        std::clamp<std::size_t>(pairs.size() / (2 * kDefaultMinEllipsePoints), 2, 20);
    out.ellipse = ellipse_fit_jackknife(pairs, blocks);
  } catch (const FitFailure& e) {
    throw SimulationDegenerate(std::string("ellipse fit over all cycles failed: ") + e.what());
  }

  const auto series = phase_series_from_cycles(pairs, config.window);
  out.windows = series.size();
  const double to_fractional = 1.0 / (2.0 * std::numbers::pi * config.t_c * config.f0);
  for (const auto& phi : series) {
    if (phi) {
      out.phase_series.push_back(*phi);
    } else {
      ++out.failed_windows;
    }
  }
  if (out.phase_series.size() < 4) {
    throw SimulationDegenerate("fewer than four windows produced a differential phase");
  }
  std::vector<double> fractional;
  fractional.reserve(out.phase_series.size());
  for (double phi : out.phase_series) fractional.push_back(phi * to_fractional);

  out.tau_window = static_cast<double>(config.window) * config.cycle_time();
  out.allan = allan_deviation(fractional, out.tau_window);
  out.sigma = out.allan.front().deviation;
  out.sigma_error = out.allan.front().error;
  out.crb_floor = crb_floor(static_cast<double>(config.n0), config.t_c,
                            static_cast<double>(config.window) * config.t_c, config.f0, true);
  return out;
}

std::vector<ScalingPoint> instability_vs_error_rate(const ComparisonConfig& base,
                                                    std::span<const double> q_grid,
                                                    ChannelKind kind, unsigned threads) {
  for (double q : q_grid) {
    if (!(q >= 0.0 && q <= kMaxScalingQ)) {
      throw InvalidArgument("scaling grid value " + std::to_string(q) +
                            " outside the supported range [0, 0.95]");
    }
  }
  std::vector<ScalingPoint> curve;
  curve.reserve(q_grid.size());
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    ComparisonConfig cfg = base;
    cfg.noise = NoiseChannel::with_probability(kind, q_grid[i]);
    // Common random numbers across kinds: the same grid index draws from the
    // same stream, so q = 0 is the identical experiment for every kind.
    cfg.seed = stream_seed(base.seed, i);
    const auto cycles = run_comparison(cfg, threads);
    const auto analysis = analyze_comparison(cfg, cycles);

    ScalingPoint p;
    p.q = q_grid[i];
    p.sigma = analysis.sigma;
    p.sigma_error = analysis.sigma_error;
    if (kind == ChannelKind::Erasure) {
      p.q_measured = analysis.q_measured;
    } else {
      const double contrast =
          0.5 * (analysis.ellipse.fit.contrast_a + analysis.ellipse.fit.contrast_b);
      p.q_measured = 1.0 - contrast;
    }
    curve.push_back(p);
  }
  return curve;
}

double expected_scaling_exponent(ChannelKind kind) {
  return kind == ChannelKind::Erasure ? -0.5 : -1.0;
}

ScalingFit fit_scaling(std::span<const ScalingPoint> curve, double fixed_exponent) {
  if (curve.empty()) throw InvalidArgument("empty scaling curve");
  ScalingFit fit;
  fit.fixed_exponent = fixed_exponent;

  if (curve.size() >= 2) {
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& p : curve) {
      x.push_back(std::log1p(-p.q));
      y.push_back(std::log(p.sigma));
    }
    const auto reg = linear_regression(x, y);
    fit.exponent = reg.slope;
    fit.exponent_error = reg.slope_error;
  }

  const bool weighted =
      std::all_of(curve.begin(), curve.end(), [](const auto& p) { return p.sigma_error > 0.0; });
  double swgg = 0.0;
  double swsg = 0.0;
  for (const auto& p : curve) {
    const double w = weighted ? 1.0 / (p.sigma_error * p.sigma_error) : 1.0;
    const double g = std::pow(1.0 - p.q, fixed_exponent);
    swgg += w * g * g;
    swsg += w * p.sigma * g;
  }
  fit.sigma0 = swsg / swgg;
  double chi2 = 0.0;
  for (const auto& p : curve) {
    const double w = weighted ? 1.0 / (p.sigma_error * p.sigma_error) : 1.0;
    const double r = p.sigma - fit.sigma0 * std::pow(1.0 - p.q, fixed_exponent);
    chi2 += w * r * r;
  }
  const double dof = curve.size() > 1 ? static_cast<double>(curve.size() - 1) : 1.0;
  fit.reduced_chi2 = chi2 / dof;
  fit.sigma0_error = weighted ? std::sqrt(1.0 / swgg) : std::sqrt(fit.reduced_chi2 / swgg);
  return fit;
}

}  // namespace erasure
