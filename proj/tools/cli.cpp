#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "erasure/clock_sim.hpp"
#include "erasure/error.hpp"
#include "erasure/estimation.hpp"
#include "erasure/fisher.hpp"
#include "erasure/interrogation.hpp"
#include "erasure/io.hpp"

#ifndef ERASURE_VERSION
#define ERASURE_VERSION "0.0.0"
#endif

namespace erasure::cli {
namespace fs = std::filesystem;

namespace {

double parse_radians(const std::string& text, const char* flag) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw InvalidArgument(std::string(flag) + " expects a plain number in radians, got '" + text +
                          "' (degrees are not accepted)");
  }
  return value;
}

std::vector<double> parse_grid(const std::string& text, const char* flag) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw InvalidArgument(std::string(flag) + ": cannot parse grid value '" + item + "'");
    }
    grid.push_back(v);
  }
  if (grid.empty()) throw InvalidArgument(std::string(flag) + ": empty grid");
  return grid;
}

// Scalars always carry a decimal point or exponent so they read as reals.
std::string format_scalar(double v) {
  std::string s = format_double(v);
  if (s.find_first_of(".eni") == std::string::npos) s += ".0";
  return s;
}

std::string grid_to_string(const std::vector<double>& grid) {
  std::string s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) s += ',';
    s += format_double(grid[i]);
  }
  return s;
}

/// Collects outputs of one command and writes the manifest last.
class RunRecorder {
 public:
  RunRecorder(std::string command, fs::path dir)
      : command_(std::move(command)), dir_(std::move(dir)),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(dir_);
  }

  fs::path write(const std::string& name, const std::string& contents) {
    const fs::path path = dir_ / name;
    write_file_atomically(path, contents);
    outputs_.push_back(name);
    return path;
  }

  void finish(const Json& config, std::uint64_t seed, const Json& extra = Json::object()) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json manifest;
    manifest["command"] = command_;
    manifest["config"] = config;
    manifest["seed"] = seed;
    manifest["version"] = ERASURE_VERSION;
    manifest["outputs"] = outputs_;
    manifest["duration_seconds"] = seconds;
    for (const auto& [k, v] : extra.items()) manifest[k] = v;
    write_file_atomically(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
};

fs::path resolve_out_dir(const std::string& flag_value, const std::string& command) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return fs::path(env) / command;
  return fs::path("erasure-out") / command;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct FisherArgs {
  std::string kind;
  double q = 0.0;
  std::string phi = "0";
  std::string theta = "0";
  bool numeric = false;
  double step = 1e-5;
  std::string out;
};

int cmd_fisher(const FisherArgs& a, std::ostream& out) {
  const ChannelKind kind = parse_channel_kind(a.kind);
  const double phi = parse_radians(a.phi, "--phi");
  const double theta = parse_radians(a.theta, "--theta");
  if (!(a.q >= 0.0 && a.q <= 1.0)) throw InvalidArgument("--q must lie in [0, 1]");

  RunRecorder rec("fisher", resolve_out_dir(a.out, "fisher"));
  const double analytic = fisher_analytic(kind, a.q, phi - theta);
  Json result{{"kind", std::string(to_string(kind))},
              {"q", a.q},
              {"phi", phi},
              {"theta", theta},
              {"analytic", analytic}};
  if (!a.numeric) {
    out << format_scalar(analytic) << '\n';
  } else {
    const double numeric =
        classical_fisher_numeric(sensing_model(kind, a.q, theta), phi, a.step);
    result["numeric"] = numeric;
    result["difference"] = numeric - analytic;
    out << "analytic " << format_scalar(analytic) << '\n'
        << "numeric " << format_scalar(numeric) << '\n'
        << "difference " << format_scalar(numeric - analytic) << '\n';
  }
  rec.write("fisher.json", result.dump(2) + "\n");
  Json config{{"kind", a.kind}, {"q", a.q},           {"phi", phi},
              {"theta", theta}, {"numeric", a.numeric}, {"step", a.step}};
  rec.finish(config, kDefaultSeed);
  return kSuccess;
}

struct SimulateArgs {
  std::string config;
  std::string out;
  unsigned threads = 1;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const ComparisonConfig cfg = load_config(a.config);
  RunRecorder rec("simulate", resolve_out_dir(a.out, "simulate"));

  const auto cycles = run_comparison(cfg, a.threads);
  std::ostringstream csv;
  write_cycles_csv(csv, cycles);
  rec.write("cycles.csv", csv.str());

  const auto analysis = analyze_comparison(cfg, cycles);
  std::ostringstream allan_csv;
  write_allan_csv(allan_csv, analysis.allan);
  rec.write("allan.csv", allan_csv.str());
  rec.write("allan.json", allan_to_json(analysis.allan).dump(2) + "\n");
  const Json summary = analysis_to_json(analysis);
  rec.write("summary.json", summary.dump(2) + "\n");

  out << "sigma " << format_scalar(analysis.sigma) << " +- " << format_scalar(analysis.sigma_error)
      << " at tau " << format_scalar(analysis.tau_window) << " s (floor "
      << format_scalar(analysis.crb_floor) << ")\n";
  rec.finish(config_to_json(cfg), cfg.seed,
             Json{{"threads", a.threads},
                  {"mean_survivors", analysis.mean_survivors},
                  {"survival_fraction", analysis.survival_fraction},
                  {"q_measured", analysis.q_measured}});
  return kSuccess;
}

struct ScalingArgs {
  std::string config;
  std::string kind = "both";
  std::string q_grid = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8";
  std::string out;
  unsigned threads = 1;
};

int cmd_scaling(const ScalingArgs& a, std::ostream& out) {
  const ComparisonConfig base = load_config(a.config);
  const auto grid = parse_grid(a.q_grid, "--q-grid");
  for (double q : grid) {
    if (!(q >= 0.0 && q <= 0.95)) {
      throw InvalidArgument("--q-grid value " + format_double(q) +
                            " outside the supported range [0, 0.95]");
    }
  }
  std::vector<ChannelKind> kinds;
  if (a.kind == "both") {
    kinds = {ChannelKind::Erasure, ChannelKind::Depolarizing};
  } else {
    kinds = {parse_channel_kind(a.kind)};
  }

  RunRecorder rec("scaling", resolve_out_dir(a.out, "scaling"));
  std::vector<std::vector<ScalingPoint>> curves;
  Json fits = Json::object();
  for (ChannelKind kind : kinds) {
    curves.push_back(instability_vs_error_rate(base, grid, kind, a.threads));
    const auto fit = fit_scaling(curves.back(), expected_scaling_exponent(kind));
    fits[std::string(to_string(kind))] = {{"exponent", fit.exponent},
                                          {"exponent_error", fit.exponent_error},
                                          {"fixed_exponent", fit.fixed_exponent},
                                          {"sigma0", fit.sigma0},
                                          {"sigma0_error", fit.sigma0_error},
                                          {"reduced_chi2", fit.reduced_chi2}};
  }

  std::ostringstream csv;
  csv << "q";
  for (ChannelKind kind : kinds) {
    const std::string k(to_string(kind));
    csv << ",sigma_" << k << ",sigma_" << k << "_error,q_measured_" << k;
  }
  csv << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv << format_double(grid[i]);
    for (const auto& curve : curves) {
      csv << ',' << format_double(curve[i].sigma) << ',' << format_double(curve[i].sigma_error)
          << ',' << format_double(curve[i].q_measured);
    }
    csv << '\n';
  }
  rec.write("scaling.csv", csv.str());
  rec.write("scaling_fit.json", fits.dump(2) + "\n");
  out << csv.str();
  for (const auto& [kind, fit] : fits.items()) {
    out << kind << " exponent " << format_scalar(fit["exponent"].get<double>()) << " +- "
        << format_scalar(fit["exponent_error"].get<double>()) << '\n';
  }
  Json config{{"base", config_to_json(base)}, {"kind", a.kind}, {"q_grid", grid_to_string(grid)}};
  rec.finish(config, base.seed, Json{{"threads", a.threads}});
  return kSuccess;
}

struct OptimizeArgs {
  double gamma = 0.0;
  std::string grid = "0";
  std::string out;
};

int cmd_optimize(const OptimizeArgs& a, std::ostream& out) {
  if (!(a.gamma > 0.0)) throw InvalidArgument("--gamma must be positive");
  const auto grid = parse_grid(a.grid, "--dead-time-grid");
  for (double t : grid) {
    if (!(t >= 0.0)) throw InvalidArgument("--dead-time-grid values must be >= 0");
  }
  RunRecorder rec("optimize", resolve_out_dir(a.out, "optimize"));
  const auto curve = erasure_conversion_gain_curve(a.gamma, grid);
  std::ostringstream csv;
  write_gain_csv(csv, curve);
  rec.write("optimize.csv", csv.str());
  out << csv.str();
  rec.finish(Json{{"gamma", a.gamma}, {"dead_time_grid", grid_to_string(grid)}}, kDefaultSeed);
  return kSuccess;
}

struct EllipseArgs {
  std::string points;
  std::string out;
};

int cmd_ellipse(const EllipseArgs& a, std::ostream& out) {
  std::ifstream in(a.points);
  if (!in) throw InvalidArgument("cannot read " + a.points);
  const auto points = read_excitation_csv(in);
  if (points.size() < kDefaultMinEllipsePoints) {
    throw InvalidArgument("ellipse fit needs at least 6 rows, got " +
                          std::to_string(points.size()));
  }
  RunRecorder rec("ellipse", resolve_out_dir(a.out, "ellipse"));
  const auto fit = ellipse_fit(points);
  const std::string json = ellipse_to_json(fit).dump(2) + "\n";
  rec.write("ellipse.json", json);
  out << json;
  rec.finish(Json{{"points", a.points}}, kDefaultSeed);
  return kSuccess;
}

struct AllanArgs {
  std::string series;
  double sample_time = 1.0;
  std::string out;
};

int cmd_allan(const AllanArgs& a, std::ostream& out) {
  std::ifstream in(a.series);
  if (!in) throw InvalidArgument("cannot read " + a.series);
  if (!(a.sample_time > 0.0)) throw InvalidArgument("--sample-time must be positive");
  const auto series = read_series(in);
  RunRecorder rec("allan", resolve_out_dir(a.out, "allan"));
  const auto result = allan_deviation(series, a.sample_time);
  std::ostringstream csv;
  write_allan_csv(csv, result);
  rec.write("allan.csv", csv.str());
  const std::string json = allan_to_json(result).dump(2) + "\n";
  rec.write("allan.json", json);
  out << json;
  rec.finish(Json{{"series", a.series}, {"sample_time", a.sample_time}}, kDefaultSeed);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Erasure-error quantum sensing toolkit", "erasure-sense"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ERASURE_VERSION);

  FisherArgs fisher;
  auto* f = app.add_subcommand("fisher", "Classical Fisher information of a noisy Ramsey sensor");
  f->add_option("--kind", fisher.kind, "depolarizing | dephasing | erasure")->required();
  f->add_option("--q", fisher.q, "Error probability in [0, 1]")->required();
  f->add_option("--phi", fisher.phi, "Phase, radians");
  f->add_option("--theta", fisher.theta, "Measurement basis angle, radians");
  f->add_flag("--numeric", fisher.numeric, "Also evaluate by finite differences");
  f->add_option("--step", fisher.step, "Finite-difference step");
  f->add_option("--out", fisher.out, "Output directory");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate a differential clock comparison");
  s->add_option("config", sim.config, "Comparison config JSON")->required();
  s->add_option("--out", sim.out, "Output directory");
  s->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");

  ScalingArgs scaling;
  auto* sc = app.add_subcommand("scaling", "Instability against error rate");
  sc->add_option("config", scaling.config, "Base comparison config JSON")->required();
  sc->add_option("--kind", scaling.kind, "both | erasure | depolarizing | dephasing");
  sc->add_option("--q-grid", scaling.q_grid, "Comma-separated error rates in [0, 0.95]");
  sc->add_option("--out", scaling.out, "Output directory");
  sc->add_option("--threads", scaling.threads, "Worker threads (0 = all cores)");

  OptimizeArgs opt;
  auto* o = app.add_subcommand("optimize", "Optimal interrogation time and erasure-conversion gain");
  o->add_option("--gamma", opt.gamma, "Contrast decay rate, 1/s")->required();
  o->add_option("--dead-time-grid", opt.grid, "Comma-separated dead times, s");
  o->add_option("--out", opt.out, "Output directory");

  EllipseArgs ell;
  auto* e = app.add_subcommand("ellipse", "Fit an ellipse to x_a,x_b excitation pairs");
  e->add_option("points", ell.points, "CSV with header x_a,x_b")->required();
  e->add_option("--out", ell.out, "Output directory");

  AllanArgs allan;
  auto* al = app.add_subcommand("allan", "Overlapping Allan deviation of a fractional-frequency series");
  al->add_option("series", allan.series, "One value per line")->required();
  al->add_option("--sample-time", allan.sample_time, "Seconds per sample");
  al->add_option("--out", allan.out, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << ERASURE_VERSION << '\n';
    return kSuccess;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  }

  try {
    if (*f) return cmd_fisher(fisher, out);
    if (*s) return cmd_simulate(sim, out);
    if (*sc) return cmd_scaling(scaling, out);
    if (*o) return cmd_optimize(opt, out);
    if (*e) return cmd_ellipse(ell, out);
    if (*al) return cmd_allan(allan, out);
  } catch (const InvalidArgument& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const SingularEvaluation& ex) {
    err << "error: " << ex.what() << '\n';
    return kSingular;
  } catch (const SimulationDegenerate& ex) {
    err << "error: " << ex.what() << '\n';
    return kSimulationDegenerate;
  } catch (const FitFailure& ex) {
    err << "error: " << ex.what() << '\n';
    return kFitFailure;
  } catch (const std::exception& ex) {
    // Unexpected failures (I/O, estimation) are reported as usage errors so
    // the exit-code set stays closed.
    err << "error: " << ex.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace erasure::cli
