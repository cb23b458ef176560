#include "erasure/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "erasure/error.hpp"

namespace erasure {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& value) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

const Json& require(const Json& doc, const char* field) {
  if (!doc.contains(field)) {
    throw InvalidArgument(std::string("config field '") + field + "' is missing");
  }
  return doc.at(field);
}

double require_number(const Json& doc, const char* field) {
  const Json& v = require(doc, field);
  if (!v.is_number()) {
    throw InvalidArgument(std::string("config field '") + field + "' must be a number");
  }
  return v.get<double>();
}

std::uint64_t require_count(const Json& doc, const char* field) {
  const Json& v = require(doc, field);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw InvalidArgument(std::string("config field '") + field +
                          "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string require_string(const Json& doc, const char* field) {
  const Json& v = require(doc, field);
  if (!v.is_string()) {
    throw InvalidArgument(std::string("config field '") + field + "' must be a string");
  }
  return v.get<std::string>();
}

void reject_unknown(const Json& doc, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) {
      throw InvalidArgument("unknown config field '" + where + key + "'");
    }
  }
}

NoiseChannel noise_from_json(const Json& doc) {
  if (!doc.is_object()) throw InvalidArgument("config field 'noise' must be an object");
  reject_unknown(doc, {"kind", "q", "gamma"}, "noise.");
  const ChannelKind kind = [&] {
    try {
      return parse_channel_kind(require_string(doc, "kind"));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(std::string("config field 'noise.kind': ") + e.what());
    }
  }();
  const bool has_q = doc.contains("q");
  const bool has_gamma = doc.contains("gamma");
  if (has_q == has_gamma) {
    throw InvalidArgument("config field 'noise' needs exactly one of 'q' or 'gamma'");
  }
  if (has_q) {
    const double q = require_number(doc, "q");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("config field 'noise.q' must lie in [0, 1]");
    return NoiseChannel::with_probability(kind, q);
  }
  const double gamma = require_number(doc, "gamma");
  if (!(gamma >= 0.0)) throw InvalidArgument("config field 'noise.gamma' must be >= 0");
  return NoiseChannel::with_rate(kind, gamma);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

ComparisonConfig config_from_json(const Json& doc) {
  if (!doc.is_object()) throw InvalidArgument("config must be a JSON object");
  reject_unknown(doc,
                 {"phi_d", "N0", "T_c", "T_d", "f0", "cycles", "noise", "contrast_a", "contrast_b",
                  "laser_phase_model", "seed", "window", "shot_noise"},
                 "");
  ComparisonConfig cfg;
  cfg.phi_d = require_number(doc, "phi_d");
  cfg.n0 = require_count(doc, "N0");
  cfg.t_c = require_number(doc, "T_c");
  cfg.t_d = require_number(doc, "T_d");
  cfg.f0 = require_number(doc, "f0");
  cfg.cycles = require_count(doc, "cycles");
  cfg.noise = noise_from_json(require(doc, "noise"));
  cfg.contrast_a = require_number(doc, "contrast_a");
  cfg.contrast_b = require_number(doc, "contrast_b");
  cfg.laser_phase_model = parse_laser_phase_model(require_string(doc, "laser_phase_model"));
  cfg.seed = doc.contains("seed") ? require_count(doc, "seed") : kDefaultSeed;
  cfg.window = static_cast<std::size_t>(require_count(doc, "window"));
  const Json& shot = require(doc, "shot_noise");
  if (!shot.is_boolean()) throw InvalidArgument("config field 'shot_noise' must be a boolean");
  cfg.shot_noise = shot.get<bool>();
  cfg.validate();
  return cfg;
}

Json config_to_json(const ComparisonConfig& cfg) {
  Json noise;
  noise["kind"] = std::string(to_string(cfg.noise.kind()));
  if (cfg.noise.has_rate()) {
    noise["gamma"] = cfg.noise.rate();
  } else {
    noise["q"] = cfg.noise.probability(cfg.t_c);
  }
  Json doc;
  doc["phi_d"] = cfg.phi_d;
  doc["N0"] = cfg.n0;
  doc["T_c"] = cfg.t_c;
  doc["T_d"] = cfg.t_d;
  doc["f0"] = cfg.f0;
  doc["cycles"] = cfg.cycles;
  doc["noise"] = noise;
  doc["contrast_a"] = cfg.contrast_a;
  doc["contrast_b"] = cfg.contrast_b;
  doc["laser_phase_model"] = std::string(to_string(cfg.laser_phase_model));
  doc["seed"] = cfg.seed;
  doc["window"] = cfg.window;
  doc["shot_noise"] = cfg.shot_noise;
  return doc;
}

ComparisonConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

std::vector<ExcitationPair> read_excitation_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x_a,x_b") {
    throw InvalidArgument("CSV header must be 'x_a,x_b'");
  }
  std::vector<ExcitationPair> points;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    ExcitationPair p;
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos ||
        !parse_double(row.substr(0, comma), p.x_a) || !parse_double(row.substr(comma + 1), p.x_b)) {
      throw InvalidArgument("malformed CSV row " + std::to_string(line_no) + ": '" +
                            std::string(row) + "'");
    }
    if (!(p.x_a >= 0.0 && p.x_a <= 1.0 && p.x_b >= 0.0 && p.x_b <= 1.0)) {
      throw InvalidArgument("CSV row " + std::to_string(line_no) +
                            ": excitation fractions must lie in [0, 1]");
    }
    points.push_back(p);
  }
  return points;
}

void write_excitation_csv(std::ostream& out, std::span<const ExcitationPair> points) {
  out << "x_a,x_b\n";
  for (const auto& p : points) out << format_double(p.x_a) << ',' << format_double(p.x_b) << '\n';
}

void write_cycles_csv(std::ostream& out, std::span<const CycleResult> cycles) {
  out << "cycle,theta,x_a,x_b,n_a,n_b\n";
  for (const auto& c : cycles) {
    out << c.index << ',' << format_double(c.theta) << ',' << format_double(c.x_a) << ','
        << format_double(c.x_b) << ',' << c.n_a << ',' << c.n_b << '\n';
  }
}

std::vector<double> read_series(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    double v = 0.0;
    if (!parse_double(row, v)) {
      if (line_no == 1) continue;  // header
      throw InvalidArgument("malformed series value on line " + std::to_string(line_no));
    }
    if (!std::isfinite(v)) {
      throw InvalidArgument("non-finite series value on line " + std::to_string(line_no));
    }
    values.push_back(v);
  }
  return values;
}

void write_allan_csv(std::ostream& out, const AllanResult& result) {
  out << "tau,m,sigma,sigma_error\n";
  for (const auto& p : result) {
    out << format_double(p.tau) << ',' << p.m << ',' << format_double(p.deviation) << ','
        << format_double(p.error) << '\n';
  }
}

Json allan_to_json(const AllanResult& result) {
  Json points = Json::array();
  for (const auto& p : result) {
    points.push_back({{"tau", p.tau}, {"m", p.m}, {"sigma", p.deviation}, {"sigma_error", p.error}});
  }
  return Json{{"points", points}};
}

Json ellipse_to_json(const EllipseFitResult& fit) {
  return Json{{"conic",
               {{"A", fit.conic[0]},
                {"B", fit.conic[1]},
                {"C", fit.conic[2]},
                {"D", fit.conic[3]},
                {"E", fit.conic[4]},
                {"F", fit.conic[5]}}},
              {"phi_d", fit.phi_d},
              {"contrast_a", fit.contrast_a},
              {"contrast_b", fit.contrast_b},
              {"center_a", fit.center_a},
              {"center_b", fit.center_b},
              {"rms_residual", fit.rms_residual},
              {"points", fit.points}};
}

Json analysis_to_json(const ComparisonAnalysis& a) {
  Json ellipse = ellipse_to_json(a.ellipse.fit);
  ellipse["phi_d_error"] = a.ellipse.phi_d_error;
  ellipse["contrast_a_error"] = a.ellipse.contrast_a_error;
  ellipse["contrast_b_error"] = a.ellipse.contrast_b_error;
  return Json{{"cycles", a.cycles},
              {"invalid_cycles", a.invalid_cycles},
              {"windows", a.windows},
              {"failed_windows", a.failed_windows},
              {"mean_survivors", a.mean_survivors},
              {"survival_fraction", a.survival_fraction},
              {"q_measured", a.q_measured},
              {"ellipse", ellipse},
              {"sigma", a.sigma},
              {"sigma_error", a.sigma_error},
              {"tau_window", a.tau_window},
              {"crb_floor", a.crb_floor},
              {"sigma_over_crb_floor", a.sigma / a.crb_floor},
              {"allan", allan_to_json(a.allan)}};
}

void write_gain_csv(std::ostream& out, std::span<const GainPoint> curve) {
  out << "T_d,T_c_depolarizing,T_c_erasure,gain\n";
  for (const auto& p : curve) {
    out << format_double(p.t_d) << ',' << format_double(p.t_c_depolarizing) << ','
        << format_double(p.t_c_erasure) << ',' << format_double(p.gain) << '\n';
  }
}

void write_file_atomically(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw InvalidArgument("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace erasure
