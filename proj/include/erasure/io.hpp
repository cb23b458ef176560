#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "erasure/allan.hpp"
#include "erasure/clock_sim.hpp"
#include "erasure/estimation.hpp"
#include "erasure/interrogation.hpp"

namespace erasure {

using Json = nlohmann::ordered_json;

inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// Shortest decimal representation that parses back to the same double;
/// "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double value);

/// Strict JSON -> config. Every field is required except "seed", which
/// defaults to kDefaultSeed. Unknown fields are rejected. Errors are
/// InvalidArgument naming the field.
ComparisonConfig config_from_json(const Json& doc);
Json config_to_json(const ComparisonConfig& config);
ComparisonConfig load_config(const std::filesystem::path& path);

/// CSV with header `x_a,x_b`; values must lie in [0, 1].
std::vector<ExcitationPair> read_excitation_csv(std::istream& in);
void write_excitation_csv(std::ostream& out, std::span<const ExcitationPair> points);

/// `cycle,theta,x_a,x_b,n_a,n_b`; invalid cycles carry nan fractions.
void write_cycles_csv(std::ostream& out, std::span<const CycleResult> cycles);

/// One value per line, optional non-numeric header line.
std::vector<double> read_series(std::istream& in);

void write_allan_csv(std::ostream& out, const AllanResult& result);
Json allan_to_json(const AllanResult& result);
Json ellipse_to_json(const EllipseFitResult& fit);
Json analysis_to_json(const ComparisonAnalysis& analysis);
void write_gain_csv(std::ostream& out, std::span<const GainPoint> curve);

/// Writes `contents` to `path` through a temporary file and a rename.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

}  // namespace erasure
