#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "medqsl/dynamics.hpp"
#include "medqsl/qsl.hpp"
#include "medqsl/sweep.hpp"

namespace medqsl::io {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);
/// Creates parent directories. Throws Io.
void write_file(const std::filesystem::path& path, const std::string& content);

/// %.17g; "nan" for NaN.
std::string format_double(double v);

/// {"layout": [["A",2], ...], "pure": [[re, im], ...]} or
/// {"layout": ..., "density": [[[re, im], ...], ...]} (row-major).
DensityState state_from_json(const json& j);
json state_to_json(const DensityState& s);

/// Columns: T, negativity, fidelity_to_target, bures_angle_from_initial,
/// purity_marginal, mutual_information, mean_energy, energy_std.
std::string trajectory_csv(const Trajectory& t);

json to_json(const BoundReport& r);
json to_json(const SweepConfig& c);  // workers omitted
json to_json(const SweepReport& r);
/// Columns: T, max, mean, p99.
std::string envelope_csv(const SweepReport& r);

struct RunManifest {
  std::string subcommand;
  json config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
  double wall_clock_seconds = 0;
  unsigned workers = 1;
};

json to_json(const RunManifest& m);

/// Writes "<json>\n" with two-space indentation.
std::string dump(const json& j);

}  // namespace medqsl::io
