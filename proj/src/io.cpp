#include "medqsl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace medqsl::io {

namespace {

json complex_pair(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorKind::InvalidArgument, "complex entries are [re, im] pairs or plain numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

DensityState state_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("layout"))
      throw Error(ErrorKind::InvalidArgument, "state JSON needs a \"layout\" array");
    std::vector<SystemLayout::Subsystem> subs;
    for (const auto& entry : j.at("layout")) {
      if (!entry.is_array() || entry.size() != 2)
        throw Error(ErrorKind::InvalidArgument, "layout entries are [label, dim]");
      subs.push_back({entry[0].get<std::string>(), entry[1].get<int>()});
    }
    SystemLayout layout(std::move(subs));
    const auto n = layout.total_dim();
    const bool pure = j.contains("pure"), dense = j.contains("density");
    if (pure == dense) throw Error(ErrorKind::InvalidArgument, "state JSON needs exactly one of \"pure\" or \"density\"");
    if (pure) {
      const auto& amps = j.at("pure");
      if (!amps.is_array() || static_cast<Eigen::Index>(amps.size()) != n)
        throw Error(ErrorKind::DimensionMismatch, "\"pure\" needs " + std::to_string(n) + " amplitudes");
      Vector psi(n);
      for (Eigen::Index k = 0; k < n; ++k) psi(k) = complex_from(amps[k]);
      return DensityState::from_pure(std::move(layout), std::move(psi));
    }
    const auto& rows = j.at("density");
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n)
      throw Error(ErrorKind::DimensionMismatch, "\"density\" needs " + std::to_string(n) + " rows");
    Matrix rho(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& row = rows[r];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
        throw Error(ErrorKind::DimensionMismatch, "density row " + std::to_string(r) + " has the wrong length");
      for (Eigen::Index c = 0; c < n; ++c) rho(r, c) = complex_from(row[c]);
    }
    return DensityState::from_matrix(std::move(layout), std::move(rho));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed state JSON: ") + e.what());
  }
}

json state_to_json(const DensityState& s) {
  json layout = json::array();
  for (const auto& sub : s.layout().subsystems()) layout.push_back(json::array({sub.label, sub.dim}));
  json out{{"layout", layout}};
  if (const auto& psi = s.pure_vector()) {
    json amps = json::array();
    for (Eigen::Index k = 0; k < psi->size(); ++k) amps.push_back(complex_pair((*psi)(k)));
    out["pure"] = amps;
  } else {
    json rows = json::array();
    for (Eigen::Index r = 0; r < s.dim(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < s.dim(); ++c) row.push_back(complex_pair(s.matrix()(r, c)));
      rows.push_back(row);
    }
    out["density"] = rows;
  }
  return out;
}

std::string trajectory_csv(const Trajectory& t) {
  std::string out =
      "T,negativity,fidelity_to_target,bures_angle_from_initial,purity_marginal,mutual_information,"
      "mean_energy,energy_std\n";
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    const Observables& o = t.observables[k];
    for (double v : {t.times[k], o.negativity, o.fidelity_to_target, o.bures_angle_from_initial, o.purity_marginal,
                     o.mutual_information, o.mean_energy})
      out += format_double(v) + ",";
    out += format_double(o.energy_std) + "\n";
  }
  return out;
}

json to_json(const BoundReport& r) {
  return json{{"theta", r.theta},
              {"denominator", r.denominator},
              {"bound", r.bound},
              {"d", r.d},
              {"reference_bounds",
               {{"di", r.reference_bounds.di}, {"conjecture", r.reference_bounds.conjecture}, {"smi", r.reference_bounds.smi}}}};
}

json to_json(const SweepConfig& c) {
  return json{{"experiment", to_string(c.experiment)},
              {"d", c.d},
              {"n_instances", c.n_instances},
              {"grid", {{"start", c.grid.start}, {"stop", c.grid.stop}, {"step", c.grid.step}}},
              {"seed", c.seed},
              {"hamiltonian_ensemble", to_string(c.hamiltonian_ensemble)},
              {"mediator_ensemble", to_string(c.mediator_ensemble)},
              {"jump", to_string(c.jump)},
              {"gamma", c.gamma},
              {"delta", c.delta},
              {"violation_horizon", c.violation_horizon ? json(*c.violation_horizon) : json(nullptr)},
              {"horizon", c.horizon},
              {"include_witness", c.include_witness},
              {"top_extremes", c.top_extremes}};
}

json to_json(const SweepReport& r) {
  json extremes = json::array();
  for (const auto& e : r.extremes)
    extremes.push_back({{"stream_id", e.stream_id}, {"value", e.value}, {"time", e.time}});
  json violations = json::array();
  for (const auto& v : r.violations)
    violations.push_back({{"stream_id", v.stream_id}, {"time", v.time}, {"value", v.value}, {"what", v.what}});
  json summary = json::object();
  for (const auto& [k, v] : r.summary) summary[k] = number_or_null(v);
  return json{{"config", to_json(r.config)},
              {"seed", r.config.seed},
              {"times", r.times},
              {"envelope",
               {{"max", r.envelope_max}, {"mean", r.envelope_mean}, {"p50", r.envelope_p50}, {"p99", r.envelope_p99}}},
              {"extremes", extremes},
              {"violations", violations},
              {"redraws", r.redraws},
              {"summary", summary}};
}

std::string envelope_csv(const SweepReport& r) {
  std::string out = "T,max,mean,p99\n";
  for (std::size_t k = 0; k < r.times.size() && k < r.envelope_max.size(); ++k)
    out += format_double(r.times[k]) + "," + format_double(r.envelope_max[k]) + "," +
           format_double(r.envelope_mean[k]) + "," + format_double(r.envelope_p99[k]) + "\n";
  return out;
}

json to_json(const RunManifest& m) {
  return json{{"subcommand", m.subcommand},
              {"config", m.config},
              {"seed", m.seed ? json(*m.seed) : json(nullptr)},
              {"versions", {{"medqsl", MEDQSL_VERSION}, {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                                      std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                                      std::to_string(EIGEN_MINOR_VERSION)}}},
              {"outputs", m.outputs},
              {"workers", m.workers},
              {"wall_clock_seconds", m.wall_clock_seconds}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace medqsl::io
