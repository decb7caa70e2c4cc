#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "medqsl/hspec.hpp"
#include "medqsl/io.hpp"
#include "medqsl/qsl.hpp"
#include "medqsl/sweep.hpp"

namespace medqsl::cli {

namespace {

namespace fs = std::filesystem;
using io::json;
using Clock = std::chrono::steady_clock;

struct LoadedHamiltonian {
  Hamiltonian hamiltonian;
  std::optional<DensityState> paired_state;
};

LoadedHamiltonian load_hamiltonian(const std::string& spec) {
  if (fs::exists(spec) || spec.ends_with(".hspec")) {
    const auto ast = hspec::parse(io::read_file(spec));
    return {hspec::build(ast, fs::path(spec).stem().string()), std::nullopt};
  }
  auto pair = builtin_example(spec);
  return {std::move(pair.hamiltonian), std::move(pair.state)};
}

std::vector<int> ket_digits(std::string_view digits) {
  std::vector<int> out;
  if (digits.find(',') != std::string_view::npos) {
    for (const auto& part : Bipartition::parse(std::string(digits) + ":x").side_a) {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (ec != std::errc{} || ptr != part.data() + part.size())
        throw Error(ErrorKind::InvalidArgument, "bad ket digit '" + part + "'");
      out.push_back(v);
    }
    return out;
  }
  for (char c : digits) {
    if (c < '0' || c > '9') throw Error(ErrorKind::InvalidArgument, std::string("bad ket digit '") + c + "'");
    out.push_back(c - '0');
  }
  return out;
}

/// ket:<digits>, maxent, a builtin example name, or a JSON file.
DensityState load_state(const std::string& spec, const SystemLayout& layout) {
  if (spec.starts_with("ket:")) {
    const auto digits = ket_digits(std::string_view(spec).substr(4));
    if (digits.size() != layout.size())
      throw Error(ErrorKind::DimensionMismatch, "'" + spec + "' has " + std::to_string(digits.size()) +
                                                    " digits for layout " + to_string(layout));
    return DensityState::basis(layout, digits);
  }
  if (spec == "maxent") {
    if (layout.size() != 2) throw Error(ErrorKind::InvalidArgument, "maxent needs a two-subsystem layout");
    return maximally_entangled(layout.dims()[0], layout);
  }
  if (!fs::exists(spec)) {
    for (const auto& name : builtin_example_names())
      if (spec == name || spec.starts_with(name + ":")) {
        DensityState s = builtin_example(spec).state;
        if (!(s.layout() == layout))
          throw Error(ErrorKind::LayoutMismatch, "state '" + spec + "' lives on " + to_string(s.layout()));
        return s;
      }
  }
  DensityState s = io::state_from_json(json::parse(io::read_file(spec), nullptr, true, true));
  if (!(s.layout() == layout))
    throw Error(ErrorKind::LayoutMismatch,
                "state file layout " + to_string(s.layout()) + " differs from " + to_string(layout));
  return s;
}

/// LABEL=TYPE:RATE, TYPE in {dephasing, damping}.
JumpOperatorSet load_jumps(const std::vector<std::string>& specs, const SystemLayout& layout) {
  JumpOperatorSet out;
  for (const auto& spec : specs) {
    const auto eq = spec.find('='), colon = spec.rfind(':');
    if (eq == std::string::npos || colon == std::string::npos || colon < eq)
      throw Error(ErrorKind::InvalidArgument, "--lindblad expects LABEL=TYPE:RATE, got '" + spec + "'");
    const std::string label = spec.substr(0, eq), type = spec.substr(eq + 1, colon - eq - 1);
    double rate = 0;
    const std::string rate_text = spec.substr(colon + 1);
    const auto [ptr, ec] = std::from_chars(rate_text.data(), rate_text.data() + rate_text.size(), rate);
    if (ec != std::errc{} || ptr != rate_text.data() + rate_text.size() || !(rate >= 0))
      throw Error(ErrorKind::InvalidArgument, "bad rate in '" + spec + "'");
    const JumpType kind = parse_jump_type(type);
    JumpOperatorSet part;
    if (kind == JumpType::Dephasing) part = JumpOperatorSet::local_dephasing(layout, {label}, rate);
    if (kind == JumpType::Damping) part = JumpOperatorSet::local_damping(layout, {label}, rate);
    for (auto& [l, ops] : part.operators)
      for (auto& op : ops) out.add(l, op);
  }
  return out;
}

unsigned default_workers() {
  if (const char* env = std::getenv("MEDQSL_WORKERS")) {
    unsigned v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_outputs(const fs::path& manifest_path, io::RunManifest manifest,
                   const std::vector<std::pair<fs::path, std::string>>& files, Clock::time_point start,
                   std::ostream& out) {
  for (const auto& [path, content] : files) {
    io::write_file(path, content);
    manifest.outputs.push_back(path.filename().string());
    out << "wrote " << path.string() << "\n";
  }
  manifest.wall_clock_seconds = seconds_since(start);
  io::write_file(manifest_path, io::dump(io::to_json(manifest)));
  out << "wrote " << manifest_path.string() << "\n";
}

fs::path manifest_for(const fs::path& output) {
  fs::path p = output;
  p.replace_extension(".manifest.json");
  return p;
}

// ---- evolve ----------------------------------------------------------------

struct EvolveFlags {
  std::string ham, state, target, bipartition = "A:B", out;
  std::vector<std::string> lindblad;
  double tmax = std::numbers::pi / 2, dt = 1e-3;
  bool normalize = false;
};

int cmd_evolve(const EvolveFlags& f, std::ostream& out) {
  const auto start = Clock::now();
  auto loaded = load_hamiltonian(f.ham);
  Hamiltonian h = loaded.hamiltonian;
  std::optional<DensityState> s0;
  if (!f.state.empty())
    s0 = load_state(f.state, h.layout());
  else if (loaded.paired_state)
    s0 = loaded.paired_state;
  else
    throw Error(ErrorKind::InvalidArgument, "--state is required for Hamiltonians without a paired state");

  double k = 1;
  if (f.normalize) {
    auto scaled = resource_equality_scale(h, *s0);
    h = scaled.hamiltonian;
    k = scaled.k;
  }
  ObserveConfig cfg;
  cfg.bipartition = Bipartition::parse(f.bipartition);
  cfg.keep_states = false;
  if (!f.target.empty()) cfg.target = load_state(f.target, h.layout());
  const TimeGrid grid = TimeGrid::make(0, f.tmax, f.dt);

  const JumpOperatorSet jumps = load_jumps(f.lindblad, h.layout());
  const Trajectory traj =
      jumps.empty() ? evolve_unitary(h, *s0, grid, cfg) : evolve_lindblad(h, jumps, *s0, grid, cfg);
  const std::string csv = io::trajectory_csv(traj);
  if (f.out.empty()) {
    out << csv;
    return kOk;
  }
  io::RunManifest manifest;
  manifest.subcommand = "evolve";
  manifest.config = {{"ham", f.ham},         {"state", f.state.empty() ? json(nullptr) : json(f.state)},
                     {"target", f.target.empty() ? json(nullptr) : json(f.target)},
                     {"tmax", f.tmax},       {"dt", f.dt},
                     {"bipartition", f.bipartition},
                     {"lindblad", f.lindblad},
                     {"normalize", f.normalize},
                     {"k", k}};
  write_outputs(manifest_for(f.out), manifest, {{f.out, csv}}, start, out);
  return kOk;
}

// ---- bound -----------------------------------------------------------------

struct BoundFlags {
  std::string ham, state, target, out;
  int d = 0;
  bool normalize = false;
};

int cmd_bound(const BoundFlags& f, std::ostream& out) {
  const auto start = Clock::now();
  auto loaded = load_hamiltonian(f.ham);
  Hamiltonian h = loaded.hamiltonian;
  const DensityState s0 = !f.state.empty() ? load_state(f.state, h.layout())
                          : loaded.paired_state ? *loaded.paired_state
                                                : throw Error(ErrorKind::InvalidArgument, "--state is required");
  const DensityState target = load_state(f.target, h.layout());
  std::optional<double> k;
  if (f.normalize) {
    auto scaled = resource_equality_scale(h, s0);
    h = scaled.hamiltonian;
    k = scaled.k;
  }
  const int d = f.d > 0 ? f.d : h.layout().dims()[0];
  json report = io::to_json(unified_bound(s0, target, h, d));
  if (k) report["k"] = *k;
  const std::string text = io::dump(report);
  out << text;
  if (!f.out.empty()) {
    io::RunManifest manifest;
    manifest.subcommand = "bound";
    manifest.config = {{"ham", f.ham}, {"state", f.state}, {"target", f.target}, {"d", d}, {"normalize", f.normalize}};
    write_outputs(manifest_for(f.out), manifest, {{f.out, text}}, start, out);
  }
  return kOk;
}

// ---- reproduce -------------------------------------------------------------

struct ReproduceFlags {
  std::string name;
  std::string out_dir = "out";
  int d = 0;
  std::optional<std::size_t> n;
  std::uint64_t seed = 42;
  std::optional<unsigned> workers;
  std::optional<double> dt;
  std::string jump, hamiltonian_ensemble, state_ensemble;
  std::optional<double> gamma;
};

const std::vector<std::string>& reproduce_names() {
  static const std::vector<std::string> names = {"fig2",          "cmi-product",   "cmi-entangled", "cmi-classical",
                                                 "open-system",   "conjecture-d2", "conjecture-d3", "smi",
                                                 "rate-zero",     "commuting-null"};
  return names;
}

json trajectory_summary(const std::string& name, const ExamplePair& ex, const Trajectory& traj, int d) {
  json s = json::object();
  const auto value_at = [&](double t, auto member) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      if (std::abs(traj.times[k] - t) < std::abs(traj.times[best] - t)) best = k;
    return traj.observables[best].*member;
  };
  const Bipartition ab{{"A"}, {"B"}};
  const double quarter = std::numbers::pi / 4;
  if (name == "fig2" || name == "cmi-product") {
    const auto t = first_max_entanglement_time(ex.hamiltonian, ex.state, ab, d, 50);
    s["first_max_time"] = t ? json(*t) : json(nullptr);
    s["negativity_at_pi_over_4"] = value_at(quarter, &Observables::negativity);
    if (name == "fig2") {
      double dev = 0;
      const double r = std::sqrt(d - 1.0);
      for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double c = std::cos(traj.times[k]) + r * std::sin(traj.times[k]);
        dev = std::max(dev, std::abs(traj.observables[k].negativity - (c * c - 1) / 2));
      }
      s["max_deviation_from_closed_form"] = dev;
      s["di_bound"] = di_bound(d);
    }
  } else if (name == "cmi-entangled") {
    s["negativity_ab_c_at_0"] = negativity(ex.state, Bipartition{{"A", "B"}, {"C"}});
    double dev = 0;
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      dev = std::max(dev, std::abs(traj.observables[k].negativity - 0.5 * std::sin(2 * traj.times[k])));
    s["max_deviation_from_half_sin_2t"] = dev;
  } else if (name == "cmi-classical" || name == "open-system") {
    const UnitaryPropagator prop(ex.hamiltonian, ex.state);
    s["mutual_information_ab_c_at_0"] = mutual_information(ex.state, Bipartition{{"A", "B"}, {"C"}});
    s["mutual_information_a_b_at_0"] = value_at(0, &Observables::mutual_information);
    s["mutual_information_a_b_at_pi_over_4"] = value_at(quarter, &Observables::mutual_information);
    s["negativity_at_pi_over_4"] = value_at(quarter, &Observables::negativity);
    s["purity_ab_at_0"] = value_at(0, &Observables::purity_marginal);
    s["purity_ab_at_pi_over_4"] = value_at(quarter, &Observables::purity_marginal);
    json flags = json::object();
    for (double t : {0.0, quarter / 2, quarter})
      flags[io::format_double(t)] = is_classically_correlated_on(prop.state_at(t), "C");
    s["classically_correlated_on_c"] = flags;
  }
  return s;
}

int reproduce_trajectory(const ReproduceFlags& f, std::ostream& out) {
  const auto start = Clock::now();
  const fs::path dir(f.out_dir);
  int d = 2;
  ExamplePair ex = f.name == "fig2" ? builtin_example("direct-optimal:" + std::to_string(d = f.d > 0 ? f.d : 2))
                                    : builtin_example(f.name);
  const double tmax = f.name == "fig2" || f.name == "cmi-product" ? std::numbers::pi / 2 : std::numbers::pi / 4;
  const double dt = f.dt.value_or(1e-3);
  // Exactly representable endpoints so pi/4 and pi/2 are grid points.
  const auto intervals = static_cast<std::size_t>(std::llround(tmax / dt));
  const TimeGrid grid = TimeGrid::uniform(0, tmax, std::max<std::size_t>(1, intervals));

  Trajectory traj;
  if (f.name == "fig2") {
    traj = run_fig2(d, grid);
  } else {
    ObserveConfig cfg;
    cfg.keep_states = false;
    traj = evolve_unitary(ex.hamiltonian, ex.state, grid, cfg);
  }
  const std::string stem = f.name == "fig2" ? "fig2_d" + std::to_string(d) : f.name;
  io::RunManifest manifest;
  manifest.subcommand = "reproduce " + f.name;
  manifest.config = {{"name", f.name},
                     {"d", d},
                     {"grid", {{"start", grid.start}, {"stop", grid.stop}, {"step", grid.step}}}};
  write_outputs(dir / (stem + ".manifest.json"), manifest,
                {{dir / (stem + ".csv"), io::trajectory_csv(traj)},
                 {dir / (stem + "_summary.json"), io::dump(trajectory_summary(f.name, ex, traj, d))}},
                start, out);
  return kOk;
}

int reproduce_sweep(const ReproduceFlags& f, std::ostream& out) {
  const auto start = Clock::now();
  Experiment e = Experiment::CmiUncorrelated;
  int d = f.d > 0 ? f.d : 2;
  if (f.name == "conjecture-d2") d = 2;
  if (f.name == "conjecture-d3") d = 3;
  if (f.name == "smi") e = Experiment::SmiProtocol;
  if (f.name == "rate-zero") e = Experiment::RateZero;
  if (f.name == "commuting-null") e = Experiment::CommutingNull;
  if (f.name.starts_with("conjecture") && f.d > 0 && f.d != d)
    throw Error(ErrorKind::InvalidArgument, f.name + " fixes d = " + std::to_string(d));

  SweepConfig cfg = default_config(e, d);
  cfg.seed = f.seed;
  if (f.n) cfg.n_instances = *f.n;
  if (!f.jump.empty()) cfg.jump = parse_jump_type(f.jump);
  if (f.gamma) cfg.gamma = *f.gamma;
  if (!f.hamiltonian_ensemble.empty()) cfg.hamiltonian_ensemble = parse_hermitian_ensemble(f.hamiltonian_ensemble);
  if (!f.state_ensemble.empty()) cfg.mediator_ensemble = parse_density_ensemble(f.state_ensemble);
  cfg.workers = f.workers.value_or(default_workers());
  const SweepReport report = run_sweep(cfg);

  const fs::path dir(f.out_dir);
  std::vector<std::pair<fs::path, std::string>> files = {{dir / (f.name + ".json"), io::dump(io::to_json(report))}};
  if (!report.envelope_max.empty()) files.push_back({dir / (f.name + "_envelope.csv"), io::envelope_csv(report)});
  io::RunManifest manifest;
  manifest.subcommand = "reproduce " + f.name;
  manifest.config = io::to_json(cfg);
  manifest.seed = cfg.seed;
  manifest.workers = cfg.workers;
  write_outputs(dir / (f.name + ".manifest.json"), manifest, files, start, out);
  out << "violations: " << report.violations.size() << ", redraws: " << report.redraws << "\n";
  return kOk;
}

int cmd_reproduce(const ReproduceFlags& f, std::ostream& out) {
  if (f.name == "fig2" || f.name == "cmi-product" || f.name == "cmi-entangled" || f.name == "cmi-classical" ||
      f.name == "open-system")
    return reproduce_trajectory(f, out);
  return reproduce_sweep(f, out);
}

// ---- parse -----------------------------------------------------------------

struct ParseFlags {
  std::string check, emit;
};

int cmd_parse(const ParseFlags& f, std::ostream& out) {
  const hspec::Ast ast = hspec::parse(io::read_file(f.check));
  const Hamiltonian h = hspec::build(ast);
  if (f.emit == "canonical") {
    out << hspec::format(ast);
  } else if (f.emit == "matrix") {
    json rows = json::array();
    for (Eigen::Index r = 0; r < h.matrix().rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < h.matrix().cols(); ++c)
        row.push_back(json::array({h.matrix()(r, c).real(), h.matrix()(r, c).imag()}));
      rows.push_back(row);
    }
    json layout = json::array();
    for (const auto& s : h.layout().subsystems()) layout.push_back(json::array({s.label, s.dim}));
    out << io::dump(json{{"layout", layout}, {"matrix", rows}});
  }
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::StationaryState:
      return kVacuousBound;
    case ErrorKind::PositivityLost:
    case ErrorKind::NotPSD:
      return kNumericFailure;
    default:
      return kInputError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Speed limits for mediated entanglement: evolve, bound, reproduce, parse.", "medqsl"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MEDQSL_VERSION);

  EvolveFlags ev;
  auto* evolve = app.add_subcommand("evolve", "Evolve a state and write an observables CSV");
  evolve->add_option("--ham", ev.ham, "builtin name or .hspec file")->required();
  evolve->add_option("--state", ev.state, "ket:<digits>, maxent, builtin name or .json file");
  evolve->add_option("--target", ev.target, "target state (same syntax as --state)");
  evolve->add_option("--tmax", ev.tmax, "final dimensionless time")->check(CLI::PositiveNumber);
  evolve->add_option("--dt", ev.dt, "grid step")->check(CLI::PositiveNumber);
  evolve->add_option("--bipartition", ev.bipartition, "e.g. A:B or A,B:C");
  evolve->add_option("--lindblad", ev.lindblad, "LABEL=dephasing|damping:RATE (repeatable)");
  evolve->add_option("--out", ev.out, "CSV path; stdout when omitted");
  evolve->add_flag("--normalize", ev.normalize, "apply resource equality first");

  BoundFlags bd;
  auto* bound = app.add_subcommand("bound", "Print the dimensionless speed limit as JSON");
  bound->add_option("--ham", bd.ham, "builtin name or .hspec file")->required();
  bound->add_option("--state", bd.state, "initial state");
  bound->add_option("--target", bd.target, "target state")->required();
  bound->add_option("--d", bd.d, "reference dimension for the bound table");
  bound->add_option("--out", bd.out, "also write the JSON here");
  bound->add_flag("--normalize", bd.normalize, "apply resource equality first and echo k");

  ReproduceFlags rp;
  auto* reproduce = app.add_subcommand("reproduce", "Run a named experiment");
  reproduce->add_option("name", rp.name, "experiment")->required()->check(CLI::IsMember(reproduce_names()));
  reproduce->add_option("--d", rp.d, "dimension (fig2: 2..6, smi: 2..4)");
  reproduce->add_option("--n", rp.n, "number of random instances")->check(CLI::PositiveNumber);
  reproduce->add_option("--seed", rp.seed, "64-bit seed");
  reproduce->add_option("--workers", rp.workers, "worker threads (default: MEDQSL_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  reproduce->add_option("--dt", rp.dt, "grid step for trajectory experiments")->check(CLI::PositiveNumber);
  reproduce->add_option("--jump", rp.jump, "rate-zero jumps: none, dephasing, damping");
  reproduce->add_option("--gamma", rp.gamma, "jump rate")->check(CLI::NonNegativeNumber);
  reproduce->add_option("--hamiltonian-ensemble", rp.hamiltonian_ensemble, "gue or uniform");
  reproduce->add_option("--state-ensemble", rp.state_ensemble, "hilbert-schmidt or pure");
  reproduce->add_option("--out-dir", rp.out_dir, "output directory");

  ParseFlags pf;
  auto* parse = app.add_subcommand("parse", "Validate an .hspec file");
  parse->add_option("--check", pf.check, ".hspec file")->required();
  parse->add_option("--emit", pf.emit, "matrix or canonical")->check(CLI::IsMember({"matrix", "canonical"}));

  std::vector<std::string> argv_store{"medqsl"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << MEDQSL_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*evolve) return cmd_evolve(ev, out);
    if (*bound) return cmd_bound(bd, out);
    if (*reproduce) return cmd_reproduce(rp, out);
    if (*parse) return cmd_parse(pf, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericFailure;
  }
  return kInputError;
}

}  // namespace medqsl::cli
