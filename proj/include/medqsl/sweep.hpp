#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "medqsl/dynamics.hpp"
#include "medqsl/randgen.hpp"

namespace medqsl {

enum class Experiment { CmiUncorrelated, RateZero, Fig2, SmiProtocol, CommutingNull };
enum class JumpType { None, Dephasing, Damping };

std::string to_string(Experiment e);
std::string to_string(JumpType j);
std::string to_string(HermitianEnsemble e);
std::string to_string(DensityEnsemble e);
Experiment parse_experiment(std::string_view s);
JumpType parse_jump_type(std::string_view s);
HermitianEnsemble parse_hermitian_ensemble(std::string_view s);
DensityEnsemble parse_density_ensemble(std::string_view s);

struct SweepConfig {
  Experiment experiment = Experiment::CmiUncorrelated;
  int d = 2;
  std::size_t n_instances = 10000;
  TimeGrid grid;
  std::uint64_t seed = 42;
  HermitianEnsemble hamiltonian_ensemble = HermitianEnsemble::Gue;
  DensityEnsemble mediator_ensemble = DensityEnsemble::HilbertSchmidt;
  JumpType jump = JumpType::None;
  double gamma = 0.1;
  /// Forward-difference step for rate-zero.
  double delta = 1e-4;
  /// Reaching maximal entanglement at or before this time is a violation.
  /// Defaults to arccos(1/sqrt d) + 1e-3 (cmi-uncorrelated) or
  /// arccos(1/d) - 1e-6 (smi-protocol stage 2).
  std::optional<double> violation_horizon;
  /// Stage-2 search horizon for smi-protocol.
  double horizon = 3.2;
  /// Instance 0 is a known construction instead of a random draw
  /// (cmi-product for d = 2; the swap Hamiltonian for smi-protocol).
  bool include_witness = true;
  std::size_t top_extremes = 100;
  /// Execution only; never changes results and is not serialised.
  unsigned workers = 1;
};

/// Desk-scale defaults for each experiment.
SweepConfig default_config(Experiment e, int d);

struct InstanceExtreme {
  std::uint64_t stream_id = 0;
  double value = 0;
  double time = 0;
};

struct Violation {
  std::uint64_t stream_id = 0;
  double time = 0;
  double value = 0;
  std::string what;
};

struct SweepReport {
  SweepConfig config;
  std::vector<double> times;
  std::vector<double> envelope_max;
  std::vector<double> envelope_mean;
  std::vector<double> envelope_p50;
  std::vector<double> envelope_p99;
  std::vector<InstanceExtreme> extremes;  // largest first, ties by stream id
  std::vector<Violation> violations;      // expected empty
  std::size_t redraws = 0;
  /// Named scalar results; NaN means "not available".
  std::map<std::string, double> summary;
};

SweepReport run_cmi_uncorrelated(const SweepConfig& cfg);
SweepReport run_rate_zero(const SweepConfig& cfg);
Trajectory run_fig2(int d, const TimeGrid& grid);
SweepReport run_smi_protocol(const SweepConfig& cfg);
SweepReport run_commuting_null(const SweepConfig& cfg);
/// Dispatches on cfg.experiment (everything except Fig2).
SweepReport run_sweep(const SweepConfig& cfg);

/// Runs fn(i) for i in [0, n) on `workers` threads. Each index is processed
/// exactly once; the first exception is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  const std::size_t pool = std::min<std::size_t>(std::max(1u, workers), n);
  if (pool <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < pool; ++w)
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace medqsl
