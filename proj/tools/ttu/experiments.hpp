#pragma once

// Experiment runners behind the `ttu` command line. Each run is a pure
// function of its configuration: the same config yields the same bytes.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttu/netsim/model.hpp"
#include "ttu/netsim/scenarios.hpp"
#include "ttu/oneclock.hpp"
#include "ttu/sched_proto.hpp"

namespace ttu::cli {

enum class Experiment { Swap, Consistent, Timeflip, Oneclock, Rptp };

std::string_view to_string(Experiment e) noexcept;
Experiment parse_experiment(std::string_view s);

/// Distinct seeds; runs visit them in ascending order.
using SeedList = std::vector<std::uint64_t>;

/// start, start + 1, ..., start + count - 1.
SeedList seed_range(std::uint64_t start, std::uint64_t count);

/// `start:count`, both decimal. Throws ConfigError.
SeedList parse_seed_range(std::string_view text);

struct SwapConfig {
  SeedList seeds = seed_range(1, 100);
  std::vector<netsim::StrategyKind> strategies{netsim::StrategyKind::TimedSimultaneous,
                                               netsim::StrategyKind::UntimedSequential};
  netsim::FlowSwapParams params;
  /// Replaces the built-in flow swap; its own strategy is used.
  std::optional<netsim::Scenario> scenario;
  std::optional<std::string> trace_file;
  unsigned workers = 1;
  std::optional<std::string> out;
};

struct ConsistentConfig {
  SeedList seeds = seed_range(1, 100);
  std::vector<netsim::StrategyKind> strategies{netsim::StrategyKind::TimedMultiPhase,
                                               netsim::StrategyKind::UntimedSequential,
                                               netsim::StrategyKind::TwoPhaseTagged};
  netsim::MultiPhaseParams params;
  /// Run the phases last to first.
  bool reverse_phases = false;
  std::optional<netsim::Scenario> scenario;
  std::optional<std::string> trace_file;
  unsigned workers = 1;
  std::optional<std::string> out;
};

struct TimeflipConfig {
  /// Sampling seed for windows and tolerances.
  std::uint64_t seed = 1;
  unsigned k_min = 1;
  unsigned k_max = 12;
  std::uint64_t samples_per_k = 1'000;
  /// Any of geq, window, choose.
  std::vector<std::string> modes{"geq", "window", "choose"};
  Duration tick = Duration::ns(1);
  std::optional<std::string> out;
};

struct OneclockConfig {
  SeedList seeds = seed_range(1, 100);
  std::vector<std::string> predictors{"naive", "average", "ft_average", "kalman"};
  ServerModel server{delay::Constant{}, delay::Gaussian{Duration::ms(50), Duration::ms(1)}, 0.05,
                     Duration::ms(500)};
  std::uint64_t n_rpcs = 1'032;
  std::uint64_t warmup = 32;
  Duration lead = Duration::ms(200);
  std::uint64_t history_capacity = oneclock::History::kDefaultCapacity;
  oneclock::Average average;
  oneclock::FtAverage ft_average;
  oneclock::Kalman kalman;
  /// Per-RPC CSV; only with a single seed.
  std::optional<std::string> rpc_log;
  unsigned workers = 1;
  std::optional<std::string> out;
};

struct RptpConfig {
  SeedList seeds = seed_range(1, 100);
  /// True switch offsets are drawn from U[-max, max] per seed.
  Duration max_abs_offset = Duration::ms(50);
  Duration delay = Duration::ms(1);
  /// Extra controller->switch delay.
  Duration asymmetry;
  double switch_jitter_std_ns = 10'000.0;
  double controller_jitter_std_ns = 0.0;
  double skew_ppm = 0.0;
  Duration reorder_tolerance;
  SimTime at = SimTime{1'000'000'000};
  std::optional<std::string> out;
};

using RunConfig = std::variant<SwapConfig, ConsistentConfig, TimeflipConfig, OneclockConfig, RptpConfig>;

Experiment experiment_of(const RunConfig& c) noexcept;

RunConfig default_config(Experiment e);

/// Strict: unknown keys, wrong types and invalid values raise ConfigError.
/// An `experiment` key, when present, must name `e`.
RunConfig parse_config(Experiment e, const nlohmann::json& j);

/// Every field, defaults included; parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& c);

/// Replaces the seed set. Timeflip takes exactly one seed.
void set_seeds(RunConfig& c, SeedList seeds);

/// CSV destination named in the config, if any.
const std::optional<std::string>& output_path(const RunConfig& c);
void set_output_path(RunConfig& c, std::string path);

/// Runs the experiment and returns the CSV text. Side files named in the
/// config (traces, RPC log) are written as well.
std::string run(const RunConfig& c);

}  // namespace ttu::cli
