#pragma once

// Ready-made scenarios: the two-flow swap and the multi-phase reroute.

#include <string_view>
#include <vector>

#include "ttu/netsim/model.hpp"

namespace ttu::netsim {

enum class StrategyKind { None, UntimedSequential, TimedSimultaneous, TimedMultiPhase, TwoPhaseTagged };

std::string_view to_string(StrategyKind k) noexcept;
StrategyKind parse_strategy_kind(std::string_view s);

/// Parameters shared by both builders.
struct CommonParams {
  Duration link_delay = Duration::ms(1);
  DelayModel control_delay = delay::Uniform{Duration::ms(10), Duration::ms(100)};
  DelayModel install_latency = delay::Uniform{Duration::ms(1), Duration::ms(10)};
  Duration clock_error_bound = Duration::ms(1);
  Duration max_switch_offset = Duration::ms(50);
  Duration sync_base_delay = Duration::ms(5);
  SimTime update_start = SimTime{Duration::ms(20).count()};
};

/// Two ingress switches S1, S2 feeding two egress switches X, Y whose links
/// La = X->D and Lb = Y->D have unit capacity. f1 moves from X to Y and f2
/// from Y to X.
struct FlowSwapParams {
  CommonParams common;
  std::uint64_t capacity_pps = 10'000;
  std::uint64_t rate_pps = 10'000;
  /// Capacity of every link other than La and Lb, as a multiple of capacity_pps.
  std::uint64_t core_capacity_factor = 10;
  ExecutionMode mode = ExecutionMode::TimeFlip;
  TimeFlipParams timeflip;
  SimTime update_at = SimTime{Duration::ms(400).count()};
  Duration safety_wait = Duration::ms(500);
  SimTime horizon = SimTime{Duration::s(1).count()};
};

/// H1 -> S1 -> S2 -> E -> H2 rerouted over S1 -> D1 -> ... -> Dm -> E.
/// Phases: E installs v2, then Dm .. D1 install v2, then S1 installs and
/// activates v2; cleanup removes v1 from S1, S2 and E. With m detour
/// switches there are m + 2 phases; the default m = 1 names the switches
/// S1..S4 with S3 the detour and S4 the egress.
struct MultiPhaseParams {
  CommonParams common;
  unsigned detour_switches = 1;
  std::uint64_t rate_pps = 1'000;
  std::uint64_t capacity_pps = 100'000;
  SimTime first_phase_at = SimTime{Duration::ms(200).count()};
  Duration phase_gap = Duration::ms(50);
  Duration cleanup_gap = Duration::ms(50);
  Duration safety_wait = Duration::ms(500);
  SimTime horizon = SimTime{Duration::ms(600).count()};
};

/// Throws ConfigError when the rates do not fit the capacities before or
/// after the swap.
Scenario make_flow_swap_scenario(const FlowSwapParams& p, StrategyKind kind = StrategyKind::None);
UpdateStrategy flow_swap_strategy(const FlowSwapParams& p, StrategyKind kind);

Scenario make_multiphase_scenario(const MultiPhaseParams& p, StrategyKind kind = StrategyKind::None);
UpdateStrategy multiphase_strategy(const MultiPhaseParams& p, StrategyKind kind);
std::vector<SimTime> multiphase_phase_times(const MultiPhaseParams& p);

/// Largest number of packets the timed swap may lose: rate * 2 * clock error bound.
std::uint64_t flow_swap_drop_bound(const FlowSwapParams& p);

}  // namespace ttu::netsim
