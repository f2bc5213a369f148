#pragma once

// Scenario description for the network simulator: topology, flows, the
// update plan and the strategy the controller uses to carry it out.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ttu/random.hpp"
#include "ttu/time.hpp"
#include "ttu/timebase.hpp"

namespace ttu::netsim {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;
using FlowId = std::uint32_t;
using Version = std::uint32_t;

enum class NodeKind { Host, Switch };

/// How a switch carries out scheduled commands.
/// Software: at its local T_s plus a random install latency.
/// TimeFlip: entries are pre-installed on receipt and take effect through a
/// timestamp range in the TCAM, so only the clock error remains.
enum class ExecutionMode { Software, TimeFlip };

std::string_view to_string(NodeKind k) noexcept;
std::string_view to_string(ExecutionMode m) noexcept;
ExecutionMode parse_execution_mode(std::string_view s);

struct SwitchSpec {
  ClockModel::Params clock;
  std::size_t table_capacity = 1024;
  DelayModel install_latency = delay::Uniform{Duration::ms(1), Duration::ms(10)};
};

struct Node {
  std::string name;
  NodeKind kind = NodeKind::Switch;
  SwitchSpec sw;  // ignored for hosts
};

/// Directed link.
struct Link {
  NodeId from = 0;
  NodeId to = 0;
  std::uint64_t capacity_pps = 0;
  Duration propagation;
};

struct ControllerSpec {
  ClockModel::Params clock;
  /// One-way control-channel delay, drawn per message bundle and direction.
  DelayModel control_delay = delay::Uniform{Duration::ms(10), Duration::ms(100)};
  /// Base one-way delay of the initial offset-measurement exchange.
  Duration sync_base_delay = Duration::ms(5);
  /// Residual offset error after the initial exchange is at most this much.
  Duration clock_error_bound = Duration::ms(1);
  /// Each switch clock starts ahead of true time by U[0, this].
  Duration max_switch_offset = Duration::ms(50);
};

struct TimeFlipParams {
  unsigned ts_bits = 20;
  Duration tick = Duration::us(1);
  Duration hold = Duration::ms(100);
};

struct Topology {
  std::vector<Node> nodes;
  std::vector<Link> links;
  ControllerSpec controller;
  ExecutionMode mode = ExecutionMode::Software;
  TimeFlipParams timeflip;

  std::optional<NodeId> find_node(std::string_view name) const;
  NodeId node(std::string_view name) const;  // throws ConfigError
  /// First link from `a` to `b`; throws ConfigError when absent.
  LinkId link(std::string_view a, std::string_view b) const;
  std::vector<NodeId> switches() const;
};

struct Flow {
  FlowId id = 0;
  std::string name;
  NodeId ingress = 0;  // source host
  NodeId egress = 0;   // destination host
  std::uint64_t rate_pps = 0;
  std::vector<LinkId> path_before;
  std::vector<LinkId> path_after;
};

/// Rule operations a controller can ask one switch to perform.
/// Install adds a version; Activate makes it the one used for untagged or
/// unknown-tag packets; Remove deletes a version; Replace installs and
/// activates a version and removes every other one.
enum class RuleOp { Install, Activate, Remove, Replace };

std::string_view to_string(RuleOp op) noexcept;

struct LocalUpdate {
  NodeId node = 0;
  FlowId flow = 0;
  RuleOp op = RuleOp::Replace;
  Version version = 0;
  std::optional<LinkId> out_link;  // Install and Replace only

  friend bool operator==(const LocalUpdate&, const LocalUpdate&) = default;
};

/// Command text carried inside a bundle, e.g. `replace flow=1 v=2 link=4`.
std::string encode_command(const LocalUpdate& u);
LocalUpdate parse_command(NodeId node, std::string_view text);

struct UpdatePlan {
  /// Rules present before the update; every (node, flow) listed is active.
  std::vector<LocalUpdate> initial;
  /// Ordered phases. The last phase is the ingress flip.
  std::vector<std::vector<LocalUpdate>> phases;
  /// Removal of superseded rules once the update has drained.
  std::vector<LocalUpdate> cleanup;
  /// Step sequence for an untimed, acknowledgement-gated rollout.
  std::vector<std::vector<LocalUpdate>> untimed;
};

namespace strategy {
struct NoUpdate {};
/// Each untimed step is committed immediately once the previous step is
/// acknowledged by every switch it touched.
struct UntimedSequential {};
/// Every phase executes at controller time `at`; cleanup at + cleanup_delay.
struct TimedSimultaneous {
  SimTime at;
  Duration cleanup_delay;
};
/// Phase i executes at controller time phase_times[i]; cleanup at the last
/// phase time + cleanup_delay.
struct TimedMultiPhase {
  std::vector<SimTime> phase_times;
  Duration cleanup_delay;
};
/// Version-tagged reference rollout: all phases but the last, then the
/// last, then cleanup; each step is acknowledgement-gated and followed by
/// `safety_wait`.
struct TwoPhaseTagged {
  Duration safety_wait;
};
}  // namespace strategy

using UpdateStrategy = std::variant<strategy::NoUpdate, strategy::UntimedSequential, strategy::TimedSimultaneous,
                                    strategy::TimedMultiPhase, strategy::TwoPhaseTagged>;

std::string strategy_name(const UpdateStrategy& s);

struct Scenario {
  Topology topology;
  std::vector<Flow> flows;
  UpdatePlan plan;
  UpdateStrategy strategy = strategy::NoUpdate{};
  /// Controller clock time at which the controller starts sending.
  SimTime update_start = SimTime{Duration::ms(20).count()};
  /// Traffic is emitted in [0, horizon); the run continues until idle.
  SimTime horizon = SimTime{Duration::s(1).count()};
};

/// Throws ConfigError describing the first violated structural rule.
void validate(const Scenario& s);

/// Per-link sum of the rates of the flows whose path (one per flow) uses it.
std::vector<std::uint64_t> offered_load(const Topology& topo, const std::vector<Flow>& flows,
                                        const std::vector<std::vector<LinkId>>& paths);

}  // namespace ttu::netsim
