#pragma once

// Deterministic discrete-event run of a Scenario.
//
// Traffic: every flow emits evenly spaced packets over [0, horizon) with a
// seeded phase. Each directed link is a token bucket of rate capacity_pps and
// depth capacity * tick (at least one packet plus one of slack); a packet
// finding the bucket empty is dropped. Summed over a tick this is the fluid
// rule "drop the excess of offered rate over capacity".
//
// Versions: the first switch tags a packet with the version it used. A
// later switch uses the tagged version when it holds it and its active
// version otherwise; every hop stamps the version it actually used.
//
// Control: the controller first measures every switch offset with one
// two-way exchange whose path asymmetry keeps the residual error within
// clock_error_bound, then carries out the strategy with Scheduled Bundles
// whose execution times are translated through its offset table.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ttu/netsim/model.hpp"
#include "ttu/trace.hpp"

namespace ttu::netsim {

inline constexpr Duration kTrafficTick = Duration::us(100);
inline constexpr unsigned kMaxHops = 64;

enum class Fate { Delivered, DroppedNoRule, DroppedOverload, DroppedTtl };

std::string_view to_string(Fate f) noexcept;

struct HopStamp {
  NodeId node = 0;
  Version version = 0;
  friend bool operator==(const HopStamp&, const HopStamp&) = default;
};

struct PacketRecord {
  FlowId flow = 0;
  std::uint64_t seq = 0;
  SimTime sent;
  std::vector<HopStamp> stamps;  // path order
  Fate fate = Fate::Delivered;
  SimTime fate_time;
  /// Node for DroppedNoRule/DroppedTtl, link for DroppedOverload, egress otherwise.
  std::uint32_t where = 0;
};

enum class RuleEventKind { Install, Remove, Activate };

struct RuleEvent {
  SimTime time;
  NodeId node = 0;
  FlowId flow = 0;
  Version version = 0;
  RuleEventKind kind = RuleEventKind::Install;
  bool initial = false;  // present before the run started
  /// The change does not alter forwarding: a TimeFlip write before its range
  /// starts, or the collapse of entries already shadowed by the flip.
  bool dormant = false;
};

struct Trace {
  /// Protocol exchange and rule changes, in simulation time.
  TraceLog log;
  std::vector<RuleEvent> rule_events;
  std::vector<PacketRecord> packets;
  SimTime end;
};

struct FlowMetrics {
  FlowId flow = 0;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  friend bool operator==(const FlowMetrics&, const FlowMetrics&) = default;
};

struct Metrics {
  std::vector<FlowMetrics> per_flow;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t consistency_violations = 0;
  Duration duplicate_config_duration;
  Duration update_span;
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct RunResult {
  Metrics metrics;
  Trace trace;
};

/// Throws ConfigError for an invalid scenario (see validate).
RunResult run(const Scenario& scenario, std::uint64_t seed);

/// Packets whose hop stamps carry more than one distinct version.
std::uint64_t check_consistency(const Trace& trace);

/// Length of the union of intervals during which some switch holds two or
/// more versions for one flow. An interval still open at trace.end is closed
/// there.
Duration duplicate_config_duration(const Trace& trace);

/// First to last rule event that alters forwarding (neither initial nor
/// dormant); zero when there are none.
Duration update_span(const Trace& trace);

Metrics compute_metrics(const Scenario& scenario, const Trace& trace);

}  // namespace ttu::netsim
