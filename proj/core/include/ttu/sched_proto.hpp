#pragma once

// Transport-independent state machines for scheduled configuration:
// OpenFlow-style Scheduled Bundles and NETCONF-style timed RPCs.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ttu/error.hpp"
#include "ttu/random.hpp"
#include "ttu/time.hpp"
#include "ttu/trace.hpp"

namespace ttu {

using BundleId = std::uint32_t;

/// Opaque configuration command (an encapsulated FLOW_MOD or similar).
struct Command {
  std::string text;

  friend bool operator==(const Command&, const Command&) = default;
};

namespace msg {
struct Open {
  BundleId bundle;
};
struct Add {
  BundleId bundle;
  Command command;
};
struct Close {
  BundleId bundle;
};
/// Commit without a time executes on receipt; with a time it is scheduled.
struct Commit {
  BundleId bundle;
  std::optional<SimTime> at;
};
struct Discard {
  BundleId bundle;
};
}  // namespace msg

using BundleMsg = std::variant<msg::Open, msg::Add, msg::Close, msg::Commit, msg::Discard>;

BundleId bundle_of(const BundleMsg& m);
std::string_view kind_of(const BundleMsg& m);

enum class BundlePhase { Opened, Closed, CommittedPending, Executed, Discarded };

std::string_view to_string(BundlePhase p) noexcept;

struct BundleState {
  BundleId id = 0;
  BundlePhase phase = BundlePhase::Opened;
  std::vector<Command> staged;
  std::optional<SimTime> scheduled_at;
  std::optional<SimTime> executed_at;
  std::uint64_t commit_seq = 0;
};

struct BundleReply {
  BundleId bundle = 0;
  std::optional<Errc> error;

  bool ok() const noexcept { return !error.has_value(); }
};

struct Execution {
  BundleId bundle = 0;
  Command command;
  SimTime at;
};

struct HandleResult {
  BundleReply reply;
  /// Non-empty only for an immediate Commit.
  std::vector<Execution> executed;
};

/// Switch side of the Scheduled Bundle exchange.
///
/// Phases advance Opened -> Closed -> CommittedPending -> Executed; Discarded
/// is reachable from every phase but Executed. A rejected message leaves the
/// state untouched and produces an error reply. Bundle ids may not be reused
/// within one session.
class BundleSwitch {
 public:
  explicit BundleSwitch(DelayModel exec_latency = delay::Constant{}, std::uint64_t seed = 0);

  /// Attaches a trace sink; `node` is prefixed to every detail column.
  void set_trace(TraceLog* log, std::string node = {});

  HandleResult handle(const BundleMsg& m, SimTime now);

  /// Executes every pending bundle with scheduled time <= now, earliest first.
  /// Each command runs at scheduled time + execution latency; all commands of
  /// a bundle share one latency draw and stay contiguous.
  std::vector<Execution> execute_due(SimTime now);

  const BundleState* bundle(BundleId id) const;
  std::optional<SimTime> next_due() const;
  std::size_t pending() const;

 private:
  std::vector<Execution> run(BundleState& b, SimTime base);
  BundleReply reject(BundleId id, Errc e, SimTime now, std::string_view why);
  void log(SimTime t, Direction d, std::string kind, BundleId id, std::string detail);

  DelayModel latency_;
  Rng rng_;
  std::map<BundleId, BundleState> bundles_;
  std::uint64_t commit_seq_ = 0;
  TraceLog* trace_ = nullptr;
  std::string node_;
};

inline HandleResult switch_handle(BundleSwitch& sw, const BundleMsg& m, SimTime now) {
  return sw.handle(m, now);
}

inline std::vector<Execution> execute_due(BundleSwitch& sw, SimTime now) {
  return sw.execute_due(now);
}

/// Controller-side session: allocates bundle ids and emits message sequences.
class BundleController {
 public:
  explicit BundleController(BundleId first_id = 1) : next_(first_id) {}

  /// Open, one Add per command, Close, Commit(at). Throws EmptyBundle.
  std::vector<BundleMsg> build_scheduled_bundle(std::span<const Command> commands,
                                                std::optional<SimTime> at);

  BundleId peek_next_id() const noexcept { return next_; }

 private:
  BundleId next_;
};

// NETCONF time capability ---------------------------------------------------

struct ScheduledRpc {
  std::uint64_t rpc_id = 0;
  Command payload;
  std::optional<SimTime> scheduled_time;
  bool get_time = false;
};

struct RpcReply {
  std::uint64_t rpc_id = 0;
  std::optional<Errc> status;
  /// Present exactly when get_time was requested and the RPC ran.
  std::optional<SimTime> execution_time;

  bool ok() const noexcept { return !status.has_value(); }
};

/// What the server does with one RPC. `reply_at` is when the reply is
/// available to the client; `completion` is the true finish time, which the
/// reported execution_time equals unless a reporting fault was injected.
struct RpcOutcome {
  RpcReply reply;
  SimTime actual_start;
  SimTime completion;
  SimTime reply_at;
  bool report_faulted = false;
};

struct ServerModel {
  DelayModel start_jitter = delay::Constant{};
  DelayModel run_time = delay::Constant{};
  /// Probability that the reported execution-time is off by `report_fault_offset`.
  double report_fault_prob = 0.0;
  Duration report_fault_offset;
};

class RpcServer {
 public:
  static constexpr Duration kDefaultStaleness = Duration::s(1);

  explicit RpcServer(ServerModel model, std::uint64_t seed = 0,
                     Duration staleness_bound = kDefaultStaleness);

  /// Starts at max(now, scheduled_time) plus start jitter. A scheduled time
  /// older than now - staleness_bound is refused with RpcTooLate.
  RpcOutcome dispatch(const ScheduledRpc& rpc, SimTime now);

  const ServerModel& model() const noexcept { return model_; }

 private:
  ServerModel model_;
  Rng rng_;
  Duration staleness_;
};

inline RpcOutcome rpc_dispatch(RpcServer& server, const ScheduledRpc& rpc, SimTime now) {
  return server.dispatch(rpc, now);
}

}  // namespace ttu
