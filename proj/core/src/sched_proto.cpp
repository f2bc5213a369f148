#include "ttu/sched_proto.hpp"

#include <algorithm>

namespace ttu {

BundleId bundle_of(const BundleMsg& m) {
  return std::visit([](const auto& v) { return v.bundle; }, m);
}

std::string_view kind_of(const BundleMsg& m) {
  struct Visitor {
    std::string_view operator()(const msg::Open&) const { return "OPEN"; }
    std::string_view operator()(const msg::Add&) const { return "ADD"; }
    std::string_view operator()(const msg::Close&) const { return "CLOSE"; }
    std::string_view operator()(const msg::Commit&) const { return "COMMIT"; }
    std::string_view operator()(const msg::Discard&) const { return "DISCARD"; }
  };
  return std::visit(Visitor{}, m);
}

std::string_view to_string(BundlePhase p) noexcept {
  switch (p) {
    case BundlePhase::Opened: return "Opened";
    case BundlePhase::Closed: return "Closed";
    case BundlePhase::CommittedPending: return "CommittedPending";
    case BundlePhase::Executed: return "Executed";
    case BundlePhase::Discarded: return "Discarded";
  }
  return "?";
}

BundleSwitch::BundleSwitch(DelayModel exec_latency, std::uint64_t seed)
    : latency_(exec_latency), rng_(make_rng(seed, 0xB0D1E)) {}

void BundleSwitch::set_trace(TraceLog* log, std::string node) {
  trace_ = log;
  node_ = std::move(node);
}

void BundleSwitch::log(SimTime t, Direction d, std::string kind, BundleId id, std::string detail) {
  if (trace_ == nullptr) return;
  if (!node_.empty()) detail = detail.empty() ? "node=" + node_ : "node=" + node_ + " " + detail;
  trace_->add(t, d, std::move(kind), id, std::move(detail));
}

BundleReply BundleSwitch::reject(BundleId id, Errc e, SimTime now, std::string_view) {
  log(now, Direction::ToController, "REPLY", id, std::string(to_string(e)));
  return BundleReply{id, e};
}

namespace {

std::string message_detail(const BundleMsg& m) {
  if (const auto* a = std::get_if<msg::Add>(&m)) return a->command.text;
  if (const auto* c = std::get_if<msg::Commit>(&m))
    return c->at ? "at=" + std::to_string(c->at->ns()) : std::string("immediate");
  return {};
}

}  // namespace

HandleResult BundleSwitch::handle(const BundleMsg& m, SimTime now) {
  const BundleId id = bundle_of(m);
  log(now, Direction::ToSwitch, std::string(kind_of(m)), id, message_detail(m));

  HandleResult out;
  out.reply.bundle = id;
  auto it = bundles_.find(id);

  if (std::holds_alternative<msg::Open>(m)) {
    if (it != bundles_.end()) {
      out.reply = reject(id, Errc::DuplicateBundle, now, "bundle id reused");
      return out;
    }
    bundles_.emplace(id, BundleState{id, BundlePhase::Opened, {}, {}, {}, 0});
  } else if (const auto* add = std::get_if<msg::Add>(&m)) {
    if (it == bundles_.end() || it->second.phase != BundlePhase::Opened) {
      out.reply = reject(id, Errc::BundleStateError, now, "add outside an open bundle");
      return out;
    }
    it->second.staged.push_back(add->command);
    return out;  // Adds are only answered on error.
  } else if (std::holds_alternative<msg::Close>(m)) {
    if (it == bundles_.end() || it->second.phase != BundlePhase::Opened) {
      out.reply = reject(id, Errc::BundleStateError, now, "close of a bundle that is not open");
      return out;
    }
    it->second.phase = BundlePhase::Closed;
  } else if (const auto* commit = std::get_if<msg::Commit>(&m)) {
    if (it == bundles_.end() || it->second.phase != BundlePhase::Closed) {
      out.reply = reject(id, Errc::BundleStateError, now, "commit of a bundle that is not closed");
      return out;
    }
    if (commit->at && *commit->at < now) {
      out.reply = reject(id, Errc::SchedulePastError, now, "scheduled time already passed");
      return out;
    }
    BundleState& b = it->second;
    b.commit_seq = ++commit_seq_;
    if (commit->at) {
      b.phase = BundlePhase::CommittedPending;
      b.scheduled_at = commit->at;
    } else {
      log(now, Direction::ToController, "REPLY", id, "ok");
      out.executed = run(b, now);
      return out;
    }
  } else {
    if (it == bundles_.end() || it->second.phase == BundlePhase::Discarded) {
      out.reply = reject(id, Errc::BundleStateError, now, "discard of an unknown bundle");
      return out;
    }
    if (it->second.phase == BundlePhase::Executed) {
      out.reply = reject(id, Errc::AlreadyExecuted, now, "bundle already executed");
      return out;
    }
    it->second.phase = BundlePhase::Discarded;
    it->second.staged.clear();
    it->second.scheduled_at.reset();
  }
  log(now, Direction::ToController, "REPLY", id, "ok");
  return out;
}

std::vector<Execution> BundleSwitch::run(BundleState& b, SimTime base) {
  const SimTime at = base + sample(latency_, rng_);
  b.phase = BundlePhase::Executed;
  b.executed_at = at;
  std::vector<Execution> out;
  out.reserve(b.staged.size());
  for (const auto& c : b.staged) {
    out.push_back(Execution{b.id, c, at});
    log(at, Direction::Local, "EXEC", b.id, "at=" + std::to_string(at.ns()) + " cmd=" + c.text);
  }
  if (b.staged.empty()) log(at, Direction::Local, "EXEC", b.id, "at=" + std::to_string(at.ns()) + " empty");
  return out;
}

std::vector<Execution> BundleSwitch::execute_due(SimTime now) {
  std::vector<BundleState*> due;
  for (auto& [id, b] : bundles_)
    if (b.phase == BundlePhase::CommittedPending && *b.scheduled_at <= now) due.push_back(&b);
  std::sort(due.begin(), due.end(), [](const BundleState* x, const BundleState* y) {
    if (*x->scheduled_at != *y->scheduled_at) return *x->scheduled_at < *y->scheduled_at;
    return x->commit_seq < y->commit_seq;
  });
  std::vector<Execution> out;
  for (BundleState* b : due) {
    auto part = run(*b, *b->scheduled_at);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

const BundleState* BundleSwitch::bundle(BundleId id) const {
  auto it = bundles_.find(id);
  return it == bundles_.end() ? nullptr : &it->second;
}

std::optional<SimTime> BundleSwitch::next_due() const {
  std::optional<SimTime> best;
  for (const auto& [id, b] : bundles_)
    if (b.phase == BundlePhase::CommittedPending && (!best || *b.scheduled_at < *best)) best = b.scheduled_at;
  return best;
}

std::size_t BundleSwitch::pending() const {
  return static_cast<std::size_t>(std::count_if(bundles_.begin(), bundles_.end(), [](const auto& kv) {
    return kv.second.phase == BundlePhase::CommittedPending;
  }));
}

std::vector<BundleMsg> BundleController::build_scheduled_bundle(std::span<const Command> commands,
                                                                 std::optional<SimTime> at) {
  if (commands.empty()) throw Error(Errc::EmptyBundle, "a bundle needs at least one command");
  const BundleId id = next_++;
  std::vector<BundleMsg> out;
  out.reserve(commands.size() + 3);
  out.emplace_back(msg::Open{id});
  for (const auto& c : commands) out.emplace_back(msg::Add{id, c});
  out.emplace_back(msg::Close{id});
  out.emplace_back(msg::Commit{id, at});
  return out;
}

RpcServer::RpcServer(ServerModel model, std::uint64_t seed, Duration staleness_bound)
    : model_(std::move(model)), rng_(make_rng(seed, 0x4E7C)), staleness_(staleness_bound) {}

RpcOutcome RpcServer::dispatch(const ScheduledRpc& rpc, SimTime now) {
  RpcOutcome out;
  out.reply.rpc_id = rpc.rpc_id;
  if (rpc.scheduled_time && *rpc.scheduled_time + staleness_ < now) {
    out.reply.status = Errc::RpcTooLate;
    out.actual_start = out.completion = out.reply_at = now;
    return out;
  }
  const SimTime base = rpc.scheduled_time ? std::max(now, *rpc.scheduled_time) : now;
  out.actual_start = base + sample(model_.start_jitter, rng_);
  out.completion = out.actual_start + sample(model_.run_time, rng_);
  out.reply_at = out.completion;

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const bool fault = coin(rng_) < model_.report_fault_prob;
  if (rpc.get_time) {
    out.report_faulted = fault;
    out.reply.execution_time = fault ? out.completion + model_.report_fault_offset : out.completion;
  }
  return out;
}

}  // namespace ttu
