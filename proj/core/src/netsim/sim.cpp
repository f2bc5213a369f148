#include "ttu/netsim/sim.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "ttu/error.hpp"
#include "ttu/sched_proto.hpp"
#include "ttu/tcam.hpp"
#include "ttu/timeflip.hpp"

namespace ttu::netsim {

std::string_view to_string(Fate f) noexcept {
  switch (f) {
    case Fate::Delivered: return "delivered";
    case Fate::DroppedNoRule: return "dropped_no_rule";
    case Fate::DroppedOverload: return "dropped_overload";
    case Fate::DroppedTtl: return "dropped_ttl";
  }
  return "?";
}

namespace {

constexpr unsigned kKeyBits = 16;
constexpr std::int64_t kUnitsPerPacket = 1'000'000'000;

enum class Ev : std::uint8_t { StepSend, BundleArrive, Due, Apply, Ack, TcamInstall, Collapse, Emit, NodeArrive };

// Control events sort before packet events at the same instant so a rule
// change at t is visible to a packet looked up at t.
struct Event {
  SimTime t;
  std::uint8_t cls = 0;
  std::uint64_t seq = 0;
  Ev kind = Ev::Emit;
  std::uint32_t a = 0;
  std::uint64_t b = 0;
};

struct Later {
  bool operator()(const Event& x, const Event& y) const {
    return std::tie(x.t, x.cls, x.seq) > std::tie(y.t, y.cls, y.seq);
  }
};

ActionId encode_action(LinkId link, Version v) { return (static_cast<ActionId>(link) + 1) << 32 | v; }
LinkId action_link(ActionId a) { return static_cast<LinkId>((a >> 32) - 1); }

struct FlowRules {
  std::map<Version, LinkId> versions;
  std::optional<Version> active;
};

struct SwitchState {
  NodeId node = 0;
  ClockModel clock;
  BundleSwitch proto;
  TraceLog log;  // local clock times
  BundleController session;
  std::map<FlowId, FlowRules> rules;
  std::optional<TcamTable> tcam;
  std::map<FlowId, EntryId> base;  // timeless TCAM entry per flow
};

struct Bucket {
  SimTime last;
  std::int64_t level = 0;
  std::int64_t depth = 0;
};

struct SentBundle {
  std::size_t sw = 0;
  std::vector<BundleMsg> msgs;
  int step = -1;  // >= 0 when acknowledgement-gated
};

struct PendingApply {
  std::size_t sw = 0;
  BundleId bundle = 0;
  std::vector<Command> cmds;
  bool scheduled = false;
  int step = -1;
};

struct PendingFlip {
  std::size_t sw = 0;
  BundleId bundle = 0;
  std::vector<LocalUpdate> updates;
  SimTime t0_local;
};

struct PendingCollapse {
  std::size_t sw = 0;
  FlowId flow = 0;
  Version old_version = 0;
  Version new_version = 0;
  SimTime due_local;
};

struct Step {
  std::vector<LocalUpdate> updates;
  Duration wait_after;
};

class Simulation {
 public:
  Simulation(const Scenario& sc, std::uint64_t seed)
      : sc_(sc),
        topo_(sc.topology),
        ctrl_clock_(topo_.controller.clock),
        offsets_(Duration{}),
        control_rng_(make_rng(seed, 3)),
        latency_rng_(make_rng(seed, 5)) {
    build_switches(seed);
    synchronize(seed);
    init_rules();
    init_buckets();
    init_traffic(seed);
    init_strategy();
  }

  RunResult run() {
    while (!queue_.empty()) {
      const Event e = queue_.top();
      queue_.pop();
      now_ = e.t;
      dispatch(e);
    }
    return finish();
  }

 private:
  // Setup ---------------------------------------------------------------

  void build_switches(std::uint64_t seed) {
    Rng offset_rng = make_rng(seed, 1);
    sw_index_.assign(topo_.nodes.size(), SIZE_MAX);
    for (NodeId n : topo_.switches()) {
      const auto& spec = topo_.nodes[n].sw;
      ClockModel::Params p = spec.clock;
      const auto spread = topo_.controller.max_switch_offset.count();
      p.true_offset += Duration{std::uniform_int_distribution<std::int64_t>(0, spread)(offset_rng)};
      p.rng_seed = make_rng(seed, 1000 + n)();
      const std::uint64_t proto_seed = make_rng(seed, 2000 + n)();
      sw_index_[n] = switches_.size();
      switches_.push_back(SwitchState{n, ClockModel(p), BundleSwitch(spec.install_latency, proto_seed), TraceLog{}, BundleController{}, {}, std::nullopt, {}});
      auto& s = switches_.back();
      if (topo_.mode == ExecutionMode::TimeFlip)
        s.tcam.emplace(kKeyBits, topo_.timeflip.ts_bits, spec.table_capacity);
    }
    for (auto& s : switches_) s.proto.set_trace(&s.log, topo_.nodes[s.node].name);
  }

  // One two-way exchange per switch at time zero. The path asymmetry a is
  // drawn from [-2e, 2e], which biases the estimate by a / 2.
  void synchronize(std::uint64_t seed) {
    Rng asym_rng = make_rng(seed, 2);
    const auto& c = topo_.controller;
    const auto eps = c.clock_error_bound.count();
    for (auto& s : switches_) {
      const std::int64_t a = std::uniform_int_distribution<std::int64_t>(-2 * eps, 2 * eps)(asym_rng);
      const PathDelays d{c.sync_base_delay - Duration{a / 2}, c.sync_base_delay + Duration{a / 2}};
      offsets_.register_switch(s.node);
      offsets_.update(rptp_exchange(s.node, s.clock, ctrl_clock_, d, SimTime{}));
    }
  }

  void init_rules() {
    for (const auto& u : sc_.plan.initial) {
      auto& s = sw(u.node);
      if (s.tcam) {
        if (s.base.contains(u.flow))
          throw Error(Errc::ConfigError, "TimeFlip switches hold one initial rule per flow");
        s.base[u.flow] = s.tcam->add(0, TernaryWord::exact(u.flow, kKeyBits), TernaryWord(s.tcam->ts_width()),
                                     encode_action(*u.out_link, u.version), u.version);
      } else {
        auto& fr = s.rules[u.flow];
        fr.versions[u.version] = *u.out_link;
        fr.active = std::max(fr.active.value_or(0), u.version);
      }
      trace_.rule_events.push_back(RuleEvent{SimTime{}, u.node, u.flow, u.version, RuleEventKind::Install, true});
    }
  }

  void init_buckets() {
    for (const auto& l : topo_.links) {
      const auto per_tick = static_cast<std::int64_t>(
          static_cast<__int128>(l.capacity_pps) * kTrafficTick.count() / kUnitsPerPacket);
      Bucket b;
      b.depth = (std::max<std::int64_t>(per_tick, 1) + 1) * kUnitsPerPacket;
      b.level = b.depth;
      buckets_.push_back(b);
    }
  }

  void init_traffic(std::uint64_t seed) {
    Rng phase_rng = make_rng(seed, 4);
    for (std::size_t i = 0; i < sc_.flows.size(); ++i) {
      const auto period = kUnitsPerPacket / static_cast<std::int64_t>(sc_.flows[i].rate_pps);
      phase_.push_back(std::uniform_int_distribution<std::int64_t>(0, std::max<std::int64_t>(period - 1, 0))(phase_rng));
      schedule_emit(i, 0);
    }
  }

  void init_strategy() {
    const SimTime start = ctrl_clock_.true_time_at(sc_.update_start);
    const auto& plan = sc_.plan;
    std::visit(
        [&](const auto& st) {
          using T = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<T, strategy::UntimedSequential>) {
            for (const auto& u : plan.untimed) steps_.push_back(Step{u, Duration{}});
          } else if constexpr (std::is_same_v<T, strategy::TwoPhaseTagged>) {
            std::vector<LocalUpdate> prepare;
            for (std::size_t i = 0; i + 1 < plan.phases.size(); ++i)
              prepare.insert(prepare.end(), plan.phases[i].begin(), plan.phases[i].end());
            if (!prepare.empty()) steps_.push_back(Step{prepare, st.safety_wait});
            steps_.push_back(Step{plan.phases.back(), st.safety_wait});
            if (!plan.cleanup.empty()) steps_.push_back(Step{plan.cleanup, Duration{}});
          } else if constexpr (std::is_same_v<T, strategy::TimedSimultaneous>) {
            std::vector<LocalUpdate> all;
            for (const auto& ph : plan.phases) all.insert(all.end(), ph.begin(), ph.end());
            timed_.push_back({st.at, all});
            if (!plan.cleanup.empty()) timed_.push_back({st.at + st.cleanup_delay, plan.cleanup});
          } else if constexpr (std::is_same_v<T, strategy::TimedMultiPhase>) {
            for (std::size_t i = 0; i < plan.phases.size(); ++i) timed_.push_back({st.phase_times[i], plan.phases[i]});
            if (!plan.cleanup.empty() && !st.phase_times.empty())
              timed_.push_back({st.phase_times.back() + st.cleanup_delay, plan.cleanup});
          }
        },
        sc_.strategy);
    if (!steps_.empty()) push(start, 0, Ev::StepSend, 0, 0);
    if (!timed_.empty()) push(start, 0, Ev::StepSend, UINT32_MAX, 0);
  }

  // Event plumbing ------------------------------------------------------

  void push(SimTime t, std::uint8_t cls, Ev kind, std::uint32_t a, std::uint64_t b) {
    queue_.push(Event{t, cls, seq_++, kind, a, b});
  }

  SwitchState& sw(NodeId n) {
    if (n >= sw_index_.size() || sw_index_[n] == SIZE_MAX)
      throw Error(Errc::ConfigError, "node " + std::to_string(n) + " is not a switch");
    return switches_[sw_index_[n]];
  }

  SimTime local_now(const SwitchState& s) const { return s.clock.ideal_read(now_); }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case Ev::StepSend: return e.a == UINT32_MAX ? send_timed() : send_step(static_cast<int>(e.a));
      case Ev::BundleArrive: return on_bundle(e.b);
      case Ev::Due: return on_due(e.a);
      case Ev::Apply: return on_apply(e.b);
      case Ev::Ack: return on_ack(static_cast<int>(e.a));
      case Ev::TcamInstall: return on_tcam_install(e.b);
      case Ev::Collapse: return on_collapse(e.b);
      case Ev::Emit: return on_emit(e.a, e.b);
      case Ev::NodeArrive: return on_arrive(e.a, e.b);
    }
  }

  // Controller ----------------------------------------------------------

  static std::vector<std::pair<NodeId, std::vector<Command>>> group_by_switch(const std::vector<LocalUpdate>& us) {
    std::vector<std::pair<NodeId, std::vector<Command>>> out;
    for (const auto& u : us) {
      auto it = std::find_if(out.begin(), out.end(), [&](const auto& g) { return g.first == u.node; });
      if (it == out.end()) it = out.insert(out.end(), {u.node, {}});
      it->second.push_back(Command{encode_command(u)});
    }
    return out;
  }

  void send_bundle(NodeId node, const std::vector<Command>& cmds, std::optional<SimTime> at, int step) {
    auto& s = sw(node);
    SentBundle b{sw_index_[node], s.session.build_scheduled_bundle(cmds, at), step};
    const Duration d = sample(topo_.controller.control_delay, control_rng_);
    bundles_.push_back(std::move(b));
    push(now_ + d, 0, Ev::BundleArrive, 0, bundles_.size() - 1);
  }

  void send_step(int step) {
    const auto groups = group_by_switch(steps_[static_cast<std::size_t>(step)].updates);
    outstanding_ = groups.size();
    if (groups.empty()) {
      advance(step);
      return;
    }
    for (const auto& [node, cmds] : groups) send_bundle(node, cmds, std::nullopt, step);
  }

  void advance(int step) {
    const auto next = static_cast<std::size_t>(step) + 1;
    if (next < steps_.size())
      push(now_ + steps_[static_cast<std::size_t>(step)].wait_after, 0, Ev::StepSend, static_cast<std::uint32_t>(next), 0);
  }

  void send_timed() {
    for (const auto& [at, updates] : timed_)
      for (const auto& [node, cmds] : group_by_switch(updates))
        send_bundle(node, cmds, offsets_.translate(node, at), -1);
  }

  void on_ack(int step) {
    if (outstanding_ == 0) throw Error(Errc::InvariantBreach, "unexpected acknowledgement");
    if (--outstanding_ == 0) advance(step);
  }

  void ack_later(int step) {
    if (step < 0) return;
    push(now_ + sample(topo_.controller.control_delay, control_rng_), 0, Ev::Ack, static_cast<std::uint32_t>(step), 0);
  }

  // Switch protocol -----------------------------------------------------

  void on_bundle(std::size_t idx) {
    const SentBundle& b = bundles_[idx];
    auto& s = switches_[b.sw];
    const SimTime local = local_now(s);
    bool applied = false;
    for (const auto& m : b.msgs) {
      const auto res = s.proto.handle(m, local);
      const auto* commit = std::get_if<msg::Commit>(&m);
      if (commit == nullptr || !res.reply.ok()) continue;
      if (!commit->at) {
        if (!res.executed.empty()) {
          schedule_apply(b.sw, res.executed, false, b.step);
          applied = true;
        }
        continue;
      }
      push(std::max(now_, s.clock.true_time_at(*commit->at)), 0, Ev::Due, static_cast<std::uint32_t>(b.sw), 0);
      if (s.tcam) {
        PendingFlip f{b.sw, commit->bundle, {}, *commit->at};
        for (const auto& c : s.proto.bundle(commit->bundle)->staged) f.updates.push_back(parse_command(s.node, c.text));
        flips_.push_back(std::move(f));
        push(flip_install_time(s, *commit->at), 0, Ev::TcamInstall, 0, flips_.size() - 1);
      }
    }
    if (!applied) ack_later(b.step);
  }

  // Entries go in after the install latency, but never more than one field
  // period minus the hold ahead of T0, where the periodic range would match
  // an earlier cycle.
  SimTime flip_install_time(const SwitchState& s, SimTime t0_local) {
    const auto& tf = topo_.timeflip;
    SimTime t = now_ + sample(topo_.nodes[s.node].sw.install_latency, latency_rng_);
    const Duration period = tf.tick * (std::int64_t{1} << tf.ts_bits);
    const Duration lead = period - tf.hold - tf.tick;
    if (t0_local.ns() > static_cast<std::uint64_t>(lead.count()))
      t = std::max(t, s.clock.true_time_at(t0_local - lead));
    return t;
  }

  void schedule_apply(std::size_t swi, const std::vector<Execution>& execs, bool scheduled, int step) {
    // Executions of one bundle share one time and stay contiguous.
    std::size_t i = 0;
    while (i < execs.size()) {
      PendingApply p{swi, execs[i].bundle, {}, scheduled, step};
      const SimTime at = execs[i].at;
      while (i < execs.size() && execs[i].bundle == p.bundle) p.cmds.push_back(execs[i++].command);
      applies_.push_back(std::move(p));
      push(std::max(now_, switches_[swi].clock.true_time_at(at)), 0, Ev::Apply, 0, applies_.size() - 1);
    }
  }

  void on_due(std::uint32_t swi) {
    auto& s = switches_[swi];
    const auto execs = s.proto.execute_due(local_now(s));
    schedule_apply(swi, execs, true, -1);
  }

  void rule_event(const SwitchState& s, FlowId flow, Version v, RuleEventKind k, BundleId bundle,
                  bool dormant = false, std::optional<SimTime> at = std::nullopt) {
    const SimTime t = at.value_or(now_);
    trace_.rule_events.push_back(RuleEvent{t, s.node, flow, v, k, false, dormant});
    static constexpr const char* names[] = {"install", "remove", "activate"};
    rule_lines_.push_back(TraceLine{t, Direction::Local, "RULE", bundle,
                                    "node=" + topo_.nodes[s.node].name + " flow=" + std::to_string(flow) +
                                        " op=" + names[static_cast<int>(k)] + " v=" + std::to_string(v)});
  }

  void on_apply(std::size_t idx) {
    const PendingApply& p = applies_[idx];
    auto& s = switches_[p.sw];
    for (const auto& c : p.cmds) {
      const LocalUpdate u = parse_command(s.node, c.text);
      if (s.tcam) {
        if (!p.scheduled) replace_now(s, u, p.bundle);
      } else {
        apply_software(s, u, p.bundle);
      }
    }
    ack_later(p.step);
  }

  void apply_software(SwitchState& s, const LocalUpdate& u, BundleId bundle) {
    auto& fr = s.rules[u.flow];
    auto install = [&] {
      const auto [it, fresh] = fr.versions.insert_or_assign(u.version, *u.out_link);
      if (fresh) rule_event(s, u.flow, u.version, RuleEventKind::Install, bundle);
    };
    auto activate = [&] {
      if (!fr.versions.contains(u.version) || fr.active == u.version) return;
      fr.active = u.version;
      rule_event(s, u.flow, u.version, RuleEventKind::Activate, bundle);
    };
    auto remove = [&](Version v) {
      if (fr.versions.erase(v) == 0) return;
      if (fr.active == v)
        fr.active = fr.versions.empty() ? std::nullopt : std::optional<Version>(fr.versions.rbegin()->first);
      rule_event(s, u.flow, v, RuleEventKind::Remove, bundle);
    };
    switch (u.op) {
      case RuleOp::Install: install(); break;
      case RuleOp::Activate: activate(); break;
      case RuleOp::Remove: remove(u.version); break;
      case RuleOp::Replace: {
        install();
        activate();
        std::vector<Version> others;
        for (const auto& [v, _] : fr.versions)
          if (v != u.version) others.push_back(v);
        for (Version v : others) remove(v);
        break;
      }
    }
  }

  const TcamEntry& base_entry(SwitchState& s, FlowId flow) {
    auto it = s.base.find(flow);
    const TcamEntry* e = it == s.base.end() ? nullptr : s.tcam->entry(it->second);
    if (e == nullptr) throw Error(Errc::ConfigError, "no TCAM rule for flow " + std::to_string(flow));
    return *e;
  }

  void replace_now(SwitchState& s, const LocalUpdate& u, BundleId bundle) {
    const Version old = base_entry(s, u.flow).config_version;
    s.tcam->remove(s.base[u.flow]);
    s.base[u.flow] = s.tcam->add(0, TernaryWord::exact(u.flow, kKeyBits), TernaryWord(s.tcam->ts_width()),
                                 encode_action(*u.out_link, u.version), u.version);
    rule_event(s, u.flow, u.version, RuleEventKind::Install, bundle);
    rule_event(s, u.flow, old, RuleEventKind::Remove, bundle);
  }

  void on_tcam_install(std::size_t idx) {
    const PendingFlip& f = flips_[idx];
    auto& s = switches_[f.sw];
    for (const auto& u : f.updates) {
      const Version old = base_entry(s, u.flow).config_version;
      if (u.version != old + 1)
        throw Error(Errc::ConfigError, "a TimeFlip replace must advance the version by one");
      FlipOptions opts;
      opts.periodic_hold = topo_.timeflip.hold;
      const FlipRecord rec = install_timeflip(*s.tcam, s.base[u.flow], encode_action(*u.out_link, u.version),
                                              f.t0_local, topo_.timeflip.tick, opts);
      const SimTime flip = std::max(now_, s.clock.true_time_at(f.t0_local));
      rule_event(s, u.flow, u.version, RuleEventKind::Install, f.bundle, flip > now_);
      rule_event(s, u.flow, u.version, RuleEventKind::Activate, f.bundle, false, flip);
      collapses_.push_back(PendingCollapse{f.sw, u.flow, old, u.version, rec.collapse_at});
      push(std::max(now_, s.clock.true_time_at(rec.collapse_at)), 0, Ev::Collapse, 0, collapses_.size() - 1);
    }
  }

  void on_collapse(std::size_t idx) {
    const PendingCollapse& c = collapses_[idx];
    auto& s = switches_[c.sw];
    s.tcam->run_cleanups(std::max(local_now(s), c.due_local));
    const TernaryWord key = TernaryWord::exact(c.flow, kKeyBits);
    for (const auto& e : s.tcam->entries())
      if (e.key_match == key && e.ts_match.care_mask() == 0 && e.config_version == c.new_version) s.base[c.flow] = e.id;
    rule_event(s, c.flow, c.old_version, RuleEventKind::Remove, 0, true);
  }

  // Traffic -------------------------------------------------------------

  SimTime emit_time(std::size_t flow, std::uint64_t n) const {
    const auto offset = static_cast<__int128>(n) * kUnitsPerPacket / sc_.flows[flow].rate_pps;
    return SimTime::checked(offset + phase_[flow], "emission time");
  }

  void schedule_emit(std::size_t flow, std::uint64_t n) {
    const SimTime t = emit_time(flow, n);
    if (t < sc_.horizon) push(t, 1, Ev::Emit, static_cast<std::uint32_t>(flow), n);
  }

  void on_emit(std::uint32_t flow, std::uint64_t n) {
    const Flow& f = sc_.flows[flow];
    trace_.packets.push_back(PacketRecord{f.id, n, now_, {}, Fate::Delivered, {}, 0});
    tags_.emplace_back();
    flow_index_.push_back(flow);
    offer(f.path_before.front(), trace_.packets.size() - 1);
    schedule_emit(flow, n + 1);
  }

  bool admit(LinkId l) {
    Bucket& b = buckets_[l];
    const auto dt = static_cast<__int128>((now_ - b.last).count());
    const __int128 refill = dt * static_cast<__int128>(topo_.links[l].capacity_pps);
    b.level = static_cast<std::int64_t>(std::min<__int128>(b.depth, b.level + refill));
    b.last = now_;
    if (b.level < kUnitsPerPacket) return false;
    b.level -= kUnitsPerPacket;
    return true;
  }

  void end_packet(std::size_t pkt, Fate fate, std::uint32_t where) {
    auto& r = trace_.packets[pkt];
    r.fate = fate;
    r.fate_time = now_;
    r.where = where;
  }

  void offer(LinkId l, std::size_t pkt) {
    if (!admit(l)) {
      end_packet(pkt, Fate::DroppedOverload, l);
      return;
    }
    push(now_ + topo_.links[l].propagation, 1, Ev::NodeArrive, topo_.links[l].to, pkt);
  }

  void on_arrive(NodeId node, std::size_t pkt) {
    auto& rec = trace_.packets[pkt];
    const Flow& f = sc_.flows[flow_index_[pkt]];
    if (topo_.nodes[node].kind == NodeKind::Host) {
      end_packet(pkt, node == f.egress ? Fate::Delivered : Fate::DroppedNoRule, node);
      return;
    }
    if (rec.stamps.size() >= kMaxHops) {
      end_packet(pkt, Fate::DroppedTtl, node);
      return;
    }
    auto& s = sw(node);
    std::optional<std::pair<LinkId, Version>> hit;
    if (s.tcam) {
      const auto ts = timestamp_field(local_now(s), topo_.timeflip.ts_bits, topo_.timeflip.tick);
      if (auto r = s.tcam->find(f.id, ts)) hit.emplace(action_link(r->action), r->config_version);
    } else if (auto it = s.rules.find(f.id); it != s.rules.end()) {
      const auto& fr = it->second;
      const auto& tag = tags_[pkt];
      if (tag && fr.versions.contains(*tag)) hit.emplace(fr.versions.at(*tag), *tag);
      else if (fr.active) hit.emplace(fr.versions.at(*fr.active), *fr.active);
    }
    if (!hit) {
      end_packet(pkt, Fate::DroppedNoRule, node);
      return;
    }
    rec.stamps.push_back(HopStamp{node, hit->second});
    if (!tags_[pkt]) tags_[pkt] = hit->second;
    offer(hit->first, pkt);
  }

  // Output --------------------------------------------------------------

  RunResult finish() {
    trace_.end = std::max(now_, sc_.horizon);
    std::vector<TraceLine> lines;
    for (auto& s : switches_)
      for (auto line : s.log.lines()) {
        line.time = s.clock.true_time_at(line.time);
        lines.push_back(std::move(line));
      }
    lines.insert(lines.end(), rule_lines_.begin(), rule_lines_.end());
    std::stable_sort(lines.begin(), lines.end(), [](const auto& x, const auto& y) { return x.time < y.time; });
    for (auto& l : lines) trace_.log.add(std::move(l));
    RunResult out;
    out.metrics = compute_metrics(sc_, trace_);
    out.trace = std::move(trace_);
    return out;
  }

  const Scenario& sc_;
  const Topology& topo_;
  ClockModel ctrl_clock_;
  OffsetTable offsets_;
  Rng control_rng_;
  Rng latency_rng_;

  std::vector<SwitchState> switches_;
  std::vector<std::size_t> sw_index_;
  std::vector<Bucket> buckets_;
  std::vector<std::int64_t> phase_;

  std::vector<Step> steps_;
  std::size_t outstanding_ = 0;
  std::vector<std::pair<SimTime, std::vector<LocalUpdate>>> timed_;

  std::vector<SentBundle> bundles_;
  std::vector<PendingApply> applies_;
  std::vector<PendingFlip> flips_;
  std::vector<PendingCollapse> collapses_;

  std::vector<std::optional<Version>> tags_;
  std::vector<std::size_t> flow_index_;

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  SimTime now_;
  Trace trace_;
  std::vector<TraceLine> rule_lines_;
};

}  // namespace

RunResult run(const Scenario& scenario, std::uint64_t seed) {
  validate(scenario);
  return Simulation(scenario, seed).run();
}

std::uint64_t check_consistency(const Trace& trace) {
  std::uint64_t violations = 0;
  for (const auto& p : trace.packets) {
    for (std::size_t i = 1; i < p.stamps.size(); ++i) {
      if (p.stamps[i].version != p.stamps[0].version) {
        ++violations;
        break;
      }
    }
  }
  return violations;
}

Duration duplicate_config_duration(const Trace& trace) {
  std::vector<const RuleEvent*> evs;
  for (const auto& e : trace.rule_events) evs.push_back(&e);
  std::stable_sort(evs.begin(), evs.end(), [](const auto* x, const auto* y) { return x->time < y->time; });

  std::map<std::pair<NodeId, FlowId>, std::set<Version>> held;
  std::size_t doubled = 0;
  Duration total;
  SimTime prev;
  bool active = false;
  std::size_t i = 0;
  while (i < evs.size()) {
    const SimTime t = evs[i]->time;
    if (active) total += t - prev;
    for (; i < evs.size() && evs[i]->time == t; ++i) {
      const auto& e = *evs[i];
      auto& vs = held[{e.node, e.flow}];
      const bool was = vs.size() >= 2;
      if (e.kind == RuleEventKind::Install) vs.insert(e.version);
      else if (e.kind == RuleEventKind::Remove) vs.erase(e.version);
      const bool is = vs.size() >= 2;
      if (is && !was) ++doubled;
      if (was && !is) --doubled;
    }
    active = doubled > 0;
    prev = t;
  }
  if (active && trace.end > prev) total += trace.end - prev;
  return total;
}

Duration update_span(const Trace& trace) {
  std::optional<SimTime> lo;
  std::optional<SimTime> hi;
  for (const auto& e : trace.rule_events) {
    if (e.initial || e.dormant) continue;
    if (!lo || e.time < *lo) lo = e.time;
    if (!hi || e.time > *hi) hi = e.time;
  }
  return lo ? *hi - *lo : Duration{};
}

Metrics compute_metrics(const Scenario& scenario, const Trace& trace) {
  Metrics m;
  std::map<FlowId, std::size_t> idx;
  for (const auto& f : scenario.flows) {
    idx[f.id] = m.per_flow.size();
    m.per_flow.push_back(FlowMetrics{f.id, 0, 0, 0});
  }
  for (const auto& p : trace.packets) {
    auto it = idx.find(p.flow);
    if (it == idx.end()) throw Error(Errc::InvariantBreach, "packet of unknown flow");
    auto& fm = m.per_flow[it->second];
    ++fm.sent;
    if (p.fate == Fate::Delivered) ++fm.delivered;
    else ++fm.dropped;
  }
  for (const auto& fm : m.per_flow) {
    m.sent += fm.sent;
    m.delivered += fm.delivered;
    m.dropped += fm.dropped;
  }
  m.consistency_violations = check_consistency(trace);
  m.duplicate_config_duration = duplicate_config_duration(trace);
  m.update_span = update_span(trace);
  return m;
}

}  // namespace ttu::netsim
