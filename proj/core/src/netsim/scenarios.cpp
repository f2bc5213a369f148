#include "ttu/netsim/scenarios.hpp"

#include "ttu/error.hpp"

namespace ttu::netsim {

std::string_view to_string(StrategyKind k) noexcept {
  switch (k) {
    case StrategyKind::None: return "none";
    case StrategyKind::UntimedSequential: return "untimed_sequential";
    case StrategyKind::TimedSimultaneous: return "timed_simultaneous";
    case StrategyKind::TimedMultiPhase: return "timed_multiphase";
    case StrategyKind::TwoPhaseTagged: return "two_phase_tagged";
  }
  return "?";
}

StrategyKind parse_strategy_kind(std::string_view s) {
  for (auto k : {StrategyKind::None, StrategyKind::UntimedSequential, StrategyKind::TimedSimultaneous,
                 StrategyKind::TimedMultiPhase, StrategyKind::TwoPhaseTagged})
    if (to_string(k) == s) return k;
  throw Error(Errc::ConfigError, "unknown strategy '" + std::string(s) + "'");
}

namespace {

struct Builder {
  Topology t;

  NodeId host(std::string name) {
    t.nodes.push_back(Node{std::move(name), NodeKind::Host, {}});
    return static_cast<NodeId>(t.nodes.size() - 1);
  }
  NodeId sw(std::string name, const CommonParams& c) {
    SwitchSpec spec;
    spec.install_latency = c.install_latency;
    t.nodes.push_back(Node{std::move(name), NodeKind::Switch, spec});
    return static_cast<NodeId>(t.nodes.size() - 1);
  }
  LinkId link(NodeId a, NodeId b, std::uint64_t cap, Duration d) {
    t.links.push_back(Link{a, b, cap, d});
    return static_cast<LinkId>(t.links.size() - 1);
  }
};

ControllerSpec controller_of(const CommonParams& c) {
  ControllerSpec spec;
  spec.control_delay = c.control_delay;
  spec.clock_error_bound = c.clock_error_bound;
  spec.max_switch_offset = c.max_switch_offset;
  spec.sync_base_delay = c.sync_base_delay;
  return spec;
}

LocalUpdate upd(NodeId node, FlowId flow, RuleOp op, Version v, std::optional<LinkId> link = std::nullopt) {
  return LocalUpdate{node, flow, op, v, link};
}

void check_feasible(const Scenario& s) {
  std::vector<std::vector<LinkId>> before;
  std::vector<std::vector<LinkId>> after;
  for (const auto& f : s.flows) {
    before.push_back(f.path_before);
    after.push_back(f.path_after);
  }
  for (const auto* paths : {&before, &after}) {
    const auto load = offered_load(s.topology, s.flows, *paths);
    for (LinkId l = 0; l < load.size(); ++l)
      if (load[l] > s.topology.links[l].capacity_pps)
        throw Error(Errc::ConfigError, "flow rates exceed the capacity of link " + std::to_string(l));
  }
}

}  // namespace

Scenario make_flow_swap_scenario(const FlowSwapParams& p, StrategyKind kind) {
  if (p.capacity_pps == 0 || p.rate_pps == 0 || p.core_capacity_factor == 0)
    throw Error(Errc::ConfigError, "rates and capacities must be positive");
  const auto& c = p.common;
  Builder b;
  const NodeId h1 = b.host("H1");
  const NodeId h2 = b.host("H2");
  const NodeId d = b.host("D");
  const NodeId s1 = b.sw("S1", c);
  const NodeId s2 = b.sw("S2", c);
  const NodeId x = b.sw("X", c);
  const NodeId y = b.sw("Y", c);
  const std::uint64_t core = p.capacity_pps * p.core_capacity_factor;
  const LinkId h1s1 = b.link(h1, s1, core, c.link_delay);
  const LinkId h2s2 = b.link(h2, s2, core, c.link_delay);
  const LinkId s1x = b.link(s1, x, core, c.link_delay);
  const LinkId s1y = b.link(s1, y, core, c.link_delay);
  const LinkId s2x = b.link(s2, x, core, c.link_delay);
  const LinkId s2y = b.link(s2, y, core, c.link_delay);
  const LinkId la = b.link(x, d, p.capacity_pps, c.link_delay);
  const LinkId lb = b.link(y, d, p.capacity_pps, c.link_delay);
  b.t.controller = controller_of(c);
  b.t.mode = p.mode;
  b.t.timeflip = p.timeflip;

  Scenario s;
  s.topology = std::move(b.t);
  s.flows.push_back(Flow{1, "f1", h1, d, p.rate_pps, {h1s1, s1x, la}, {h1s1, s1y, lb}});
  s.flows.push_back(Flow{2, "f2", h2, d, p.rate_pps, {h2s2, s2y, lb}, {h2s2, s2x, la}});
  check_feasible(s);

  s.plan.initial = {upd(s1, 1, RuleOp::Install, 1, s1x), upd(s2, 2, RuleOp::Install, 1, s2y),
                    upd(x, 1, RuleOp::Install, 1, la),   upd(x, 2, RuleOp::Install, 1, la),
                    upd(y, 1, RuleOp::Install, 1, lb),   upd(y, 2, RuleOp::Install, 1, lb)};
  const LocalUpdate u1 = upd(s1, 1, RuleOp::Replace, 2, s1y);
  const LocalUpdate u2 = upd(s2, 2, RuleOp::Replace, 2, s2x);
  s.plan.phases = {{u1, u2}};
  s.plan.untimed = {{u1}, {u2}};
  s.update_start = c.update_start;
  s.horizon = p.horizon;
  s.strategy = flow_swap_strategy(p, kind);
  return s;
}

UpdateStrategy flow_swap_strategy(const FlowSwapParams& p, StrategyKind kind) {
  switch (kind) {
    case StrategyKind::None: return strategy::NoUpdate{};
    case StrategyKind::UntimedSequential: return strategy::UntimedSequential{};
    case StrategyKind::TimedSimultaneous: return strategy::TimedSimultaneous{p.update_at, Duration{}};
    case StrategyKind::TimedMultiPhase: return strategy::TimedMultiPhase{{p.update_at}, Duration{}};
    case StrategyKind::TwoPhaseTagged: return strategy::TwoPhaseTagged{p.safety_wait};
  }
  throw Error(Errc::ConfigError, "unknown strategy");
}

Scenario make_multiphase_scenario(const MultiPhaseParams& p, StrategyKind kind) {
  if (p.detour_switches == 0) throw Error(Errc::ConfigError, "the detour needs at least one switch");
  if (p.rate_pps == 0 || p.capacity_pps == 0) throw Error(Errc::ConfigError, "rates and capacities must be positive");
  const auto& c = p.common;
  const unsigned m = p.detour_switches;
  Builder b;
  const NodeId h1 = b.host("H1");
  const NodeId h2 = b.host("H2");
  const NodeId s1 = b.sw("S1", c);
  const NodeId s2 = b.sw("S2", c);
  std::vector<NodeId> detour;
  for (unsigned i = 0; i < m; ++i) detour.push_back(b.sw("S" + std::to_string(3 + i), c));
  const NodeId e = b.sw("S" + std::to_string(3 + m), c);

  const auto cap = p.capacity_pps;
  const LinkId in = b.link(h1, s1, cap, c.link_delay);
  const LinkId s1s2 = b.link(s1, s2, cap, c.link_delay);
  const LinkId s2e = b.link(s2, e, cap, c.link_delay);
  const LinkId out = b.link(e, h2, cap, c.link_delay);
  std::vector<LinkId> detour_links;
  NodeId prev = s1;
  for (NodeId dn : detour) {
    detour_links.push_back(b.link(prev, dn, cap, c.link_delay));
    prev = dn;
  }
  detour_links.push_back(b.link(prev, e, cap, c.link_delay));
  b.t.controller = controller_of(c);
  b.t.mode = ExecutionMode::Software;

  Scenario s;
  s.topology = std::move(b.t);
  std::vector<LinkId> after{in};
  after.insert(after.end(), detour_links.begin(), detour_links.end());
  after.push_back(out);
  s.flows.push_back(Flow{1, "f1", h1, h2, p.rate_pps, {in, s1s2, s2e, out}, after});
  check_feasible(s);

  s.plan.initial = {upd(s1, 1, RuleOp::Install, 1, s1s2), upd(s2, 1, RuleOp::Install, 1, s2e),
                    upd(e, 1, RuleOp::Install, 1, out)};
  // Egress first, then the detour back to front, then the ingress flip.
  s.plan.phases.push_back({upd(e, 1, RuleOp::Install, 2, out)});
  for (unsigned i = m; i-- > 0;) s.plan.phases.push_back({upd(detour[i], 1, RuleOp::Install, 2, detour_links[i + 1])});
  s.plan.phases.push_back({upd(s1, 1, RuleOp::Install, 2, detour_links[0]), upd(s1, 1, RuleOp::Activate, 2)});
  s.plan.cleanup = {upd(s1, 1, RuleOp::Remove, 1), upd(s2, 1, RuleOp::Remove, 1), upd(e, 1, RuleOp::Remove, 1)};

  // Untimed rollout in path order, each switch replaced outright.
  s.plan.untimed.push_back({upd(s1, 1, RuleOp::Replace, 2, detour_links[0])});
  for (unsigned i = 0; i < m; ++i) s.plan.untimed.push_back({upd(detour[i], 1, RuleOp::Replace, 2, detour_links[i + 1])});
  s.plan.untimed.push_back({upd(e, 1, RuleOp::Replace, 2, out)});
  s.plan.untimed.push_back({upd(s2, 1, RuleOp::Remove, 1)});

  s.update_start = c.update_start;
  s.horizon = p.horizon;
  s.strategy = multiphase_strategy(p, kind);
  return s;
}

std::vector<SimTime> multiphase_phase_times(const MultiPhaseParams& p) {
  std::vector<SimTime> out;
  for (unsigned i = 0; i < p.detour_switches + 2; ++i) out.push_back(p.first_phase_at + p.phase_gap * i);
  return out;
}

UpdateStrategy multiphase_strategy(const MultiPhaseParams& p, StrategyKind kind) {
  switch (kind) {
    case StrategyKind::None: return strategy::NoUpdate{};
    case StrategyKind::UntimedSequential: return strategy::UntimedSequential{};
    case StrategyKind::TimedSimultaneous: return strategy::TimedSimultaneous{p.first_phase_at, p.cleanup_gap};
    case StrategyKind::TimedMultiPhase: return strategy::TimedMultiPhase{multiphase_phase_times(p), p.cleanup_gap};
    case StrategyKind::TwoPhaseTagged: return strategy::TwoPhaseTagged{p.safety_wait};
  }
  throw Error(Errc::ConfigError, "unknown strategy");
}

std::uint64_t flow_swap_drop_bound(const FlowSwapParams& p) {
  const auto window = static_cast<__int128>(p.common.clock_error_bound.count()) * 2;
  return static_cast<std::uint64_t>(window * p.rate_pps / 1'000'000'000);
}

}  // namespace ttu::netsim
