#include "ttu/netsim/json.hpp"

#include "ttu/json_io.hpp"

namespace ttu::netsim {

using json_io::fail;
using json_io::json;
using json_io::ObjectReader;

namespace {

json path_json(const Topology& t, const std::vector<LinkId>& path) {
  json out = json::array();
  if (path.empty()) return out;
  out.push_back(t.nodes[t.links[path.front()].from].name);
  for (LinkId l : path) out.push_back(t.nodes[t.links[l].to].name);
  return out;
}

std::vector<LinkId> path_from(const Topology& t, const json& j, const std::string& where) {
  std::vector<std::string> names;
  json_io::read_value(j, names, where);
  if (names.size() < 2) fail(where, "a path needs at least two nodes");
  std::vector<LinkId> out;
  for (std::size_t i = 1; i < names.size(); ++i) out.push_back(t.link(names[i - 1], names[i]));
  return out;
}

json update_json(const Topology& t, const LocalUpdate& u) {
  json j{{"node", t.nodes[u.node].name}, {"flow", u.flow}, {"op", std::string(to_string(u.op))}, {"version", u.version}};
  if (u.out_link) j["next_hop"] = t.nodes[t.links[*u.out_link].to].name;
  return j;
}

LocalUpdate update_from(const Topology& t, const json& j, const std::string& where) {
  ObjectReader r(j, where);
  std::string node;
  std::string op;
  std::optional<std::string> next_hop;
  LocalUpdate u;
  r.require("node", node).require("flow", u.flow).require("op", op).require("version", u.version).get("next_hop", next_hop);
  r.finish();
  u.node = t.node(node);
  if (op == "install") u.op = RuleOp::Install;
  else if (op == "activate") u.op = RuleOp::Activate;
  else if (op == "remove") u.op = RuleOp::Remove;
  else if (op == "replace") u.op = RuleOp::Replace;
  else fail(where, "unknown op '" + op + "'");
  if (next_hop) u.out_link = t.link(node, *next_hop);
  return u;
}

json updates_json(const Topology& t, const std::vector<LocalUpdate>& us) {
  json out = json::array();
  for (const auto& u : us) out.push_back(update_json(t, u));
  return out;
}

std::vector<LocalUpdate> updates_from(const Topology& t, const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of updates");
  std::vector<LocalUpdate> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(update_from(t, j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json steps_json(const Topology& t, const std::vector<std::vector<LocalUpdate>>& steps) {
  json out = json::array();
  for (const auto& s : steps) out.push_back(updates_json(t, s));
  return out;
}

std::vector<std::vector<LocalUpdate>> steps_from(const Topology& t, const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of update lists");
  std::vector<std::vector<LocalUpdate>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(updates_from(t, j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json common_json(const CommonParams& c) {
  return {{"link_delay_ns", c.link_delay.count()},
          {"control_delay", json_io::to_json(c.control_delay)},
          {"install_latency", json_io::to_json(c.install_latency)},
          {"clock_error_bound_ns", c.clock_error_bound.count()},
          {"max_switch_offset_ns", c.max_switch_offset.count()},
          {"sync_base_delay_ns", c.sync_base_delay.count()},
          {"update_start_ns", c.update_start.ns()}};
}

void read_common(ObjectReader& r, CommonParams& c) {
  r.get("link_delay_ns", c.link_delay)
      .get("control_delay", c.control_delay)
      .get("install_latency", c.install_latency)
      .get("clock_error_bound_ns", c.clock_error_bound)
      .get("max_switch_offset_ns", c.max_switch_offset)
      .get("sync_base_delay_ns", c.sync_base_delay)
      .get("update_start_ns", c.update_start);
}

json timeflip_json(const TimeFlipParams& p) {
  return {{"ts_bits", p.ts_bits}, {"tick_ns", p.tick.count()}, {"hold_ns", p.hold.count()}};
}

TimeFlipParams timeflip_from(const json& j, const std::string& where) {
  TimeFlipParams p;
  ObjectReader r(j, where);
  std::uint32_t bits = p.ts_bits;
  r.get("ts_bits", bits).get("tick_ns", p.tick).get("hold_ns", p.hold);
  r.finish();
  p.ts_bits = bits;
  return p;
}

}  // namespace

json to_json(const UpdateStrategy& s) {
  struct Visitor {
    json operator()(const strategy::NoUpdate&) const { return {{"kind", "none"}}; }
    json operator()(const strategy::UntimedSequential&) const { return {{"kind", "untimed_sequential"}}; }
    json operator()(const strategy::TimedSimultaneous& t) const {
      return {{"kind", "timed_simultaneous"}, {"at_ns", t.at.ns()}, {"cleanup_delay_ns", t.cleanup_delay.count()}};
    }
    json operator()(const strategy::TimedMultiPhase& t) const {
      json times = json::array();
      for (auto x : t.phase_times) times.push_back(x.ns());
      return {{"kind", "timed_multiphase"}, {"phase_times_ns", times}, {"cleanup_delay_ns", t.cleanup_delay.count()}};
    }
    json operator()(const strategy::TwoPhaseTagged& t) const {
      return {{"kind", "two_phase_tagged"}, {"safety_wait_ns", t.safety_wait.count()}};
    }
  };
  return std::visit(Visitor{}, s);
}

UpdateStrategy strategy_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  std::string kind;
  r.require("kind", kind);
  UpdateStrategy out;
  switch (parse_strategy_kind(kind)) {
    case StrategyKind::None: out = strategy::NoUpdate{}; break;
    case StrategyKind::UntimedSequential: out = strategy::UntimedSequential{}; break;
    case StrategyKind::TimedSimultaneous: {
      strategy::TimedSimultaneous t;
      r.require("at_ns", t.at).get("cleanup_delay_ns", t.cleanup_delay);
      out = t;
      break;
    }
    case StrategyKind::TimedMultiPhase: {
      strategy::TimedMultiPhase t;
      r.require("phase_times_ns", t.phase_times).get("cleanup_delay_ns", t.cleanup_delay);
      out = t;
      break;
    }
    case StrategyKind::TwoPhaseTagged: {
      strategy::TwoPhaseTagged t;
      r.require("safety_wait_ns", t.safety_wait);
      out = t;
      break;
    }
  }
  r.finish();
  return out;
}

json to_json(const Scenario& s) {
  const auto& t = s.topology;
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    json jn{{"name", n.name}, {"kind", std::string(to_string(n.kind))}};
    if (n.kind == NodeKind::Switch) {
      jn["clock"] = json_io::to_json(n.sw.clock);
      jn["table_capacity"] = n.sw.table_capacity;
      jn["install_latency"] = json_io::to_json(n.sw.install_latency);
    }
    nodes.push_back(jn);
  }
  json links = json::array();
  for (const auto& l : t.links)
    links.push_back({{"from", t.nodes[l.from].name},
                     {"to", t.nodes[l.to].name},
                     {"capacity_pps", l.capacity_pps},
                     {"propagation_ns", l.propagation.count()}});
  const auto& c = t.controller;
  json controller{{"clock", json_io::to_json(c.clock)},
                  {"control_delay", json_io::to_json(c.control_delay)},
                  {"sync_base_delay_ns", c.sync_base_delay.count()},
                  {"clock_error_bound_ns", c.clock_error_bound.count()},
                  {"max_switch_offset_ns", c.max_switch_offset.count()}};
  json flows = json::array();
  for (const auto& f : s.flows)
    flows.push_back({{"id", f.id},
                     {"name", f.name},
                     {"rate_pps", f.rate_pps},
                     {"path_before", path_json(t, f.path_before)},
                     {"path_after", path_json(t, f.path_after)}});
  json plan{{"initial", updates_json(t, s.plan.initial)},
            {"phases", steps_json(t, s.plan.phases)},
            {"cleanup", updates_json(t, s.plan.cleanup)},
            {"untimed", steps_json(t, s.plan.untimed)}};
  return {{"nodes", nodes},
          {"links", links},
          {"controller", controller},
          {"mode", std::string(to_string(t.mode))},
          {"timeflip", timeflip_json(t.timeflip)},
          {"flows", flows},
          {"plan", plan},
          {"strategy", to_json(s.strategy)},
          {"update_start_ns", s.update_start.ns()},
          {"horizon_ns", s.horizon.ns()}};
}

Scenario scenario_from_json(const json& j) {
  Scenario s;
  auto& t = s.topology;
  ObjectReader r(j, "scenario");

  const json& nodes = r.raw("nodes");
  if (!nodes.is_array()) fail("scenario.nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "scenario.nodes[" + std::to_string(i) + "]";
    ObjectReader nr(nodes[i], where);
    Node n;
    std::string kind;
    nr.require("name", n.name).require("kind", kind);
    if (kind == "host") {
      n.kind = NodeKind::Host;
    } else if (kind == "switch") {
      n.kind = NodeKind::Switch;
      std::uint64_t cap = n.sw.table_capacity;
      nr.get("clock", n.sw.clock).get("table_capacity", cap).get("install_latency", n.sw.install_latency);
      n.sw.table_capacity = cap;
    } else {
      fail(where, "kind must be host or switch");
    }
    nr.finish();
    t.nodes.push_back(std::move(n));
  }

  const json& links = r.raw("links");
  if (!links.is_array()) fail("scenario.links", "expected an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string where = "scenario.links[" + std::to_string(i) + "]";
    ObjectReader lr(links[i], where);
    std::string from;
    std::string to;
    Link l;
    lr.require("from", from).require("to", to).require("capacity_pps", l.capacity_pps).get("propagation_ns", l.propagation);
    lr.finish();
    l.from = t.node(from);
    l.to = t.node(to);
    t.links.push_back(l);
  }

  if (r.has("controller")) {
    ObjectReader cr(r.raw("controller"), "scenario.controller");
    auto& c = t.controller;
    cr.get("clock", c.clock)
        .get("control_delay", c.control_delay)
        .get("sync_base_delay_ns", c.sync_base_delay)
        .get("clock_error_bound_ns", c.clock_error_bound)
        .get("max_switch_offset_ns", c.max_switch_offset);
    cr.finish();
  }
  std::string mode(to_string(t.mode));
  r.get("mode", mode);
  t.mode = parse_execution_mode(mode);
  if (r.has("timeflip")) t.timeflip = timeflip_from(r.raw("timeflip"), "scenario.timeflip");

  const json& flows = r.raw("flows");
  if (!flows.is_array()) fail("scenario.flows", "expected an array");
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const std::string where = "scenario.flows[" + std::to_string(i) + "]";
    ObjectReader fr(flows[i], where);
    Flow f;
    fr.require("id", f.id).require("rate_pps", f.rate_pps).get("name", f.name);
    if (f.name.empty()) f.name = "f" + std::to_string(f.id);
    f.path_before = path_from(t, fr.raw("path_before"), where + ".path_before");
    f.path_after = path_from(t, fr.raw("path_after"), where + ".path_after");
    fr.finish();
    f.ingress = t.links[f.path_before.front()].from;
    f.egress = t.links[f.path_before.back()].to;
    s.flows.push_back(std::move(f));
  }

  if (r.has("plan")) {
    ObjectReader pr(r.raw("plan"), "scenario.plan");
    if (pr.has("initial")) s.plan.initial = updates_from(t, pr.raw("initial"), "scenario.plan.initial");
    if (pr.has("phases")) s.plan.phases = steps_from(t, pr.raw("phases"), "scenario.plan.phases");
    if (pr.has("cleanup")) s.plan.cleanup = updates_from(t, pr.raw("cleanup"), "scenario.plan.cleanup");
    if (pr.has("untimed")) s.plan.untimed = steps_from(t, pr.raw("untimed"), "scenario.plan.untimed");
    pr.finish();
  }
  if (r.has("strategy")) s.strategy = strategy_from_json(r.raw("strategy"), "scenario.strategy");
  r.get("update_start_ns", s.update_start).get("horizon_ns", s.horizon);
  r.finish();
  validate(s);
  return s;
}

json to_json(const FlowSwapParams& p) {
  return {{"common", common_json(p.common)},
          {"capacity_pps", p.capacity_pps},
          {"rate_pps", p.rate_pps},
          {"core_capacity_factor", p.core_capacity_factor},
          {"mode", std::string(to_string(p.mode))},
          {"timeflip", timeflip_json(p.timeflip)},
          {"update_at_ns", p.update_at.ns()},
          {"safety_wait_ns", p.safety_wait.count()},
          {"horizon_ns", p.horizon.ns()}};
}

FlowSwapParams flow_swap_params_from_json(const json& j, const std::string& where) {
  FlowSwapParams p;
  ObjectReader r(j, where);
  if (r.has("common")) {
    ObjectReader cr(r.raw("common"), where + ".common");
    read_common(cr, p.common);
    cr.finish();
  }
  std::string mode(to_string(p.mode));
  r.get("capacity_pps", p.capacity_pps)
      .get("rate_pps", p.rate_pps)
      .get("core_capacity_factor", p.core_capacity_factor)
      .get("mode", mode)
      .get("update_at_ns", p.update_at)
      .get("safety_wait_ns", p.safety_wait)
      .get("horizon_ns", p.horizon);
  if (r.has("timeflip")) p.timeflip = timeflip_from(r.raw("timeflip"), where + ".timeflip");
  r.finish();
  p.mode = parse_execution_mode(mode);
  return p;
}

json to_json(const MultiPhaseParams& p) {
  return {{"common", common_json(p.common)},
          {"detour_switches", p.detour_switches},
          {"rate_pps", p.rate_pps},
          {"capacity_pps", p.capacity_pps},
          {"first_phase_at_ns", p.first_phase_at.ns()},
          {"phase_gap_ns", p.phase_gap.count()},
          {"cleanup_gap_ns", p.cleanup_gap.count()},
          {"safety_wait_ns", p.safety_wait.count()},
          {"horizon_ns", p.horizon.ns()}};
}

MultiPhaseParams multiphase_params_from_json(const json& j, const std::string& where) {
  MultiPhaseParams p;
  ObjectReader r(j, where);
  if (r.has("common")) {
    ObjectReader cr(r.raw("common"), where + ".common");
    read_common(cr, p.common);
    cr.finish();
  }
  std::uint32_t detour = p.detour_switches;
  r.get("detour_switches", detour)
      .get("rate_pps", p.rate_pps)
      .get("capacity_pps", p.capacity_pps)
      .get("first_phase_at_ns", p.first_phase_at)
      .get("phase_gap_ns", p.phase_gap)
      .get("cleanup_gap_ns", p.cleanup_gap)
      .get("safety_wait_ns", p.safety_wait)
      .get("horizon_ns", p.horizon);
  r.finish();
  p.detour_switches = detour;
  return p;
}

}  // namespace ttu::netsim
