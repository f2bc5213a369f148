#include "ttu/netsim/model.hpp"

#include <charconv>
#include <set>

#include "ttu/error.hpp"

namespace ttu::netsim {

std::string_view to_string(NodeKind k) noexcept { return k == NodeKind::Host ? "host" : "switch"; }

std::string_view to_string(ExecutionMode m) noexcept {
  return m == ExecutionMode::Software ? "software" : "timeflip";
}

ExecutionMode parse_execution_mode(std::string_view s) {
  if (s == "software") return ExecutionMode::Software;
  if (s == "timeflip") return ExecutionMode::TimeFlip;
  throw Error(Errc::ConfigError, "unknown execution mode '" + std::string(s) + "'");
}

std::string_view to_string(RuleOp op) noexcept {
  switch (op) {
    case RuleOp::Install: return "install";
    case RuleOp::Activate: return "activate";
    case RuleOp::Remove: return "remove";
    case RuleOp::Replace: return "replace";
  }
  return "?";
}

std::optional<NodeId> Topology::find_node(std::string_view name) const {
  for (NodeId i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return i;
  return std::nullopt;
}

NodeId Topology::node(std::string_view name) const {
  if (auto id = find_node(name)) return *id;
  throw Error(Errc::ConfigError, "unknown node '" + std::string(name) + "'");
}

LinkId Topology::link(std::string_view a, std::string_view b) const {
  const NodeId from = node(a);
  const NodeId to = node(b);
  for (LinkId i = 0; i < links.size(); ++i)
    if (links[i].from == from && links[i].to == to) return i;
  throw Error(Errc::ConfigError, "no link " + std::string(a) + "->" + std::string(b));
}

std::vector<NodeId> Topology::switches() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < nodes.size(); ++i)
    if (nodes[i].kind == NodeKind::Switch) out.push_back(i);
  return out;
}

std::string encode_command(const LocalUpdate& u) {
  std::string out(to_string(u.op));
  out += " flow=" + std::to_string(u.flow) + " v=" + std::to_string(u.version);
  if (u.out_link) out += " link=" + std::to_string(*u.out_link);
  return out;
}

namespace {

std::uint32_t field(std::string_view tok, std::string_view key) {
  if (tok.substr(0, key.size()) != key || tok.size() <= key.size() || tok[key.size()] != '=')
    throw Error(Errc::ParseError, "expected " + std::string(key) + "=N, got '" + std::string(tok) + "'");
  tok.remove_prefix(key.size() + 1);
  std::uint32_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw Error(Errc::ParseError, "bad number in '" + std::string(tok) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    const auto start = s.find_first_not_of(' ');
    if (start == std::string_view::npos) break;
    s.remove_prefix(start);
    const auto end = s.find(' ');
    out.push_back(s.substr(0, end));
    s.remove_prefix(end == std::string_view::npos ? s.size() : end);
  }
  return out;
}

}  // namespace

LocalUpdate parse_command(NodeId node, std::string_view text) {
  const auto toks = split(text);
  if (toks.size() < 3) throw Error(Errc::ParseError, "truncated command '" + std::string(text) + "'");
  LocalUpdate u;
  u.node = node;
  if (toks[0] == "install") u.op = RuleOp::Install;
  else if (toks[0] == "activate") u.op = RuleOp::Activate;
  else if (toks[0] == "remove") u.op = RuleOp::Remove;
  else if (toks[0] == "replace") u.op = RuleOp::Replace;
  else throw Error(Errc::ParseError, "unknown rule op '" + std::string(toks[0]) + "'");
  u.flow = field(toks[1], "flow");
  u.version = field(toks[2], "v");
  const bool needs_link = u.op == RuleOp::Install || u.op == RuleOp::Replace;
  if (needs_link != (toks.size() == 4)) throw Error(Errc::ParseError, "bad operand count in '" + std::string(text) + "'");
  if (needs_link) u.out_link = field(toks[3], "link");
  return u;
}

std::string strategy_name(const UpdateStrategy& s) {
  struct Visitor {
    std::string operator()(const strategy::NoUpdate&) const { return "none"; }
    std::string operator()(const strategy::UntimedSequential&) const { return "untimed_sequential"; }
    std::string operator()(const strategy::TimedSimultaneous&) const { return "timed_simultaneous"; }
    std::string operator()(const strategy::TimedMultiPhase&) const { return "timed_multiphase"; }
    std::string operator()(const strategy::TwoPhaseTagged&) const { return "two_phase_tagged"; }
  };
  return std::visit(Visitor{}, s);
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::ConfigError, what); }

void check_path(const Topology& t, const Flow& f, const std::vector<LinkId>& path, const char* which) {
  const std::string ctx = "flow '" + f.name + "' " + which;
  if (path.empty()) bad(ctx + " is empty");
  NodeId at = f.ingress;
  std::set<NodeId> visited{at};
  for (LinkId l : path) {
    if (l >= t.links.size()) bad(ctx + " uses unknown link " + std::to_string(l));
    if (t.links[l].from != at) bad(ctx + " is not contiguous at link " + std::to_string(l));
    at = t.links[l].to;
    if (!visited.insert(at).second) bad(ctx + " revisits node '" + t.nodes[at].name + "'");
    if (at != f.egress && t.nodes[at].kind == NodeKind::Host)
      bad(ctx + " passes through host '" + t.nodes[at].name + "'");
  }
  if (at != f.egress) bad(ctx + " does not end at the egress host");
}

void check_update(const Scenario& s, const LocalUpdate& u, const char* where) {
  const auto& t = s.topology;
  const std::string ctx = std::string(where) + " update";
  if (u.node >= t.nodes.size() || t.nodes[u.node].kind != NodeKind::Switch) bad(ctx + " targets a non-switch");
  bool known_flow = false;
  for (const auto& f : s.flows) known_flow |= f.id == u.flow;
  if (!known_flow) bad(ctx + " names unknown flow " + std::to_string(u.flow));
  const bool needs_link = u.op == RuleOp::Install || u.op == RuleOp::Replace;
  if (needs_link != u.out_link.has_value()) bad(ctx + " has a link operand mismatch");
  if (u.out_link) {
    if (*u.out_link >= t.links.size()) bad(ctx + " uses unknown link");
    if (t.links[*u.out_link].from != u.node) bad(ctx + " forwards on a link that does not leave its switch");
  }
  if (t.mode == ExecutionMode::TimeFlip && std::string_view(where) != "initial" && u.op != RuleOp::Replace)
    bad(ctx + ": TimeFlip execution supports replace operations only");
}

}  // namespace

void validate(const Scenario& s) {
  const auto& t = s.topology;
  if (t.nodes.empty()) bad("topology has no nodes");
  std::set<std::string> names;
  for (const auto& n : t.nodes) {
    if (n.name.empty()) bad("node with empty name");
    if (!names.insert(n.name).second) bad("duplicate node name '" + n.name + "'");
    if (n.kind == NodeKind::Switch && n.sw.table_capacity == 0) bad("switch '" + n.name + "' has no table capacity");
  }
  for (const auto& l : t.links) {
    if (l.from >= t.nodes.size() || l.to >= t.nodes.size()) bad("link references an unknown node");
    if (l.from == l.to) bad("self loop on node '" + t.nodes[l.from].name + "'");
    if (l.capacity_pps == 0) bad("link capacity must be positive");
    if (l.propagation < Duration{}) bad("negative propagation delay");
  }
  {
    // Nodes touched by links must form one weakly connected component.
    std::vector<NodeId> parent(t.nodes.size());
    for (NodeId i = 0; i < parent.size(); ++i) parent[i] = i;
    auto root = [&](NodeId x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& l : t.links) parent[root(l.from)] = root(l.to);
    std::set<NodeId> comps;
    for (const auto& l : t.links) comps.insert(root(l.from));
    if (comps.size() > 1) bad("topology is not connected");
  }
  if (t.mode == ExecutionMode::TimeFlip) {
    const auto& tf = t.timeflip;
    if (tf.ts_bits < 2 || tf.ts_bits > 32) bad("timeflip ts_bits must lie in [2, 32]");
    if (tf.tick <= Duration{}) bad("timeflip tick must be positive");
    if (tf.hold <= Duration{}) bad("timeflip hold must be positive");
  }
  if (t.controller.clock_error_bound < Duration{} || t.controller.max_switch_offset < Duration{} ||
      t.controller.sync_base_delay < t.controller.clock_error_bound)
    bad("controller sync parameters must satisfy 0 <= clock_error_bound <= sync_base_delay");

  std::set<FlowId> ids;
  for (const auto& f : s.flows) {
    if (!ids.insert(f.id).second) bad("duplicate flow id " + std::to_string(f.id));
    if (f.id >= (1u << 16)) bad("flow ids must fit in 16 bits");
    if (f.ingress >= t.nodes.size() || f.egress >= t.nodes.size()) bad("flow references an unknown node");
    if (t.nodes[f.ingress].kind != NodeKind::Host || t.nodes[f.egress].kind != NodeKind::Host)
      bad("flow '" + f.name + "' must run host to host");
    if (f.rate_pps == 0) bad("flow '" + f.name + "' has zero rate");
    check_path(t, f, f.path_before, "path_before");
    check_path(t, f, f.path_after, "path_after");
    if (f.path_before.front() != f.path_after.front()) bad("flow '" + f.name + "' must leave its host on one link");
  }

  for (const auto& u : s.plan.initial) {
    check_update(s, u, "initial");
    if (u.op != RuleOp::Install) bad("initial rules must be installs");
  }
  for (const auto& ph : s.plan.phases)
    for (const auto& u : ph) check_update(s, u, "phase");
  for (const auto& u : s.plan.cleanup) check_update(s, u, "cleanup");
  for (const auto& st : s.plan.untimed)
    for (const auto& u : st) check_update(s, u, "untimed");

  if (s.horizon == SimTime{}) bad("horizon must be positive");
  auto within_horizon = [&](SimTime at, const char* what) {
    if (at > s.horizon) bad(std::string(what) + " lies beyond the horizon");
    if (at < s.update_start) bad(std::string(what) + " precedes update_start");
  };
  if (const auto* m = std::get_if<strategy::TimedMultiPhase>(&s.strategy)) {
    if (m->phase_times.size() != s.plan.phases.size())
      bad("timed multi-phase needs one time per plan phase");
    for (std::size_t i = 1; i < m->phase_times.size(); ++i)
      if (!(m->phase_times[i - 1] < m->phase_times[i])) bad("phase times must be strictly increasing");
    for (auto at : m->phase_times) within_horizon(at, "a phase time");
    if (m->cleanup_delay < Duration{}) bad("cleanup delay must be non-negative");
    if (!m->phase_times.empty() && !s.plan.cleanup.empty())
      within_horizon(m->phase_times.back() + m->cleanup_delay, "the cleanup time");
  }
  if (const auto* m = std::get_if<strategy::TimedSimultaneous>(&s.strategy)) {
    within_horizon(m->at, "the update time");
    if (m->cleanup_delay < Duration{}) bad("cleanup delay must be non-negative");
    if (!s.plan.cleanup.empty()) within_horizon(m->at + m->cleanup_delay, "the cleanup time");
  }
  if (const auto* m = std::get_if<strategy::TwoPhaseTagged>(&s.strategy); m && m->safety_wait < Duration{})
    bad("safety wait must be non-negative");
  if (std::holds_alternative<strategy::TwoPhaseTagged>(s.strategy) && s.plan.phases.empty())
    bad("two-phase rollout needs at least one plan phase");
}

std::vector<std::uint64_t> offered_load(const Topology& topo, const std::vector<Flow>& flows,
                                        const std::vector<std::vector<LinkId>>& paths) {
  if (paths.size() != flows.size()) throw Error(Errc::InvalidArgument, "one path per flow required");
  std::vector<std::uint64_t> load(topo.links.size(), 0);
  for (std::size_t i = 0; i < flows.size(); ++i)
    for (LinkId l : paths[i]) load.at(l) += flows[i].rate_pps;
  return load;
}

}  // namespace ttu::netsim
