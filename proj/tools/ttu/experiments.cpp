#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "csv.hpp"
#include "ttu/error.hpp"
#include "ttu/json_io.hpp"
#include "ttu/netsim/json.hpp"
#include "ttu/netsim/sim.hpp"
#include "ttu/timebase.hpp"
#include "ttu/timeflip.hpp"
#include "ttu/verify.hpp"

namespace ttu::cli {

using nlohmann::json;
using json_io::ObjectReader;

namespace {

constexpr unsigned kMaxWorkers = 256;
constexpr const char* kExperimentNames[] = {"swap", "consistent", "timeflip", "oneclock", "rptp"};

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

template <typename T>
void require_unique(const std::vector<T>& xs, const std::string& where) {
  if (xs.empty()) config_error(where + " must not be empty");
  std::set<T> seen(xs.begin(), xs.end());
  if (seen.size() != xs.size()) config_error(where + " lists an entry twice");
}

void check_seeds(const SeedList& s) { require_unique(s, "seeds"); }

SeedList sorted(SeedList s) {
  std::sort(s.begin(), s.end());
  return s;
}

void check_workers(unsigned w) {
  if (w == 0 || w > kMaxWorkers) config_error("workers must be in [1, " + std::to_string(kMaxWorkers) + "]");
}

bool known(std::string_view name, std::initializer_list<const char*> names) {
  return std::any_of(names.begin(), names.end(), [&](const char* n) { return name == n; });
}

void validate(const SwapConfig& c) {
  check_seeds(c.seeds);
  check_workers(c.workers);
  if (!c.scenario) require_unique(c.strategies, "strategies");
}

void validate(const ConsistentConfig& c) {
  check_seeds(c.seeds);
  check_workers(c.workers);
  if (!c.scenario) require_unique(c.strategies, "strategies");
}

void validate(const TimeflipConfig& c) {
  if (c.k_min < 1 || c.k_max > verify::kMaxEnumerableBits || c.k_min > c.k_max)
    config_error("need 1 <= k_min <= k_max <= " + std::to_string(verify::kMaxEnumerableBits));
  require_unique(c.modes, "modes");
  for (const auto& m : c.modes)
    if (!known(m, {"geq", "window", "choose"})) config_error("unknown timeflip mode '" + m + "'");
  if (c.tick.count() <= 0) config_error("tick_ns must be positive");
}

void validate(const OneclockConfig& c) {
  check_seeds(c.seeds);
  check_workers(c.workers);
  require_unique(c.predictors, "predictors");
  for (const auto& p : c.predictors)
    if (!known(p, {"naive", "average", "ft_average", "kalman"})) config_error("unknown predictor '" + p + "'");
  if (c.n_rpcs <= c.warmup) config_error("n_rpcs must exceed warmup");
  if (c.history_capacity == 0) config_error("history_capacity must be positive");
  if (c.lead.count() < 0) config_error("lead_ns must be non-negative");
  if (c.average.window == 0 || c.ft_average.window == 0) config_error("predictor windows must be positive");
  if (!(c.ft_average.mad_mult > 0.0)) config_error("ft_average.mad_mult must be positive");
  if (!(c.kalman.q >= 0.0) || !(c.kalman.r > 0.0)) config_error("kalman needs q >= 0 and r > 0");
  if (!(c.server.report_fault_prob >= 0.0 && c.server.report_fault_prob <= 1.0))
    config_error("server.report_fault_prob must be in [0, 1]");
  if (c.rpc_log && c.seeds.size() != 1) config_error("rpc_log needs exactly one seed");
}

void validate(const RptpConfig& c) {
  check_seeds(c.seeds);
  if (c.max_abs_offset.count() < 0 || c.delay.count() < 0 || c.reorder_tolerance.count() < 0)
    config_error("offsets, delays and tolerances must be non-negative");
  if ((c.delay + c.asymmetry).count() < 0) config_error("delay + asymmetry must be non-negative");
  if (!(c.switch_jitter_std_ns >= 0.0) || !(c.controller_jitter_std_ns >= 0.0))
    config_error("jitter must be non-negative");
}

void validate(const RunConfig& c) {
  std::visit([](const auto& x) { validate(x); }, c);
}

// ---- JSON -----------------------------------------------------------------

/// A contiguous ascending list echoes as {start, count}, anything else as a list.
json seeds_json(const SeedList& s) {
  bool contiguous = !s.empty();
  for (std::size_t i = 1; i < s.size() && contiguous; ++i) contiguous = s[i] == s[0] + i;
  if (contiguous) return {{"start", s.front()}, {"count", s.size()}};
  return s;
}

void read_seeds(ObjectReader& r, SeedList& s) {
  if (!r.has("seeds")) return;
  const json& j = r.raw("seeds");
  const std::string where = r.where() + ".seeds";
  if (j.is_array()) {
    json_io::read_value(j, s, where);
    return;
  }
  std::uint64_t start = 0;
  std::uint64_t count = 0;
  ObjectReader sr(j, where);
  sr.require("start", start).require("count", count);
  sr.finish();
  s = seed_range(start, count);
}

void read_workers(ObjectReader& r, unsigned& w) {
  std::uint32_t v = w;
  r.get("workers", v);
  w = v;
}

json strategies_json(const std::vector<netsim::StrategyKind>& ks) {
  json a = json::array();
  for (auto k : ks) a.push_back(std::string(netsim::to_string(k)));
  return a;
}

void read_strategies(ObjectReader& r, std::vector<netsim::StrategyKind>& out) {
  if (!r.has("strategies")) return;
  std::vector<std::string> names;
  r.get("strategies", names);
  out.clear();
  for (const auto& n : names) out.push_back(netsim::parse_strategy_kind(n));
}

json server_json(const ServerModel& m) {
  return {{"start_jitter", json_io::to_json(m.start_jitter)},
          {"run_time", json_io::to_json(m.run_time)},
          {"report_fault_prob", m.report_fault_prob},
          {"report_fault_offset_ns", m.report_fault_offset.count()}};
}

void read_server(const json& j, ServerModel& m, const std::string& where) {
  ObjectReader r(j, where);
  r.get("start_jitter", m.start_jitter)
      .get("run_time", m.run_time)
      .get("report_fault_prob", m.report_fault_prob)
      .get("report_fault_offset_ns", m.report_fault_offset);
  r.finish();
}

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

template <typename Config>
json with_out(json j, const Config& c) {
  j["out"] = optional_string(c.out);
  return j;
}

json to_json_impl(const SwapConfig& c) {
  json j = {{"experiment", "swap"}, {"seeds", seeds_json(c.seeds)}, {"workers", c.workers},
            {"trace_file", optional_string(c.trace_file)}};
  if (c.scenario) {
    j["scenario"] = netsim::to_json(*c.scenario);
  } else {
    j["strategies"] = strategies_json(c.strategies);
    j["params"] = netsim::to_json(c.params);
  }
  return j;
}

json to_json_impl(const ConsistentConfig& c) {
  json j = {{"experiment", "consistent"}, {"seeds", seeds_json(c.seeds)}, {"workers", c.workers},
            {"reverse_phases", c.reverse_phases}, {"trace_file", optional_string(c.trace_file)}};
  if (c.scenario) {
    j["scenario"] = netsim::to_json(*c.scenario);
  } else {
    j["strategies"] = strategies_json(c.strategies);
    j["params"] = netsim::to_json(c.params);
  }
  return j;
}

json to_json_impl(const TimeflipConfig& c) {
  return {{"experiment", "timeflip"}, {"seed", c.seed},       {"k_min", c.k_min},
          {"k_max", c.k_max},         {"samples_per_k", c.samples_per_k},
          {"modes", c.modes},         {"tick_ns", c.tick.count()}};
}

json to_json_impl(const OneclockConfig& c) {
  return {{"experiment", "oneclock"},
          {"seeds", seeds_json(c.seeds)},
          {"workers", c.workers},
          {"predictors", c.predictors},
          {"server", server_json(c.server)},
          {"n_rpcs", c.n_rpcs},
          {"warmup", c.warmup},
          {"lead_ns", c.lead.count()},
          {"history_capacity", c.history_capacity},
          {"average", {{"window", c.average.window}}},
          {"ft_average", {{"window", c.ft_average.window}, {"mad_mult", c.ft_average.mad_mult}}},
          {"kalman", {{"q", c.kalman.q}, {"r", c.kalman.r}}},
          {"rpc_log", optional_string(c.rpc_log)}};
}

json to_json_impl(const RptpConfig& c) {
  return {{"experiment", "rptp"},
          {"seeds", seeds_json(c.seeds)},
          {"max_abs_offset_ns", c.max_abs_offset.count()},
          {"delay_ns", c.delay.count()},
          {"asymmetry_ns", c.asymmetry.count()},
          {"switch_jitter_std_ns", c.switch_jitter_std_ns},
          {"controller_jitter_std_ns", c.controller_jitter_std_ns},
          {"skew_ppm", c.skew_ppm},
          {"reorder_tolerance_ns", c.reorder_tolerance.count()},
          {"at_ns", c.at.ns()}};
}

template <typename Config, typename Params>
void read_network(ObjectReader& r, Config& c, Params (*params_from_json)(const json&, const std::string&)) {
  read_seeds(r, c.seeds);
  read_workers(r, c.workers);
  r.get("trace_file", c.trace_file);
  if (r.has("scenario")) {
    if (r.has("strategies") || r.has("params")) config_error("scenario excludes strategies and params");
    c.scenario = netsim::scenario_from_json(r.raw("scenario"));
    return;
  }
  read_strategies(r, c.strategies);
  if (r.has("params")) c.params = params_from_json(r.raw("params"), "params");
}

void read_into(ObjectReader& r, SwapConfig& c) { read_network(r, c, &netsim::flow_swap_params_from_json); }

void read_into(ObjectReader& r, ConsistentConfig& c) {
  read_network(r, c, &netsim::multiphase_params_from_json);
  r.get("reverse_phases", c.reverse_phases);
}

void read_into(ObjectReader& r, TimeflipConfig& c) {
  std::uint32_t k_min = c.k_min;
  std::uint32_t k_max = c.k_max;
  r.get("seed", c.seed)
      .get("k_min", k_min)
      .get("k_max", k_max)
      .get("samples_per_k", c.samples_per_k)
      .get("modes", c.modes)
      .get("tick_ns", c.tick);
  c.k_min = k_min;
  c.k_max = k_max;
}

void read_into(ObjectReader& r, OneclockConfig& c) {
  read_seeds(r, c.seeds);
  read_workers(r, c.workers);
  r.get("predictors", c.predictors)
      .get("n_rpcs", c.n_rpcs)
      .get("warmup", c.warmup)
      .get("lead_ns", c.lead)
      .get("history_capacity", c.history_capacity)
      .get("rpc_log", c.rpc_log);
  if (r.has("server")) read_server(r.raw("server"), c.server, "server");
  if (r.has("average")) {
    ObjectReader ar(r.raw("average"), "average");
    ar.get("window", c.average.window);
    ar.finish();
  }
  if (r.has("ft_average")) {
    ObjectReader fr(r.raw("ft_average"), "ft_average");
    fr.get("window", c.ft_average.window).get("mad_mult", c.ft_average.mad_mult);
    fr.finish();
  }
  if (r.has("kalman")) {
    ObjectReader kr(r.raw("kalman"), "kalman");
    kr.get("q", c.kalman.q).get("r", c.kalman.r);
    kr.finish();
  }
}

void read_into(ObjectReader& r, RptpConfig& c) {
  read_seeds(r, c.seeds);
  r.get("max_abs_offset_ns", c.max_abs_offset)
      .get("delay_ns", c.delay)
      .get("asymmetry_ns", c.asymmetry)
      .get("switch_jitter_std_ns", c.switch_jitter_std_ns)
      .get("controller_jitter_std_ns", c.controller_jitter_std_ns)
      .get("skew_ppm", c.skew_ppm)
      .get("reorder_tolerance_ns", c.reorder_tolerance)
      .get("at_ns", c.at);
}

// ---- running ----------------------------------------------------------------

/// Runs jobs[i] for every i on up to `workers` threads; results keep job order.
template <typename Job, typename Fn>
auto parallel_map(const std::vector<Job>& jobs, unsigned workers, Fn fn) {
  using Result = decltype(fn(jobs.front()));
  std::vector<Result> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        out[i] = fn(jobs[i]);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const unsigned n = std::min<std::size_t>(std::max(workers, 1u), jobs.size());
  std::vector<std::thread> threads;
  for (unsigned i = 1; i < n; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::string num(std::uint64_t v) { return std::to_string(v); }
std::string num(std::int64_t v) { return std::to_string(v); }

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) config_error("cannot open '" + path + "' for writing");
  os << text;
  if (!os) config_error("cannot write '" + path + "'");
}

struct NetJob {
  std::uint64_t seed = 0;
  std::string strategy;
  const netsim::Scenario* scenario = nullptr;
};

struct NetOutcome {
  netsim::Metrics metrics;
  std::string trace;
};

std::string strategy_name(const netsim::UpdateStrategy& s) { return netsim::to_json(s).at("kind").get<std::string>(); }

/// One scenario per strategy, seeds x scenarios sorted by (seed, strategy).
template <typename Config, typename Build>
std::vector<netsim::Scenario> build_scenarios(const Config& c, Build build) {
  std::vector<netsim::Scenario> out;
  if (c.scenario) {
    out.push_back(*c.scenario);
  } else {
    auto kinds = c.strategies;
    std::sort(kinds.begin(), kinds.end(),
              [](auto a, auto b) { return netsim::to_string(a) < netsim::to_string(b); });
    for (auto k : kinds) out.push_back(build(k));
  }
  return out;
}

std::vector<NetOutcome> run_network(const std::vector<netsim::Scenario>& scenarios, const SeedList& seeds,
                                    unsigned workers, bool keep_trace, std::vector<NetJob>& jobs) {
  for (auto seed : sorted(seeds))
    for (const auto& s : scenarios) jobs.push_back(NetJob{seed, strategy_name(s.strategy), &s});
  return parallel_map(jobs, workers, [keep_trace](const NetJob& job) {
    auto result = netsim::run(*job.scenario, job.seed);
    NetOutcome o{std::move(result.metrics), {}};
    if (keep_trace) o.trace = result.trace.log.str();
    return o;
  });
}

std::string traces_text(const std::vector<NetJob>& jobs, const std::vector<NetOutcome>& outcomes) {
  std::string text;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    text += "# seed=" + num(jobs[i].seed) + " strategy=" + jobs[i].strategy + "\n";
    text += outcomes[i].trace;
  }
  return text;
}

std::string run_impl(const SwapConfig& c) {
  const auto scenarios =
      build_scenarios(c, [&](netsim::StrategyKind k) { return netsim::make_flow_swap_scenario(c.params, k); });
  std::vector<NetJob> jobs;
  const auto outcomes = run_network(scenarios, c.seeds, c.workers, c.trace_file.has_value(), jobs);
  const std::string bound = c.scenario ? std::string{} : num(netsim::flow_swap_drop_bound(c.params));
  std::string out = csv_row({"seed", "strategy", "sent", "drops", "update_span_ns", "drop_bound"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& m = outcomes[i].metrics;
    out += csv_row({num(jobs[i].seed), jobs[i].strategy, num(m.sent), num(m.dropped), num(m.update_span.count()),
                    bound});
  }
  if (c.trace_file) write_file(*c.trace_file, traces_text(jobs, outcomes));
  return out;
}

std::string run_impl(const ConsistentConfig& c) {
  auto scenarios =
      build_scenarios(c, [&](netsim::StrategyKind k) { return netsim::make_multiphase_scenario(c.params, k); });
  if (c.reverse_phases)
    for (auto& s : scenarios) std::reverse(s.plan.phases.begin(), s.plan.phases.end());
  std::vector<NetJob> jobs;
  const auto outcomes = run_network(scenarios, c.seeds, c.workers, c.trace_file.has_value(), jobs);
  std::string out = csv_row({"seed", "strategy", "violations", "duplicate_config_duration_ns", "update_span_ns"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& m = outcomes[i].metrics;
    out += csv_row({num(jobs[i].seed), jobs[i].strategy, num(m.consistency_violations),
                    num(m.duplicate_config_duration.count()), num(m.update_span.count())});
  }
  if (c.trace_file) write_file(*c.trace_file, traces_text(jobs, outcomes));
  return out;
}


bool covers_exactly(const std::vector<TernaryWord>& words, const std::vector<bool>& expected, unsigned k) {
  return verify::matched_set(words, k) == expected && verify::pairwise_disjoint(words, k);
}

std::string timeflip_row(const char* mode, unsigned k, std::uint64_t a, std::uint64_t b, std::size_t count,
                         std::size_t optimal, bool match) {
  return csv_row({mode, num(std::uint64_t{k}), num(a), num(b), num(std::uint64_t{count}),
                  num(std::uint64_t{optimal}), match ? "1" : "0"});
}

std::string timeflip_geq(unsigned k) {
  std::string out;
  const std::uint64_t size = std::uint64_t{1} << k;
  for (std::uint64_t t0 = 0; t0 < size; ++t0) {
    const auto words = encode_geq(t0, k);
    const auto expected = verify::interval_set(t0, size, k);
    const auto optimal = verify::min_prefix_cover(expected, k);
    out += timeflip_row("geq", k, t0, size, words.size(), optimal,
                        covers_exactly(words, expected, k) && words.size() == optimal);
  }
  return out;
}

std::string timeflip_window(unsigned k, std::uint64_t seed, std::uint64_t samples) {
  std::string out;
  const std::uint64_t size = std::uint64_t{1} << k;
  Rng rng = make_rng(seed, 0x7700 + k);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto a = std::uniform_int_distribution<std::uint64_t>(0, size - 1)(rng);
    const auto b = std::uniform_int_distribution<std::uint64_t>(a + 1, size)(rng);
    const auto words = encode_window(a, b, k);
    const auto expected = verify::interval_set(a, b, k);
    const auto optimal = verify::min_prefix_cover(expected, k);
    out += timeflip_row("window", k, a, b, words.size(), optimal,
                        covers_exactly(words, expected, k) && words.size() == optimal);
  }
  return out;
}

/// Tolerances span up to two field wraps; the optimum is the cheapest of the
/// tick-aligned candidates, each costed by an independent trie cover.
std::string timeflip_choose(unsigned k, std::uint64_t seed, std::uint64_t samples, Duration tick) {
  std::string out;
  const std::uint64_t size = std::uint64_t{1} << k;
  std::vector<std::size_t> cost(size);
  for (std::uint64_t v = 0; v < size; ++v) cost[v] = verify::min_prefix_cover(verify::interval_set(v, size, k), k);
  const auto t = static_cast<std::uint64_t>(tick.count());
  Rng rng = make_rng(seed, 0x7800 + k);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto t_min = std::uniform_int_distribution<std::uint64_t>(0, 4 * size * t)(rng);
    const auto width = std::uniform_int_distribution<std::uint64_t>(t, 2 * size * t)(rng);
    const ScheduleTolerance tol{SimTime{t_min}, SimTime{t_min + width}};
    const auto choice = choose_update_time(tol, k, tick, range_kind::Geq{});

    const std::uint64_t first = (t_min + t - 1) / t;
    const std::uint64_t last = (t_min + width) / t;
    std::size_t best = SIZE_MAX;
    std::uint64_t best_tick = 0;
    for (std::uint64_t c = first; c <= last && c < first + size; ++c)
      if (cost[c % size] < best) {
        best = cost[c % size];
        best_tick = c;
      }
    const bool match = choice.t0 == SimTime{best_tick * t} && choice.field_value == best_tick % size &&
                       choice.words.size() == best &&
                       covers_exactly(choice.words, verify::interval_set(best_tick % size, size, k), k);
    out += timeflip_row("choose", k, t_min, t_min + width, choice.words.size(), best, match);
  }
  return out;
}

std::string run_impl(const TimeflipConfig& c) {
  std::string out = csv_row({"mode", "k", "a", "b", "entry_count", "optimal_entry_count", "match"});
  for (const char* mode : {"geq", "window", "choose"}) {
    if (std::find(c.modes.begin(), c.modes.end(), mode) == c.modes.end()) continue;
    for (unsigned k = c.k_min; k <= c.k_max; ++k) {
      if (std::string_view(mode) == "geq") out += timeflip_geq(k);
      if (std::string_view(mode) == "window") out += timeflip_window(k, c.seed, c.samples_per_k);
      if (std::string_view(mode) == "choose") out += timeflip_choose(k, c.seed, c.samples_per_k, c.tick);
    }
  }
  return out;
}

oneclock::Predictor make_predictor(const std::string& name, const OneclockConfig& c) {
  if (name == "naive") return oneclock::Predictor(oneclock::Naive{});
  if (name == "average") return oneclock::Predictor(c.average);
  if (name == "ft_average") return oneclock::Predictor(c.ft_average);
  return oneclock::Predictor(c.kalman);
}

struct OneclockJob {
  std::uint64_t seed = 0;
  std::string predictor;
};

struct OneclockOutcome {
  oneclock::ErrorSummary summary;
  std::string log;
};

std::string run_impl(const OneclockConfig& c) {
  auto names = c.predictors;
  std::sort(names.begin(), names.end());
  std::vector<OneclockJob> jobs;
  for (auto seed : sorted(c.seeds))
    for (const auto& n : names) jobs.push_back({seed, n});
  const bool keep_log = c.rpc_log.has_value();
  const auto outcomes = parallel_map(jobs, c.workers, [&](const OneclockJob& job) {
    const auto recs = oneclock::closed_loop_run(c.server, make_predictor(job.predictor, c), c.n_rpcs,
                                                oneclock::fixed_lead(c.lead), job.seed, c.history_capacity);
    OneclockOutcome o{oneclock::summarize(recs, c.warmup), {}};
    if (keep_log) {
      std::ostringstream os;
      oneclock::write_rpc_csv(os, recs, job.predictor, false);
      o.log = os.str();
    }
    return o;
  });
  std::string out = csv_row({"seed", "predictor", "mean_abs_error_ns", "p99_error_ns", "mean_signed_error_ns"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& s = outcomes[i].summary;
    out += csv_row({num(jobs[i].seed), jobs[i].predictor, fixed3(s.mean_abs_ns), num(s.p99_abs_ns),
                    fixed3(s.mean_signed_ns)});
  }
  if (c.rpc_log) {
    std::ostringstream os;
    oneclock::write_rpc_csv(os, {}, "", true);
    for (const auto& o : outcomes) os << o.log;
    write_file(*c.rpc_log, os.str());
  }
  return out;
}

std::string run_impl(const RptpConfig& c) {
  constexpr SwitchId kSwitch = 1;
  std::string out = csv_row({"seed", "true_offset_ns", "estimated_offset_ns", "abs_error_ns", "error_bound_ns"});
  for (auto seed : sorted(c.seeds)) {
    Rng rng = make_rng(seed, 0x5100);
    const auto m = c.max_abs_offset.count();
    const Duration offset{std::uniform_int_distribution<std::int64_t>(-m, m)(rng)};
    ClockModel sw(ClockModel::Params{offset, c.skew_ppm, c.switch_jitter_std_ns, make_rng(seed, 0x5101)()});
    ClockModel ctl(ClockModel::Params{Duration{}, 0.0, c.controller_jitter_std_ns, make_rng(seed, 0x5102)()});
    OffsetTable table(c.reorder_tolerance);
    table.register_switch(kSwitch);
    const auto ex = rptp_exchange(kSwitch, sw, ctl, PathDelays{c.delay, c.delay + c.asymmetry}, c.at);
    const auto rec = table.update(ex);
    const auto err = rec.estimated_offset - offset;
    out += csv_row({num(seed), num(offset.count()), num(rec.estimated_offset.count()),
                    num(err.count() < 0 ? -err.count() : err.count()), num(rec.error_bound.count())});
  }
  return out;
}

}  // namespace

std::string_view to_string(Experiment e) noexcept { return kExperimentNames[static_cast<int>(e)]; }

Experiment parse_experiment(std::string_view s) {
  for (int i = 0; i < 5; ++i)
    if (s == kExperimentNames[i]) return static_cast<Experiment>(i);
  config_error("unknown experiment '" + std::string(s) + "'");
}

SeedList seed_range(std::uint64_t start, std::uint64_t count) {
  if (count == 0) config_error("seed count must be positive");
  if (start > UINT64_MAX - (count - 1)) config_error("seed range overflows");
  SeedList out(count);
  for (std::uint64_t i = 0; i < count; ++i) out[i] = start + i;
  return out;
}

SeedList parse_seed_range(std::string_view text) {
  const auto colon = text.find(':');
  auto parse = [&](std::string_view part) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || end != part.data() + part.size())
      config_error("seed range must be start:count, got '" + std::string(text) + "'");
    return v;
  };
  if (colon == std::string_view::npos) config_error("seed range must be start:count, got '" + std::string(text) + "'");
  return seed_range(parse(text.substr(0, colon)), parse(text.substr(colon + 1)));
}

Experiment experiment_of(const RunConfig& c) noexcept { return static_cast<Experiment>(c.index()); }

RunConfig default_config(Experiment e) {
  switch (e) {
    case Experiment::Swap: return SwapConfig{};
    case Experiment::Consistent: return ConsistentConfig{};
    case Experiment::Timeflip: return TimeflipConfig{};
    case Experiment::Oneclock: return OneclockConfig{};
    case Experiment::Rptp: return RptpConfig{};
  }
  config_error("unknown experiment");
}

RunConfig parse_config(Experiment e, const json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  RunConfig c = default_config(e);
  ObjectReader r(j, "config");
  if (r.has("experiment")) {
    std::string name;
    r.get("experiment", name);
    if (parse_experiment(name) != e)
      config_error("config is for '" + name + "', not '" + std::string(to_string(e)) + "'");
  }
  std::visit(
      [&](auto& x) {
        read_into(r, x);
        r.get("out", x.out);
      },
      c);
  r.finish();
  validate(c);
  return c;
}

json to_json(const RunConfig& c) {
  return std::visit([](const auto& x) { return with_out(to_json_impl(x), x); }, c);
}

void set_seeds(RunConfig& c, SeedList seeds) {
  check_seeds(seeds);
  if (auto* t = std::get_if<TimeflipConfig>(&c)) {
    if (seeds.size() != 1) config_error("timeflip takes a single seed");
    t->seed = seeds.front();
  } else {
    std::visit(
        [&](auto& x) {
          if constexpr (requires { x.seeds; }) x.seeds = std::move(seeds);
        },
        c);
  }
  validate(c);
}

const std::optional<std::string>& output_path(const RunConfig& c) {
  return std::visit([](const auto& x) -> const std::optional<std::string>& { return x.out; }, c);
}

void set_output_path(RunConfig& c, std::string path) {
  std::visit([&](auto& x) { x.out = std::move(path); }, c);
}

std::string run(const RunConfig& c) {
  validate(c);
  return std::visit([](const auto& x) { return run_impl(x); }, c);
}

}  // namespace ttu::cli
