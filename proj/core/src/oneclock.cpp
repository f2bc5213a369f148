#include "ttu/oneclock.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace ttu::oneclock {

History::History(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(Errc::InvalidArgument, "history capacity must be positive");
}

void History::record(const EteSample& s) {
  if (samples_.size() == capacity_) samples_.pop_front();
  samples_.push_back(s);
  ++recorded_;
}

std::vector<std::int64_t> History::recent_etes(std::size_t window) const {
  std::vector<std::int64_t> out;
  for (auto it = samples_.rbegin(); it != samples_.rend() && out.size() < window; ++it)
    if (!it->flagged()) out.push_back(it->ete().count());
  std::reverse(out.begin(), out.end());
  return out;
}

double mean(const std::vector<std::int64_t>& xs) {
  if (xs.empty()) return 0.0;
  long double sum = 0;
  for (auto x : xs) sum += x;
  return static_cast<double>(sum / static_cast<long double>(xs.size()));
}

double median(std::vector<std::int64_t> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n % 2 == 1) return static_cast<double>(xs[n / 2]);
  return (static_cast<double>(xs[n / 2 - 1]) + static_cast<double>(xs[n / 2])) / 2.0;
}

std::vector<std::int64_t> ft_trim(const std::vector<std::int64_t>& xs, double mad_mult) {
  if (xs.empty()) return {};
  const double med = median(xs);
  std::vector<double> dev;
  dev.reserve(xs.size());
  for (auto x : xs) dev.push_back(std::abs(static_cast<double>(x) - med));
  std::vector<double> sorted = dev;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double mad = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  std::vector<std::int64_t> kept;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (dev[i] <= mad_mult * mad) kept.push_back(xs[i]);
  return kept;
}

Predictor::Predictor(PredictorKind kind) : kind_(std::move(kind)) {
  if (const auto* a = std::get_if<Average>(&kind_); a && a->window == 0)
    throw Error(Errc::InvalidArgument, "average window must be >= 1");
  if (const auto* f = std::get_if<FtAverage>(&kind_)) {
    if (f->window == 0) throw Error(Errc::InvalidArgument, "FT-Average window must be >= 1");
    if (!(f->mad_mult > 0.0)) throw Error(Errc::InvalidArgument, "MAD multiplier must be > 0");
  }
  if (const auto* k = std::get_if<Kalman>(&kind_); k && !(k->q > 0.0 && k->r > 0.0))
    throw Error(Errc::InvalidArgument, "Kalman variances must be > 0");
}

std::string Predictor::name() const {
  struct Visitor {
    std::string operator()(const Naive&) const { return "naive"; }
    std::string operator()(const Average&) const { return "average"; }
    std::string operator()(const FtAverage&) const { return "ft_average"; }
    std::string operator()(const Kalman&) const { return "kalman"; }
  };
  return std::visit(Visitor{}, kind_);
}

namespace {

Duration round_ns(double v) { return Duration{std::llround(v)}; }

void kalman_step(Kalman& k, double z) {
  if (!k.initialized) {
    k.estimate = z;
    k.variance = k.r;
    k.initialized = true;
    return;
  }
  const double prior = k.variance + k.q;
  const double gain = prior / (prior + k.r);
  k.estimate += gain * (z - k.estimate);
  k.variance = (1.0 - gain) * prior;
}

}  // namespace

Duration Predictor::predict(const History& h) {
  struct Visitor {
    const History& h;
    Duration operator()(Naive&) const { return Duration{}; }
    Duration operator()(Average& a) const { return round_ns(mean(h.recent_etes(a.window))); }
    Duration operator()(FtAverage& f) const {
      return round_ns(mean(ft_trim(h.recent_etes(f.window), f.mad_mult)));
    }
    Duration operator()(Kalman& k) const {
      // Samples still held in the history that the filter has not seen.
      const std::uint64_t fresh = h.recorded() - k.consumed;
      const std::size_t start = fresh >= h.size() ? 0 : h.size() - static_cast<std::size_t>(fresh);
      for (std::size_t i = start; i < h.size(); ++i)
        if (!h[i].flagged()) kalman_step(k, static_cast<double>(h[i].ete().count()));
      k.consumed = h.recorded();
      return k.initialized ? round_ns(k.estimate) : Duration{};
    }
  };
  return std::visit(Visitor{h}, kind_);
}

SimTime schedule(SimTime desired, Duration ete_hat, SimTime now) {
  const __int128 t = static_cast<__int128>(desired.ns()) - ete_hat.count();
  if (t < static_cast<__int128>(now.ns())) return now;
  return SimTime::checked(t, "schedule");
}

DesiredTimeFn fixed_lead(Duration lead) {
  return [lead](SimTime now, std::size_t) { return now + lead; };
}

std::vector<RpcRecord> closed_loop_run(const ServerModel& server, Predictor predictor,
                                       std::size_t n_rpcs, const DesiredTimeFn& desired,
                                       std::uint64_t seed, std::size_t history_capacity) {
  if (n_rpcs == 0) throw Error(Errc::InvalidArgument, "closed loop needs at least one RPC");
  RpcServer srv(server, seed);
  History history(history_capacity);
  std::vector<RpcRecord> out;
  out.reserve(n_rpcs);
  SimTime now{};
  for (std::size_t i = 0; i < n_rpcs; ++i) {
    RpcRecord rec;
    rec.index = i;
    rec.desired = desired(now, i);
    rec.predicted = predictor.predict(history);
    rec.scheduled = schedule(rec.desired, rec.predicted, now);
    const auto outcome = srv.dispatch(ScheduledRpc{i, Command{"rpc"}, rec.scheduled, true}, now);
    if (!outcome.reply.ok())
      throw Error(Errc::InvariantBreach, "server refused an RPC scheduled in the future");
    rec.actual_start = outcome.actual_start;
    rec.completion = outcome.completion;
    rec.reported = *outcome.reply.execution_time;
    rec.error = rec.completion - rec.desired;
    history.record(EteSample{rec.scheduled, rec.actual_start, rec.reported});
    now = outcome.reply_at;
    out.push_back(rec);
  }
  return out;
}

ErrorSummary summarize(const std::vector<RpcRecord>& recs, std::size_t warmup) {
  ErrorSummary s;
  std::vector<std::int64_t> abs_err;
  long double sum_abs = 0;
  long double sum = 0;
  for (const auto& r : recs) {
    if (r.index < warmup) continue;
    const auto e = r.error.count();
    abs_err.push_back(e < 0 ? -e : e);
    sum_abs += abs_err.back();
    sum += e;
  }
  s.count = abs_err.size();
  if (s.count == 0) return s;
  s.mean_abs_ns = static_cast<double>(sum_abs / s.count);
  s.mean_signed_ns = static_cast<double>(sum / s.count);
  std::sort(abs_err.begin(), abs_err.end());
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(s.count)));
  s.p99_abs_ns = abs_err[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

void write_rpc_csv(std::ostream& os, const std::vector<RpcRecord>& recs, const std::string& predictor,
                   bool header) {
  if (header) os << "rpc_index,T_d,T_s,T_s_actual,T_e,error,predictor\n";
  for (const auto& r : recs) {
    os << r.index << ',' << r.desired.ns() << ',' << r.scheduled.ns() << ',' << r.actual_start.ns() << ','
       << r.completion.ns() << ',' << r.error.count() << ',' << predictor << '\n';
  }
}

}  // namespace ttu::oneclock
