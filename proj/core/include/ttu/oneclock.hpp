#pragma once

// Prediction-based scheduling. The client keeps the elapsed time of
// execution (ETE = completion - scheduled start) of past RPCs, predicts the
// next ETE and schedules the RPC at desired_time - predicted_ete so that it
// completes at the desired time.

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "ttu/sched_proto.hpp"
#include "ttu/time.hpp"

namespace ttu::oneclock {

struct EteSample {
  SimTime scheduled_start;
  SimTime actual_start;
  SimTime completion;

  Duration ete() const { return completion - scheduled_start; }
  /// Completion before the scheduled start can only come from a clock fault.
  bool flagged() const { return completion < scheduled_start; }
};

/// Bounded, insertion-ordered sample store; evicts the oldest when full.
class History {
 public:
  static constexpr std::size_t kDefaultCapacity = 1024;

  explicit History(std::size_t capacity = kDefaultCapacity);

  void record(const EteSample& s);

  std::size_t size() const noexcept { return samples_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return samples_.empty(); }
  const EteSample& operator[](std::size_t i) const { return samples_[i]; }
  const std::deque<EteSample>& samples() const noexcept { return samples_; }

  /// Total samples ever recorded, evicted ones included.
  std::uint64_t recorded() const noexcept { return recorded_; }

  /// ETEs of the last `window` unflagged samples, oldest first.
  std::vector<std::int64_t> recent_etes(std::size_t window) const;

 private:
  std::size_t capacity_;
  std::deque<EteSample> samples_;
  std::uint64_t recorded_ = 0;
};

inline void record(History& h, const EteSample& s) { h.record(s); }

struct Naive {};

struct Average {
  std::size_t window = 16;
};

/// Mean after discarding samples further than mad_mult * MAD from the median.
struct FtAverage {
  std::size_t window = 16;
  double mad_mult = 3.0;
};

/// Scalar random walk filter (F = H = 1). Variances are in ns^2.
struct Kalman {
  double q = 1e10;  // (0.1 ms)^2
  double r = 1e12;  // (1 ms)^2
  double estimate = 0.0;
  double variance = 0.0;
  bool initialized = false;
  std::uint64_t consumed = 0;
};

using PredictorKind = std::variant<Naive, Average, FtAverage, Kalman>;

class Predictor {
 public:
  Predictor() : kind_(FtAverage{}) {}
  explicit Predictor(PredictorKind kind);

  /// Predicted ETE for the next RPC. Kalman folds in samples recorded since
  /// its last call. An empty history predicts zero.
  Duration predict(const History& h);

  const PredictorKind& kind() const noexcept { return kind_; }
  std::string name() const;

 private:
  PredictorKind kind_;
};

inline Duration predict(Predictor& p, const History& h) { return p.predict(h); }

double mean(const std::vector<std::int64_t>& xs);
double median(std::vector<std::int64_t> xs);
/// Values kept by the FT-Average trimming rule.
std::vector<std::int64_t> ft_trim(const std::vector<std::int64_t>& xs, double mad_mult);

/// desired - ete_hat, clamped at `now`.
SimTime schedule(SimTime desired, Duration ete_hat, SimTime now = SimTime{});

/// Desired completion time for RPC `index` given the client clock.
using DesiredTimeFn = std::function<SimTime(SimTime now, std::size_t index)>;

DesiredTimeFn fixed_lead(Duration lead);

struct RpcRecord {
  std::size_t index = 0;
  SimTime desired;
  SimTime scheduled;
  SimTime actual_start;
  SimTime completion;
  SimTime reported;
  Duration predicted;
  Duration error;  // completion - desired
};

/// predict -> schedule -> dispatch -> record, n_rpcs times, against an
/// RpcServer built from `server` and `seed`.
std::vector<RpcRecord> closed_loop_run(const ServerModel& server, Predictor predictor,
                                       std::size_t n_rpcs, const DesiredTimeFn& desired,
                                       std::uint64_t seed, std::size_t history_capacity = History::kDefaultCapacity);

struct ErrorSummary {
  double mean_abs_ns = 0.0;
  std::int64_t p99_abs_ns = 0;
  double mean_signed_ns = 0.0;
  std::size_t count = 0;
};

/// Statistics over records with index >= warmup.
ErrorSummary summarize(const std::vector<RpcRecord>& recs, std::size_t warmup);

/// `rpc_index,T_d,T_s,T_s_actual,T_e,error,predictor` with a header row.
void write_rpc_csv(std::ostream& os, const std::vector<RpcRecord>& recs, const std::string& predictor,
                   bool header = true);

}  // namespace ttu::oneclock
