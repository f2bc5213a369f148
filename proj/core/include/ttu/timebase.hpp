#pragma once

// Simulated node clocks and controller-side offset tracking.
//
// Switches only timestamp; the controller owns an OffsetTable holding, for
// every switch, the estimated offset of the switch clock relative to the
// controller clock (switch minus controller). An operation the controller
// wants at controller time Tc is sent to switch i as Tc + offset_i.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ttu/random.hpp"
#include "ttu/time.hpp"

namespace ttu {

using SwitchId = std::uint32_t;

/// A free-running clock: reading at true time t yields
/// t + true_offset + skew_ppm * t / 1e6 + N(0, jitter_std), clamped at zero.
class ClockModel {
 public:
  struct Params {
    Duration true_offset;
    double skew_ppm = 0.0;
    double jitter_std_ns = 0.0;
    std::uint64_t rng_seed = 0;
  };

  ClockModel() : ClockModel(Params{}) {}
  explicit ClockModel(Params params);

  /// Reads the clock at `true_time`. Consumes one noise draw when jitter is on.
  SimTime read(SimTime true_time);

  /// Reading without the noise term. Pure.
  SimTime ideal_read(SimTime true_time) const;

  /// Earliest true time at which the noiseless reading reaches `local`.
  SimTime true_time_at(SimTime local) const;

  const Params& params() const noexcept { return params_; }

 private:
  Params params_;
  Rng rng_;
};

SimTime read_clock(ClockModel& clock, SimTime true_time);

/// Two-way timestamps of one switch-initiated exchange.
/// t1/t4 are on the switch clock, t2/t3 on the controller clock.
struct SyncExchange {
  SwitchId switch_id = 0;
  SimTime t1;
  SimTime t2;
  SimTime t3;
  SimTime t4;
};

struct PathDelays {
  Duration switch_to_controller;
  Duration controller_to_switch;
};

/// Runs one exchange starting at `true_time`: the switch reports its time,
/// the controller answers immediately, the switch stamps the answer.
SyncExchange rptp_exchange(SwitchId id, ClockModel& switch_clock, ClockModel& controller_clock,
                           PathDelays delays, SimTime true_time);

struct OffsetRecord {
  SwitchId switch_id = 0;
  Duration estimated_offset;
  SimTime last_update;
  Duration error_bound;

  friend bool operator==(const OffsetRecord&, const OffsetRecord&) = default;
};

/// Two-way estimate ((t1 - t2) + (t4 - t3)) / 2, switch minus controller.
Duration two_way_offset(const SyncExchange& ex);

class OffsetTable {
 public:
  /// `reorder_tolerance` is how far t4 may trail t1 (or t3 trail t2) before
  /// the exchange is treated as malformed.
  explicit OffsetTable(Duration reorder_tolerance = Duration{}) : tolerance_(reorder_tolerance) {}

  void register_switch(SwitchId id);
  bool knows(SwitchId id) const { return records_.contains(id); }

  /// Folds one exchange into the table. Keeps only the latest estimate.
  /// Throws UnknownSwitch, MalformedExchange or StaleExchange and leaves the
  /// table unchanged on failure.
  OffsetRecord update(const SyncExchange& ex);

  /// nullptr when the switch is unknown or has no estimate yet.
  const OffsetRecord* find(SwitchId id) const;
  const OffsetRecord& at(SwitchId id) const;

  /// Controller time -> switch time, Tc + offset.
  SimTime translate(SwitchId id, SimTime controller_time) const;

  std::vector<OffsetRecord> snapshot() const;

 private:
  Duration tolerance_;
  std::map<SwitchId, std::optional<OffsetRecord>> records_;
};

inline OffsetRecord rptp_update(OffsetTable& table, const SyncExchange& ex) {
  return table.update(ex);
}

inline SimTime translate_time(const OffsetTable& table, SwitchId id, SimTime controller_time) {
  return table.translate(id, controller_time);
}

}  // namespace ttu
