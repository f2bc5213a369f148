#pragma once

// TimeFlip: scheduled updates expressed as timestamp ranges in a TCAM.
//
// The device stamps every packet at ingress with the low k bits of
// (local clock / tick). A rule that should take effect at T0 is installed
// as higher-priority entries whose timestamp field matches the range that
// starts at T0; the switch-over is then atomic per lookup.
//
// Ranges are expanded with the minimal disjoint prefix cover: every
// contiguous range [lo, hi) splits greedily into the largest aligned
// power-of-two blocks.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ttu/tcam.hpp"
#include "ttu/time.hpp"

namespace ttu {

inline constexpr unsigned kMaxTimestampBits = 63;

/// Minimal prefix cover of [lo, hi) within a k-bit field. Empty when lo == hi.
std::vector<TernaryWord> prefix_cover(std::uint64_t lo, std::uint64_t hi, unsigned k);

/// Cover of {T0, ..., 2^k - 1}. Throws RangeOutOfField when T0 >= 2^k.
std::vector<TernaryWord> encode_geq(std::uint64_t t0, unsigned k);

/// Cover of {T0, ..., T1 - 1}. Throws EmptyRange when T0 >= T1 and
/// RangeOutOfField when T1 > 2^k.
std::vector<TernaryWord> encode_window(std::uint64_t t0, std::uint64_t t1, unsigned k);

/// Cover of the cyclic interval of `length` values starting at `start`,
/// wrapping at 2^k. Requires 0 < length < 2^k.
std::vector<TernaryWord> encode_cyclic(std::uint64_t start, std::uint64_t length, unsigned k);

/// Entry count of encode_geq without building the words: popcount(2^k - T0).
unsigned geq_cost(std::uint64_t t0, unsigned k);

/// Low k bits of (time / tick).
std::uint64_t timestamp_field(SimTime t, unsigned k, Duration tick);

namespace range {
struct Geq {
  std::uint64_t t0;
};
struct Window {
  std::uint64_t t0;
  std::uint64_t t1;
};
struct Periodic {
  std::uint64_t start;
  std::uint64_t active_length;
};
}  // namespace range

using TimeRange = std::variant<range::Geq, range::Window, range::Periodic>;

std::vector<TernaryWord> encode(const TimeRange& r, unsigned k);

struct PeriodicCover {
  std::vector<TernaryWord> words;
  SimTime valid_until;
};

/// Matches local times [T0, T0 + hold) at tick resolution on a wrapping
/// k-bit field. The entries must be gone by `valid_until`.
/// Throws PeriodTooShort when hold is zero or longer than 2^(k-1) ticks.
PeriodicCover encode_periodic(SimTime t0, Duration hold, unsigned k, Duration tick);

struct ScheduleTolerance {
  SimTime t_min;
  SimTime t_max;
};

namespace range_kind {
struct Geq {};
/// Fixed-length window of `length` field values that must not wrap.
struct Window {
  std::uint64_t length;
};
struct Periodic {
  Duration hold;
};
}  // namespace range_kind

using RangeKind = std::variant<range_kind::Geq, range_kind::Window, range_kind::Periodic>;

struct UpdateTimeChoice {
  SimTime t0;
  std::uint64_t field_value = 0;
  std::vector<TernaryWord> words;
};

/// Picks the tick-aligned T0 in [t_min, t_max] whose range needs the fewest
/// TCAM entries, earliest on ties. Geq is solved in O(k); the other kinds
/// scan at most 2^k candidates. Throws NoCandidate when no tick-aligned
/// time (or no feasible window) lies in the tolerance.
UpdateTimeChoice choose_update_time(ScheduleTolerance tol, unsigned k, Duration tick,
                                    const RangeKind& kind);

struct FlipOptions {
  /// Grace before the flip collapses to one timeless entry. Defaults to
  /// 2^k ticks and is always clamped so the collapse happens before the
  /// Geq cover stops matching at the field wrap.
  std::optional<Duration> grace;
  /// When set, the flip uses a periodic range of this length instead of
  /// T >= T0 and collapses at its valid_until.
  std::optional<Duration> periodic_hold;
};

struct FlipRecord {
  std::vector<EntryId> entries;
  std::uint32_t config_version = 0;
  SimTime collapse_at;
};

/// Adds one entry per cover word at old priority + 1, carrying `new_action`
/// and old version + 1, and registers the collapse. `old_entry` is kept until
/// the collapse. Throws UnknownEntry, or TableFull leaving the table intact.
FlipRecord install_timeflip(TcamTable& table, EntryId old_entry, ActionId new_action, SimTime t0,
                            Duration tick, const FlipOptions& opts = {});

}  // namespace ttu
