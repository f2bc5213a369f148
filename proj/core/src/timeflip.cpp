#include "ttu/timeflip.hpp"

#include <algorithm>
#include <bit>

#include "ttu/error.hpp"

namespace ttu {

namespace {

void check_bits(unsigned k) {
  if (k == 0 || k > kMaxTimestampBits)
    throw Error(Errc::InvalidArgument, "timestamp width must be in [1, 63]");
}

std::uint64_t field_size(unsigned k) { return std::uint64_t{1} << k; }

// Largest aligned block that starts at `lo` and fits in [lo, hi).
std::uint64_t block_at(std::uint64_t lo, std::uint64_t hi, unsigned k) {
  std::uint64_t size = lo == 0 ? field_size(k) : (lo & (~lo + 1));
  while (size > hi - lo) size >>= 1;
  return size;
}

unsigned cover_size(std::uint64_t lo, std::uint64_t hi, unsigned k) {
  unsigned n = 0;
  while (lo < hi) {
    lo += block_at(lo, hi, k);
    ++n;
  }
  return n;
}

unsigned cyclic_cost(std::uint64_t start, std::uint64_t length, unsigned k) {
  const std::uint64_t n = field_size(k);
  if (start + length <= n) return cover_size(start, start + length, k);
  return cover_size(start, n, k) + cover_size(0, start + length - n, k);
}

// Value in [lo, hi] with the fewest set bits; the largest such value on ties.
std::uint64_t min_popcount_largest(std::uint64_t lo, std::uint64_t hi) {
  if (lo == hi) return lo;
  const unsigned i = 63u - static_cast<unsigned>(std::countl_zero(lo ^ hi));
  const std::uint64_t below = (std::uint64_t{1} << i) - 1;
  if ((lo & below) == 0) return lo;
  const std::uint64_t common = hi & ~((below << 1) | 1);
  return common | (std::uint64_t{1} << i);
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return a / b + (a % b != 0); }

}  // namespace

std::vector<TernaryWord> prefix_cover(std::uint64_t lo, std::uint64_t hi, unsigned k) {
  check_bits(k);
  if (hi > field_size(k)) throw Error(Errc::RangeOutOfField, "range end beyond the field");
  if (lo > hi) throw Error(Errc::EmptyRange, "inverted range");
  std::vector<TernaryWord> words;
  while (lo < hi) {
    const std::uint64_t size = block_at(lo, hi, k);
    const auto free_bits = static_cast<unsigned>(std::countr_zero(size));
    words.push_back(TernaryWord::prefix(lo, k - free_bits, k));
    lo += size;
  }
  return words;
}

std::vector<TernaryWord> encode_geq(std::uint64_t t0, unsigned k) {
  check_bits(k);
  if (t0 >= field_size(k))
    throw Error(Errc::RangeOutOfField, "T0=" + std::to_string(t0) + " needs more than " +
                                           std::to_string(k) + " bits");
  return prefix_cover(t0, field_size(k), k);
}

std::vector<TernaryWord> encode_window(std::uint64_t t0, std::uint64_t t1, unsigned k) {
  check_bits(k);
  if (t0 >= t1) throw Error(Errc::EmptyRange, "window [" + std::to_string(t0) + ", " + std::to_string(t1) + ")");
  if (t1 > field_size(k)) throw Error(Errc::RangeOutOfField, "window end beyond the field");
  return prefix_cover(t0, t1, k);
}

std::vector<TernaryWord> encode_cyclic(std::uint64_t start, std::uint64_t length, unsigned k) {
  check_bits(k);
  const std::uint64_t n = field_size(k);
  if (start >= n) throw Error(Errc::RangeOutOfField, "cyclic start beyond the field");
  if (length == 0 || length >= n) throw Error(Errc::PeriodTooShort, "cyclic length must be in (0, 2^k)");
  if (start + length <= n) return prefix_cover(start, start + length, k);
  auto words = prefix_cover(start, n, k);
  auto tail = prefix_cover(0, start + length - n, k);
  words.insert(words.end(), tail.begin(), tail.end());
  return words;
}

unsigned geq_cost(std::uint64_t t0, unsigned k) {
  check_bits(k);
  if (t0 >= field_size(k)) throw Error(Errc::RangeOutOfField, "T0 beyond the field");
  return static_cast<unsigned>(std::popcount(field_size(k) - t0));
}

std::uint64_t timestamp_field(SimTime t, unsigned k, Duration tick) {
  check_bits(k);
  if (tick.count() <= 0) throw Error(Errc::InvalidArgument, "tick must be positive");
  return (t.ns() / static_cast<std::uint64_t>(tick.count())) & (field_size(k) - 1);
}

std::vector<TernaryWord> encode(const TimeRange& r, unsigned k) {
  struct Visitor {
    unsigned k;
    std::vector<TernaryWord> operator()(const range::Geq& g) const { return encode_geq(g.t0, k); }
    std::vector<TernaryWord> operator()(const range::Window& w) const {
      return encode_window(w.t0, w.t1, k);
    }
    std::vector<TernaryWord> operator()(const range::Periodic& p) const {
      check_bits(k);
      if (p.active_length == 0 || p.active_length > field_size(k))
        throw Error(Errc::PeriodTooShort, "periodic active length must be in (0, 2^k]");
      if (p.active_length == field_size(k)) return {TernaryWord(k)};
      return encode_cyclic(p.start & (field_size(k) - 1), p.active_length, k);
    }
  };
  return std::visit(Visitor{k}, r);
}

namespace {

// Number of ticks covered by [t0, t0 + hold) and validation shared by the
// periodic encoder and the scheduler.
std::uint64_t periodic_ticks(SimTime t0, Duration hold, unsigned k, Duration tick) {
  check_bits(k);
  if (tick.count() <= 0) throw Error(Errc::InvalidArgument, "tick must be positive");
  if (hold.count() <= 0) throw Error(Errc::PeriodTooShort, "hold must be positive");
  const auto limit = static_cast<unsigned __int128>(field_size(k - 1)) * static_cast<std::uint64_t>(tick.count());
  if (static_cast<unsigned __int128>(hold.count()) > limit)
    throw Error(Errc::PeriodTooShort, "hold exceeds half of the timestamp period");
  const auto tk = static_cast<std::uint64_t>(tick.count());
  const std::uint64_t first = t0.ns() / tk;
  const std::uint64_t last = ceil_div((t0 + hold).ns(), tk);
  const std::uint64_t len = last - first;
  if (len >= field_size(k)) throw Error(Errc::PeriodTooShort, "range wraps onto itself");
  return len;
}

}  // namespace

PeriodicCover encode_periodic(SimTime t0, Duration hold, unsigned k, Duration tick) {
  const std::uint64_t len = periodic_ticks(t0, hold, k, tick);
  return PeriodicCover{encode_cyclic(timestamp_field(t0, k, tick), len, k), t0 + hold};
}

UpdateTimeChoice choose_update_time(ScheduleTolerance tol, unsigned k, Duration tick,
                                    const RangeKind& kind) {
  check_bits(k);
  if (tick.count() <= 0) throw Error(Errc::InvalidArgument, "tick must be positive");
  if (tol.t_max < tol.t_min) throw Error(Errc::NoCandidate, "empty tolerance window");
  const auto tk = static_cast<std::uint64_t>(tick.count());
  const std::uint64_t c_lo = ceil_div(tol.t_min.ns(), tk);
  const std::uint64_t c_hi = tol.t_max.ns() / tk;
  if (c_lo > c_hi) throw Error(Errc::NoCandidate, "no tick-aligned time in the tolerance window");

  const std::uint64_t n = field_size(k);
  const std::uint64_t mask = n - 1;
  const std::uint64_t a = c_lo & mask;

  auto finish = [&](std::uint64_t c, std::vector<TernaryWord> words) {
    UpdateTimeChoice out;
    out.t0 = SimTime::checked(static_cast<__int128>(c) * tk, "update time");
    out.field_value = c & mask;
    out.words = std::move(words);
    return out;
  };

  if (std::holds_alternative<range_kind::Geq>(kind)) {
    // Cost of T0 = v is popcount(2^k - v). Within the first residue run
    // [a, b] the earliest minimum is the largest w = 2^k - v of minimal
    // popcount; the run always reaches cost 1 when it hits the field end,
    // so later runs never improve on it.
    const std::uint64_t run = std::min(c_hi - c_lo, n - 1 - a);
    const std::uint64_t b = a + run;
    const std::uint64_t w = min_popcount_largest(n - b, n - a);
    const std::uint64_t v = n - w;
    return finish(c_lo + (v - a), encode_geq(v, k));
  }

  std::uint64_t length = 0;
  bool cyclic = false;
  if (const auto* win = std::get_if<range_kind::Window>(&kind)) {
    if (win->length == 0 || win->length > n) throw Error(Errc::EmptyRange, "window length must be in [1, 2^k]");
    length = win->length;
  } else {
    const auto& per = std::get<range_kind::Periodic>(kind);
    length = periodic_ticks(SimTime{0}, per.hold, k, tick);
    cyclic = true;
  }

  const std::uint64_t candidates = std::min(c_hi - c_lo + 1, n);
  std::optional<std::uint64_t> best_c;
  unsigned best_cost = 0;
  for (std::uint64_t j = 0; j < candidates; ++j) {
    const std::uint64_t v = (a + j) & mask;
    unsigned cost = 0;
    if (cyclic) {
      cost = cyclic_cost(v, length, k);
    } else {
      if (v + length > n) continue;
      cost = cover_size(v, v + length, k);
    }
    if (!best_c || cost < best_cost) {
      best_c = c_lo + j;
      best_cost = cost;
      if (cost == 1) break;
    }
  }
  if (!best_c) throw Error(Errc::NoCandidate, "no window start fits in the field");
  const std::uint64_t v = *best_c & mask;
  return finish(*best_c, cyclic ? encode_cyclic(v, length, k) : encode_window(v, v + length, k));
}

FlipRecord install_timeflip(TcamTable& table, EntryId old_entry, ActionId new_action, SimTime t0,
                            Duration tick, const FlipOptions& opts) {
  const TcamEntry* old = table.entry(old_entry);
  if (old == nullptr) throw Error(Errc::UnknownEntry, "entry " + std::to_string(old_entry));
  const unsigned k = table.ts_width();
  if (k > kMaxTimestampBits) throw Error(Errc::InvalidArgument, "timestamp field too wide");

  std::vector<TernaryWord> words;
  SimTime collapse_at;
  if (opts.periodic_hold) {
    auto cover = encode_periodic(t0, *opts.periodic_hold, k, tick);
    words = std::move(cover.words);
    collapse_at = cover.valid_until;
  } else {
    const std::uint64_t v = timestamp_field(t0, k, tick);
    words = encode_geq(v, k);
    const auto tk = static_cast<std::uint64_t>(tick.count());
    const std::uint64_t c0 = t0.ns() / tk;
    const SimTime wrap = SimTime::checked(static_cast<__int128>(c0 - v + field_size(k)) * tk, "field wrap");
    const Duration grace = opts.grace.value_or(tick * static_cast<std::int64_t>(field_size(k)));
    collapse_at = std::min(t0 + grace, wrap);
  }

  if (table.size() + words.size() > table.capacity())
    throw Error(Errc::TableFull, "TimeFlip needs " + std::to_string(words.size()) + " entries");

  // Copy out before mutating: `old` points into the entry vector.
  const std::uint32_t priority = old->priority;
  const TernaryWord key = old->key_match;
  const std::uint32_t version = old->config_version + 1;

  FlipRecord rec;
  rec.config_version = version;
  rec.collapse_at = collapse_at;
  for (const auto& w : words) rec.entries.push_back(table.add(priority + 1, key, w, new_action, version));

  CleanupRecord cleanup;
  cleanup.due = collapse_at;
  cleanup.remove = rec.entries;
  cleanup.remove.push_back(old_entry);
  cleanup.priority = priority;
  cleanup.key_match = key;
  cleanup.action = new_action;
  cleanup.config_version = version;
  table.schedule_cleanup(std::move(cleanup));
  return rec;
}

}  // namespace ttu
