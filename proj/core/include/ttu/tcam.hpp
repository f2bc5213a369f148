#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ttu/time.hpp"

namespace ttu {

enum class Trit : std::uint8_t { Zero, One, DontCare };

/// Word over {0, 1, *} of 1..64 bits. Bit index 0 is the most significant
/// bit, matching the textual form.
class TernaryWord {
 public:
  static constexpr unsigned kMaxWidth = 64;

  /// All don't-care.
  explicit TernaryWord(unsigned width);

  static TernaryWord exact(std::uint64_t value, unsigned width);
  /// The top `prefix_len` bits of `value` are fixed, the rest are '*'.
  static TernaryWord prefix(std::uint64_t value, unsigned prefix_len, unsigned width);
  static TernaryWord parse(std::string_view text);

  unsigned width() const noexcept { return width_; }
  Trit bit(unsigned msb_index) const;
  std::uint64_t care_mask() const noexcept { return care_; }
  std::uint64_t value() const noexcept { return value_; }

  bool matches(std::uint64_t v) const noexcept { return (v & care_) == value_; }
  /// Number of values in [0, 2^width) this word matches.
  std::uint64_t match_count() const noexcept;
  bool overlaps(const TernaryWord& other) const noexcept;

  std::string to_string() const;

  friend bool operator==(const TernaryWord&, const TernaryWord&) = default;

 private:
  TernaryWord(unsigned width, std::uint64_t value, std::uint64_t care);

  unsigned width_;
  std::uint64_t value_;
  std::uint64_t care_;
};

using EntryId = std::uint64_t;
using ActionId = std::uint64_t;

struct TcamEntry {
  EntryId id = 0;
  std::uint32_t priority = 0;
  TernaryWord key_match{1};
  TernaryWord ts_match{1};
  ActionId action = 0;
  std::uint32_t config_version = 0;
};

struct LookupResult {
  ActionId action = 0;
  std::uint32_t config_version = 0;
  EntryId entry = 0;

  friend bool operator==(const LookupResult&, const LookupResult&) = default;
};

/// Deferred replacement of a set of entries by one timeless entry.
struct CleanupRecord {
  SimTime due;
  std::vector<EntryId> remove;
  std::uint32_t priority = 0;
  TernaryWord key_match{1};
  ActionId action = 0;
  std::uint32_t config_version = 0;
};

/// Priority-resolved ternary table over (packet key, timestamp field).
/// Higher priority wins; equal priorities resolve to the earlier entry.
class TcamTable {
 public:
  TcamTable(unsigned key_width, unsigned ts_width, std::size_t capacity);

  unsigned key_width() const noexcept { return key_width_; }
  unsigned ts_width() const noexcept { return ts_width_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return entries_.size(); }

  EntryId add(std::uint32_t priority, TernaryWord key, TernaryWord ts, ActionId action,
              std::uint32_t version);
  void remove(EntryId id);
  const TcamEntry* entry(EntryId id) const;
  std::span<const TcamEntry> entries() const noexcept { return entries_; }

  std::optional<LookupResult> find(std::uint64_t key, std::uint64_t ts) const;
  /// Throws NoMatch on a table miss.
  LookupResult lookup(std::uint64_t key, std::uint64_t ts) const;

  void schedule_cleanup(CleanupRecord rec);
  std::span<const CleanupRecord> pending_cleanups() const noexcept { return cleanups_; }
  /// Applies every cleanup with due <= now, returns how many ran.
  std::size_t run_cleanups(SimTime now);

  /// One line per entry: `priority key_ternary ts_ternary action version`.
  void dump(std::ostream& os) const;
  std::string dump() const;
  static TcamTable load(std::istream& is, std::size_t capacity);

 private:
  unsigned key_width_;
  unsigned ts_width_;
  std::size_t capacity_;
  EntryId next_id_ = 1;
  std::vector<TcamEntry> entries_;
  std::vector<CleanupRecord> cleanups_;
};

inline LookupResult tcam_lookup(const TcamTable& table, std::uint64_t key, std::uint64_t ts) {
  return table.lookup(key, ts);
}

}  // namespace ttu
