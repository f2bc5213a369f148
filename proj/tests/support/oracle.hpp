#pragma once

// Reference models used only by tests. None of these call into the code
// under test beyond plain value types: ternary words are handled as strings,
// covers are recomputed from scratch, the bundle protocol is replayed on a
// table-driven model.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

/// Set of k-bit values as a membership vector.
using Members = std::vector<bool>;

/// Character-by-character match of `word` ("01*", MSB first) against v.
bool string_matches(const std::string& word, std::uint64_t v);

/// Union of matches of every word, plus the number of values hit twice.
struct MatchCount {
  Members members;
  std::uint64_t overlaps = 0;
};
MatchCount enumerate(const std::vector<std::string>& words, unsigned k);

Members interval(std::uint64_t lo, std::uint64_t hi, unsigned k);
/// `length` values starting at `start`, wrapping at 2^k.
Members cyclic(std::uint64_t start, std::uint64_t length, unsigned k);

/// Fewest disjoint prefix words covering exactly `m`, by a bottom-up pass
/// over the complete binary trie stored level by level.
std::size_t min_prefix_cover(const Members& m, unsigned k);

/// Fewest arbitrary ternary words (overlap allowed) whose union is exactly
/// `m`, by breadth-first search over reachable unions. k <= 4 only.
std::size_t min_ternary_cover(const Members& m, unsigned k);

/// Kind of timestamp range to place at a candidate value.
struct RangeShape {
  enum class Kind { Geq, Window, Cyclic } kind = Kind::Geq;
  std::uint64_t length = 0;
};

/// Cost of the best candidate in [c_lo, c_hi] (tick indices), evaluated by
/// min_prefix_cover on every candidate. nullopt when none is feasible.
struct BestChoice {
  std::uint64_t candidate = 0;
  std::size_t cost = 0;
};
std::optional<BestChoice> best_candidate(std::uint64_t c_lo, std::uint64_t c_hi, unsigned k, RangeShape shape);

/// Two-way offset from raw timestamps, switch minus controller.
std::int64_t two_way(std::int64_t t1, std::int64_t t2, std::int64_t t3, std::int64_t t4);

}  // namespace oracle
