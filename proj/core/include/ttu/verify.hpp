#pragma once

// Brute-force reference checks for the TimeFlip encoders. Everything here
// works on explicit value sets of size 2^k, so keep k small (<= 16).

#include <cstdint>
#include <span>
#include <vector>

#include "ttu/tcam.hpp"

namespace ttu::verify {

inline constexpr unsigned kMaxEnumerableBits = 16;

/// Membership vector of the union of `words` over all 2^k values.
std::vector<bool> matched_set(std::span<const TernaryWord> words, unsigned k);

/// True when no value is matched by two words.
bool pairwise_disjoint(std::span<const TernaryWord> words, unsigned k);

/// Fewest disjoint prefixes whose union is exactly `members`, found by
/// recursion over the binary trie (a node costs 1 when fully inside the
/// set, 0 when disjoint, otherwise the sum of its children).
std::size_t min_prefix_cover(const std::vector<bool>& members, unsigned k);

/// Membership vector of [lo, hi).
std::vector<bool> interval_set(std::uint64_t lo, std::uint64_t hi, unsigned k);

}  // namespace ttu::verify
