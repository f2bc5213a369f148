#include "ttu/verify.hpp"

#include "ttu/error.hpp"

namespace ttu::verify {

namespace {

void check_bits(unsigned k) {
  if (k == 0 || k > kMaxEnumerableBits)
    throw Error(Errc::InvalidArgument, "enumeration limited to 1..16 bits");
}

// Returns {cost, state} where state is 0 = empty, 1 = full, 2 = mixed.
std::pair<std::size_t, int> walk(const std::vector<bool>& m, std::uint64_t lo, std::uint64_t size) {
  if (size == 1) return m[lo] ? std::pair<std::size_t, int>{1, 1} : std::pair<std::size_t, int>{0, 0};
  const auto [lc, ls] = walk(m, lo, size / 2);
  const auto [rc, rs] = walk(m, lo + size / 2, size / 2);
  if (ls == 1 && rs == 1) return {1, 1};
  if (ls == 0 && rs == 0) return {0, 0};
  return {lc + rc, 2};
}

}  // namespace

std::vector<bool> matched_set(std::span<const TernaryWord> words, unsigned k) {
  check_bits(k);
  const std::uint64_t n = std::uint64_t{1} << k;
  std::vector<bool> out(n, false);
  for (const auto& w : words) {
    if (w.width() != k) throw Error(Errc::WidthMismatch, "word width differs from k");
    for (std::uint64_t v = 0; v < n; ++v)
      if (w.matches(v)) out[v] = true;
  }
  return out;
}

bool pairwise_disjoint(std::span<const TernaryWord> words, unsigned k) {
  check_bits(k);
  const std::uint64_t n = std::uint64_t{1} << k;
  std::vector<int> hits(n, 0);
  for (const auto& w : words)
    for (std::uint64_t v = 0; v < n; ++v)
      if (w.matches(v) && ++hits[v] > 1) return false;
  return true;
}

std::size_t min_prefix_cover(const std::vector<bool>& members, unsigned k) {
  check_bits(k);
  if (members.size() != (std::size_t{1} << k)) throw Error(Errc::InvalidArgument, "set size must be 2^k");
  return walk(members, 0, members.size()).first;
}

std::vector<bool> interval_set(std::uint64_t lo, std::uint64_t hi, unsigned k) {
  check_bits(k);
  std::vector<bool> out(std::size_t{1} << k, false);
  for (std::uint64_t v = lo; v < hi && v < out.size(); ++v) out[v] = true;
  return out;
}

}  // namespace ttu::verify
