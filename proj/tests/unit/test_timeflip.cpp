#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "ttu/timeflip.hpp"
#include "ttu/verify.hpp"

using namespace ttu;

namespace {

std::vector<std::string> strings(const std::vector<TernaryWord>& ws) {
  std::vector<std::string> out;
  for (const auto& w : ws) out.push_back(w.to_string());
  return out;
}

void expect_exact_disjoint(const std::vector<TernaryWord>& ws, const oracle::Members& want, unsigned k) {
  const auto got = oracle::enumerate(strings(ws), k);
  EXPECT_EQ(got.members, want);
  EXPECT_EQ(got.overlaps, 0u);
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(EncodeGeq, Examples) {
  EXPECT_EQ(strings(encode_geq(0, 3)), (std::vector<std::string>{"***"}));
  EXPECT_EQ(strings(encode_geq(4, 3)), (std::vector<std::string>{"1**"}));
  const auto w = encode_geq(3, 3);
  EXPECT_EQ(w.size(), 2u);
  expect_exact_disjoint(w, oracle::interval(3, 8, 3), 3);
  EXPECT_EQ(code_of([] { encode_geq(8, 3); }), Errc::RangeOutOfField);
}

TEST(EncodeGeq, WorstCaseNeedsKWords) {
  for (unsigned k = 1; k <= 16; ++k) {
    EXPECT_EQ(encode_geq(1, k).size(), k);
    EXPECT_EQ(geq_cost(1, k), k);
  }
}

TEST(EncodeGeq, ExhaustiveOracleUpToTenBits) {
  for (unsigned k = 1; k <= 10; ++k) {
    const std::uint64_t n = std::uint64_t{1} << k;
    for (std::uint64_t t0 = 0; t0 < n; ++t0) {
      const auto w = encode_geq(t0, k);
      const auto want = oracle::interval(t0, n, k);
      const auto got = oracle::enumerate(strings(w), k);
      ASSERT_EQ(got.members, want) << k << " " << t0;
      ASSERT_EQ(got.overlaps, 0u);
      ASSERT_LE(w.size(), k);
      ASSERT_EQ(w.size(), oracle::min_prefix_cover(want, k)) << k << " " << t0;
      ASSERT_EQ(geq_cost(t0, k), w.size());
    }
  }
}

TEST(EncodeGeq, NoTernaryCoverIsSmallerUpToFourBits) {
  for (unsigned k = 1; k <= 4; ++k)
    for (std::uint64_t t0 = 0; t0 < (1u << k); ++t0)
      ASSERT_EQ(encode_geq(t0, k).size(), oracle::min_ternary_cover(oracle::interval(t0, 1u << k, k), k))
          << k << " " << t0;
}

TEST(EncodeWindow, Examples) {
  const auto w = encode_window(2, 6, 3);
  EXPECT_EQ(strings(w), (std::vector<std::string>{"01*", "10*"}));
  expect_exact_disjoint(w, oracle::interval(2, 6, 3), 3);
  EXPECT_EQ(strings(encode_window(0, 8, 3)), (std::vector<std::string>{"***"}));
  EXPECT_EQ(strings(encode_window(1, 2, 3)), (std::vector<std::string>{"001"}));
  EXPECT_EQ(code_of([] { encode_window(3, 3, 3); }), Errc::EmptyRange);
  EXPECT_EQ(code_of([] { encode_window(5, 2, 3); }), Errc::EmptyRange);
  EXPECT_EQ(code_of([] { encode_window(0, 9, 3); }), Errc::RangeOutOfField);
}

TEST(EncodeWindow, ExhaustiveOracleUpToEightBits) {
  for (unsigned k = 1; k <= 8; ++k) {
    const std::uint64_t n = std::uint64_t{1} << k;
    std::size_t worst = 0;
    for (std::uint64_t a = 0; a < n; ++a)
      for (std::uint64_t b = a + 1; b <= n; ++b) {
        const auto w = encode_window(a, b, k);
        const auto want = oracle::interval(a, b, k);
        const auto got = oracle::enumerate(strings(w), k);
        ASSERT_EQ(got.members, want);
        ASSERT_EQ(got.overlaps, 0u);
        ASSERT_EQ(w.size(), oracle::min_prefix_cover(want, k));
        worst = std::max(worst, w.size());
      }
    // The 2k - 2 bound is reached, e.g. by [1, 2^k - 1).
    if (k >= 2) {
      EXPECT_EQ(worst, 2 * k - 2);
      EXPECT_EQ(encode_window(1, n - 1, k).size(), 2 * k - 2);
    }
  }
}

TEST(EncodeWindow, SampledWideFieldsAgreeWithLibraryCounter) {
  // Beyond brute-force range: the trie recursion in verify must agree with the oracle DP.
  std::mt19937_64 rng(99);
  for (unsigned k = 11; k <= 14; ++k) {
    const std::uint64_t n = std::uint64_t{1} << k;
    for (int i = 0; i < 50; ++i) {
      std::uint64_t a = rng() % n;
      std::uint64_t b = rng() % n + 1;
      if (a >= b) std::swap(a, b);
      if (a == b) continue;
      const auto want = oracle::interval(a, b, k);
      ASSERT_EQ(encode_window(a, b, k).size(), oracle::min_prefix_cover(want, k));
      ASSERT_EQ(verify::min_prefix_cover(want, k), oracle::min_prefix_cover(want, k));
    }
  }
}

TEST(EncodePeriodic, AlignedHalfPeriodIsOneWord) {
  const Duration tick = Duration::us(1);
  const auto c = encode_periodic(SimTime{16'000 * 5}, Duration::us(8), 4, tick);
  EXPECT_EQ(strings(c.words), (std::vector<std::string>{"0***"}));
  EXPECT_EQ(c.valid_until, SimTime{16'000 * 5 + 8'000});
}

TEST(EncodePeriodic, WrapAroundCover) {
  const auto c = encode_periodic(SimTime{6}, Duration{3}, 3, Duration{1});
  auto s = strings(c.words);
  std::sort(s.begin(), s.end());
  EXPECT_EQ(s, (std::vector<std::string>{"000", "11*"}));
  expect_exact_disjoint(c.words, oracle::cyclic(6, 3, 3), 3);
}

TEST(EncodePeriodic, Errors) {
  EXPECT_EQ(code_of([] { encode_periodic(SimTime{0}, Duration{}, 4, Duration{1}); }), Errc::PeriodTooShort);
  EXPECT_EQ(code_of([] { encode_periodic(SimTime{0}, Duration{9}, 4, Duration{1}); }), Errc::PeriodTooShort);
  EXPECT_NO_THROW(encode_periodic(SimTime{0}, Duration{8}, 4, Duration{1}));
}

TEST(EncodePeriodic, ExhaustiveCyclicOracle) {
  for (unsigned k = 2; k <= 8; ++k) {
    const std::uint64_t n = std::uint64_t{1} << k;
    for (std::uint64_t start = 0; start < n; ++start)
      for (std::uint64_t len = 1; len <= n / 2; ++len) {
        const auto c = encode_periodic(SimTime{start}, Duration{static_cast<std::int64_t>(len)}, k, Duration{1});
        const auto want = oracle::cyclic(start, len, k);
        const auto got = oracle::enumerate(strings(c.words), k);
        ASSERT_EQ(got.members, want);
        ASSERT_EQ(got.overlaps, 0u);
        ASSERT_EQ(c.words.size(), oracle::min_prefix_cover(want, k));
      }
  }
}

TEST(TimestampField, LowBitsOfTickCount) {
  EXPECT_EQ(timestamp_field(SimTime{12'345'678}, 20, Duration::us(1)), 12'345u);
  EXPECT_EQ(timestamp_field(SimTime{(1u << 20) * 1000ull + 7'000}, 20, Duration::us(1)), 7u);
  EXPECT_EQ(timestamp_field(SimTime{999}, 20, Duration::us(1)), 0u);
}

TEST(ChooseUpdateTime, EarliestMinimumAmongThreeToSix) {
  const auto c = choose_update_time({SimTime{3}, SimTime{6}}, 3, Duration{1}, range_kind::Geq{});
  EXPECT_EQ(c.t0, SimTime{4});
  EXPECT_EQ(c.words.size(), 1u);
}

TEST(ChooseUpdateTime, SinglePointHasNoFreedom) {
  const auto c = choose_update_time({SimTime{5'000}, SimTime{5'000}}, 4, Duration::us(1), range_kind::Geq{});
  EXPECT_EQ(c.t0, SimTime{5'000});
  EXPECT_EQ(c.field_value, 5u);
  EXPECT_EQ(strings(c.words), strings(encode_geq(5, 4)));
}

TEST(ChooseUpdateTime, HalfAlignedValueCostsOne) {
  const auto c = choose_update_time({SimTime{9}, SimTime{13}}, 4, Duration{1}, range_kind::Geq{});
  EXPECT_EQ(c.field_value, 12u);
  EXPECT_EQ(c.words.size(), 1u);
}

TEST(ChooseUpdateTime, Errors) {
  EXPECT_EQ(code_of([] { choose_update_time({SimTime{5}, SimTime{4}}, 4, Duration{1}, range_kind::Geq{}); }),
            Errc::NoCandidate);
  EXPECT_EQ(code_of([] { choose_update_time({SimTime{1'001}, SimTime{1'999}}, 4, Duration::us(1), range_kind::Geq{}); }),
            Errc::NoCandidate);
  EXPECT_EQ(code_of([] { choose_update_time({SimTime{14}, SimTime{15}}, 4, Duration{1}, range_kind::Window{4}); }),
            Errc::NoCandidate);
}

TEST(ChooseUpdateTime, ExhaustiveOptimalityAllKinds) {
  std::mt19937_64 rng(7);
  for (unsigned k = 1; k <= 8; ++k) {
    const std::uint64_t n = std::uint64_t{1} << k;
    for (int i = 0; i < 300; ++i) {
      const Duration tick{static_cast<std::int64_t>(1 + rng() % 5)};
      const std::uint64_t t_min = rng() % (4 * n * 5);
      const std::uint64_t t_max = t_min + rng() % (3 * n * 5);
      const std::uint64_t tk = static_cast<std::uint64_t>(tick.count());
      const std::uint64_t c_lo = (t_min + tk - 1) / tk;
      const std::uint64_t c_hi = t_max / tk;
      const std::uint64_t len = 1 + rng() % n;
      const std::uint64_t hold_ticks = 1 + rng() % std::max<std::uint64_t>(1, n / 2);

      const std::pair<RangeKind, oracle::RangeShape> cases[] = {
          {range_kind::Geq{}, {oracle::RangeShape::Kind::Geq, 0}},
          {range_kind::Window{len}, {oracle::RangeShape::Kind::Window, len}},
          {range_kind::Periodic{tick * static_cast<std::int64_t>(hold_ticks)}, {oracle::RangeShape::Kind::Cyclic, hold_ticks}},
      };
      for (const auto& [kind, shape] : cases) {
        const auto want = c_lo <= c_hi ? oracle::best_candidate(c_lo, c_hi, k, shape) : std::nullopt;
        if (!want) {
          ASSERT_EQ(code_of([&] { choose_update_time({SimTime{t_min}, SimTime{t_max}}, k, tick, kind); }), Errc::NoCandidate);
          continue;
        }
        const auto got = choose_update_time({SimTime{t_min}, SimTime{t_max}}, k, tick, kind);
        ASSERT_EQ(got.words.size(), want->cost) << k << " " << t_min << " " << t_max << " kind " << kind.index();
        ASSERT_EQ(got.t0.ns(), want->candidate * tk);
        ASSERT_GE(got.t0.ns(), t_min);
        ASSERT_LE(got.t0.ns(), t_max);
      }
    }
  }
}

TEST(InstallTimeflip, AlignedFlipAddsOneEntry) {
  TcamTable t(2, 4, 16);
  const auto old = t.add(1, TernaryWord(2), TernaryWord(4), 10, 1);
  const auto rec = install_timeflip(t, old, 20, SimTime{8}, Duration{1});
  EXPECT_EQ(rec.entries.size(), 1u);
  EXPECT_EQ(rec.config_version, 2u);
  EXPECT_EQ(t.entry(rec.entries[0])->priority, 2u);
  ASSERT_NE(t.entry(old), nullptr);
}

TEST(InstallTimeflip, LookupFlipsAtT0ForEveryTimestamp) {
  for (std::uint64_t t0 = 0; t0 < 16; ++t0) {
    TcamTable t(1, 4, 16);
    const auto old = t.add(1, TernaryWord(1), TernaryWord(4), 10, 1);
    install_timeflip(t, old, 20, SimTime{t0}, Duration{1});
    for (std::uint64_t ts = 0; ts < 16; ++ts) {
      const auto r = t.lookup(0, ts);
      ASSERT_EQ(r.action, ts >= t0 ? 20u : 10u);
      ASSERT_EQ(r.config_version, ts >= t0 ? 2u : 1u);
    }
  }
}

TEST(InstallTimeflip, TwoRulesSameT0FlipTogether) {
  TcamTable t(2, 5, 64);
  const auto a = t.add(1, TernaryWord::parse("0*"), TernaryWord(5), 1, 1);
  const auto b = t.add(1, TernaryWord::parse("1*"), TernaryWord(5), 2, 1);
  install_timeflip(t, a, 11, SimTime{13}, Duration{1});
  install_timeflip(t, b, 12, SimTime{13}, Duration{1});
  for (std::uint64_t ts = 0; ts < 32; ++ts) {
    const bool fa = t.lookup(0, ts).action == 11;
    const bool fb = t.lookup(2, ts).action == 12;
    ASSERT_EQ(fa, fb) << ts;
    ASSERT_EQ(fa, ts >= 13);
  }
}

TEST(InstallTimeflip, CleanupCollapsesBeforeWrap) {
  TcamTable t(1, 4, 16);
  const auto old = t.add(1, TernaryWord(1), TernaryWord(4), 10, 1);
  const auto rec = install_timeflip(t, old, 20, SimTime{3}, Duration{1});
  EXPECT_EQ(rec.collapse_at, SimTime{16});
  EXPECT_EQ(t.run_cleanups(SimTime{16}), 1u);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.entries()[0].priority, 1u);
  EXPECT_EQ(t.entries()[0].config_version, 2u);
  for (std::uint64_t ts = 0; ts < 16; ++ts) EXPECT_EQ(t.lookup(0, ts).action, 20u);
}

TEST(InstallTimeflip, ExplicitGraceAndPeriodicHold) {
  TcamTable t(1, 6, 16);
  const auto old = t.add(1, TernaryWord(1), TernaryWord(6), 10, 1);
  EXPECT_EQ(install_timeflip(t, old, 20, SimTime{8}, Duration{1}, {Duration{5}, std::nullopt}).collapse_at, SimTime{13});

  TcamTable p(1, 4, 16);
  const auto o2 = p.add(1, TernaryWord(1), TernaryWord(4), 10, 1);
  const auto rec = install_timeflip(p, o2, 20, SimTime{14}, Duration{1}, {std::nullopt, Duration{4}});
  EXPECT_EQ(rec.collapse_at, SimTime{18});
  for (std::uint64_t ts = 0; ts < 16; ++ts)
    EXPECT_EQ(p.lookup(0, ts).action, (ts >= 14 || ts < 2) ? 20u : 10u) << ts;
}

TEST(InstallTimeflip, TableFullLeavesTableIntact) {
  TcamTable t(1, 4, 3);
  const auto old = t.add(1, TernaryWord(1), TernaryWord(4), 10, 1);
  const auto before = t.dump();
  EXPECT_EQ(code_of([&] { install_timeflip(t, old, 20, SimTime{1}, Duration{1}); }), Errc::TableFull);
  EXPECT_EQ(t.dump(), before);
  EXPECT_TRUE(t.pending_cleanups().empty());
  EXPECT_EQ(code_of([&] { install_timeflip(t, 999, 20, SimTime{1}, Duration{1}); }), Errc::UnknownEntry);
}
