#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

#include "ttu/error.hpp"

namespace ttu {

/// Signed span of simulated time in integer nanoseconds.
class Duration {
 public:
  constexpr Duration() noexcept = default;
  constexpr explicit Duration(std::int64_t ns) noexcept : ns_(ns) {}

  static constexpr Duration ns(std::int64_t v) noexcept { return Duration{v}; }
  static constexpr Duration us(std::int64_t v) noexcept { return Duration{v * 1'000}; }
  static constexpr Duration ms(std::int64_t v) noexcept { return Duration{v * 1'000'000}; }
  static constexpr Duration s(std::int64_t v) noexcept { return Duration{v * 1'000'000'000}; }
  static constexpr Duration zero() noexcept { return Duration{}; }
  static constexpr Duration max() noexcept {
    return Duration{std::numeric_limits<std::int64_t>::max()};
  }

  constexpr std::int64_t count() const noexcept { return ns_; }

  Duration operator+(Duration o) const {
    std::int64_t r{};
    if (__builtin_add_overflow(ns_, o.ns_, &r)) throw Error(Errc::TimeOverflow, "duration add");
    return Duration{r};
  }
  Duration operator-(Duration o) const {
    std::int64_t r{};
    if (__builtin_sub_overflow(ns_, o.ns_, &r)) throw Error(Errc::TimeOverflow, "duration sub");
    return Duration{r};
  }
  Duration operator-() const {
    if (ns_ == std::numeric_limits<std::int64_t>::min())
      throw Error(Errc::TimeOverflow, "duration negate");
    return Duration{-ns_};
  }
  Duration operator*(std::int64_t k) const {
    std::int64_t r{};
    if (__builtin_mul_overflow(ns_, k, &r)) throw Error(Errc::TimeOverflow, "duration scale");
    return Duration{r};
  }
  Duration& operator+=(Duration o) { return *this = *this + o; }
  Duration& operator-=(Duration o) { return *this = *this - o; }

  constexpr auto operator<=>(const Duration&) const noexcept = default;

 private:
  std::int64_t ns_ = 0;
};

/// Point in simulated time: unsigned nanoseconds since the simulation epoch.
/// Arithmetic is checked; leaving [0, 2^64) throws Errc::TimeOverflow.
class SimTime {
 public:
  constexpr SimTime() noexcept = default;
  constexpr explicit SimTime(std::uint64_t ns) noexcept : ns_(ns) {}

  static constexpr SimTime from_ns(std::uint64_t v) noexcept { return SimTime{v}; }
  static constexpr SimTime epoch() noexcept { return SimTime{}; }
  static constexpr SimTime max() noexcept {
    return SimTime{std::numeric_limits<std::uint64_t>::max()};
  }

  constexpr std::uint64_t ns() const noexcept { return ns_; }

  SimTime operator+(Duration d) const {
    const auto v = static_cast<__int128>(ns_) + d.count();
    return checked(v, "time + duration");
  }
  SimTime operator-(Duration d) const {
    const auto v = static_cast<__int128>(ns_) - d.count();
    return checked(v, "time - duration");
  }
  SimTime& operator+=(Duration d) { return *this = *this + d; }
  SimTime& operator-=(Duration d) { return *this = *this - d; }

  Duration operator-(SimTime o) const {
    const auto v = static_cast<__int128>(ns_) - static_cast<__int128>(o.ns_);
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min())
      throw Error(Errc::TimeOverflow, "time difference");
    return Duration{static_cast<std::int64_t>(v)};
  }

  constexpr auto operator<=>(const SimTime&) const noexcept = default;

  /// Builds a SimTime from a wide intermediate, throwing when it does not fit.
  static SimTime checked(__int128 v, const char* what) {
    if (v < 0 || v > static_cast<__int128>(std::numeric_limits<std::uint64_t>::max()))
      throw Error(Errc::TimeOverflow, what);
    return SimTime{static_cast<std::uint64_t>(v)};
  }

 private:
  std::uint64_t ns_ = 0;
};

inline SimTime operator+(Duration d, SimTime t) { return t + d; }

std::string to_string(Duration d);
std::string to_string(SimTime t);

namespace literals {
constexpr Duration operator""_ns(unsigned long long v) { return Duration::ns(static_cast<std::int64_t>(v)); }
constexpr Duration operator""_us(unsigned long long v) { return Duration::us(static_cast<std::int64_t>(v)); }
constexpr Duration operator""_ms(unsigned long long v) { return Duration::ms(static_cast<std::int64_t>(v)); }
constexpr Duration operator""_s(unsigned long long v) { return Duration::s(static_cast<std::int64_t>(v)); }
}  // namespace literals

}  // namespace ttu
