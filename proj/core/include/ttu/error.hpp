#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ttu {

enum class Errc {
  InvalidArgument,
  TimeOverflow,
  UnknownSwitch,
  MalformedExchange,
  StaleExchange,
  RangeOutOfField,
  EmptyRange,
  PeriodTooShort,
  NoCandidate,
  NoMatch,
  TableFull,
  UnknownEntry,
  WidthMismatch,
  ParseError,
  BundleStateError,
  SchedulePastError,
  AlreadyExecuted,
  DuplicateBundle,
  RpcTooLate,
  EmptyBundle,
  ConfigError,
  InvariantBreach,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ttu
