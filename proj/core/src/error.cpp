#include "ttu/error.hpp"

#include "ttu/time.hpp"

namespace ttu {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::TimeOverflow: return "TimeOverflow";
    case Errc::UnknownSwitch: return "UnknownSwitch";
    case Errc::MalformedExchange: return "MalformedExchange";
    case Errc::StaleExchange: return "StaleExchange";
    case Errc::RangeOutOfField: return "RangeOutOfField";
    case Errc::EmptyRange: return "EmptyRange";
    case Errc::PeriodTooShort: return "PeriodTooShort";
    case Errc::NoCandidate: return "NoCandidate";
    case Errc::NoMatch: return "NoMatch";
    case Errc::TableFull: return "TableFull";
    case Errc::UnknownEntry: return "UnknownEntry";
    case Errc::WidthMismatch: return "WidthMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::BundleStateError: return "BundleStateError";
    case Errc::SchedulePastError: return "SchedulePastError";
    case Errc::AlreadyExecuted: return "AlreadyExecuted";
    case Errc::DuplicateBundle: return "DuplicateBundle";
    case Errc::RpcTooLate: return "RpcTooLate";
    case Errc::EmptyBundle: return "EmptyBundle";
    case Errc::ConfigError: return "ConfigError";
    case Errc::InvariantBreach: return "InvariantBreach";
  }
  return "Unknown";
}

std::string to_string(Duration d) { return std::to_string(d.count()) + "ns"; }
std::string to_string(SimTime t) { return std::to_string(t.ns()) + "ns"; }

}  // namespace ttu
