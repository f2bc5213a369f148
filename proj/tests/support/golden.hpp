#pragma once

#include <string>

namespace oracle {

/// Open, two Adds, Close, scheduled Commit, execution at T_s.
std::string scheduled_bundle_happy_trace();
/// A scheduled bundle cancelled before T_s, then a second discard, then an
/// executed bundle whose discard is refused.
std::string scheduled_bundle_discard_trace();

/// Contents of a file under the golden directory.
std::string read_golden(const std::string& name);

}  // namespace oracle
