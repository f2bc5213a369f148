#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ttu/time.hpp"

namespace ttu {

enum class Direction { ToSwitch, ToController, Local };

std::string_view to_string(Direction d) noexcept;

/// One protocol message or event. Rendered as
/// `time direction msg_kind bundle_id detail`; detail is the rest of the
/// line and `-` when empty.
struct TraceLine {
  SimTime time;
  Direction direction = Direction::Local;
  std::string kind;
  std::uint32_t bundle = 0;
  std::string detail;

  friend bool operator==(const TraceLine&, const TraceLine&) = default;
};

std::string format(const TraceLine& line);
TraceLine parse_trace_line(std::string_view text);

class TraceLog {
 public:
  void add(TraceLine line) { lines_.push_back(std::move(line)); }
  void add(SimTime t, Direction d, std::string kind, std::uint32_t bundle, std::string detail = {}) {
    lines_.push_back(TraceLine{t, d, std::move(kind), bundle, std::move(detail)});
  }

  const std::vector<TraceLine>& lines() const noexcept { return lines_; }
  bool empty() const noexcept { return lines_.empty(); }
  void clear() { lines_.clear(); }

  void write(std::ostream& os) const;
  std::string str() const;

 private:
  std::vector<TraceLine> lines_;
};

}  // namespace ttu
