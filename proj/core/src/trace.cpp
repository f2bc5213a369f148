#include "ttu/trace.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

#include "ttu/error.hpp"

namespace ttu {

std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::ToSwitch: return "ctl->sw";
    case Direction::ToController: return "sw->ctl";
    case Direction::Local: return "local";
  }
  return "?";
}

std::string format(const TraceLine& line) {
  std::string out = std::to_string(line.time.ns());
  out += ' ';
  out += to_string(line.direction);
  out += ' ';
  out += line.kind;
  out += ' ';
  out += std::to_string(line.bundle);
  out += ' ';
  out += line.detail.empty() ? std::string("-") : line.detail;
  return out;
}

namespace {

std::string_view next_token(std::string_view& s) {
  const auto start = s.find_first_not_of(' ');
  if (start == std::string_view::npos) throw Error(Errc::ParseError, "truncated trace line");
  s.remove_prefix(start);
  const auto end = s.find(' ');
  auto tok = s.substr(0, end);
  s.remove_prefix(end == std::string_view::npos ? s.size() : end + 1);
  return tok;
}

template <typename T>
T parse_number(std::string_view tok) {
  T v{};
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw Error(Errc::ParseError, "bad number '" + std::string(tok) + "'");
  return v;
}

}  // namespace

TraceLine parse_trace_line(std::string_view text) {
  TraceLine line;
  line.time = SimTime{parse_number<std::uint64_t>(next_token(text))};
  const auto dir = next_token(text);
  if (dir == "ctl->sw") line.direction = Direction::ToSwitch;
  else if (dir == "sw->ctl") line.direction = Direction::ToController;
  else if (dir == "local") line.direction = Direction::Local;
  else throw Error(Errc::ParseError, "bad direction '" + std::string(dir) + "'");
  line.kind = std::string(next_token(text));
  line.bundle = parse_number<std::uint32_t>(next_token(text));
  if (text.empty()) throw Error(Errc::ParseError, "missing detail column");
  line.detail = text == "-" ? std::string{} : std::string(text);
  return line;
}

void TraceLog::write(std::ostream& os) const {
  for (const auto& l : lines_) os << format(l) << '\n';
}

std::string TraceLog::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace ttu
