#include "ttu/tcam.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>

#include "ttu/error.hpp"

namespace ttu {

namespace {

std::uint64_t width_mask(unsigned width) {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

void check_width(unsigned width) {
  if (width == 0 || width > TernaryWord::kMaxWidth)
    throw Error(Errc::InvalidArgument, "ternary width must be in [1, 64]");
}

}  // namespace

TernaryWord::TernaryWord(unsigned width) : TernaryWord(width, 0, 0) {}

TernaryWord::TernaryWord(unsigned width, std::uint64_t value, std::uint64_t care)
    : width_(width), value_(value & care), care_(care) {
  check_width(width);
  if ((care & ~width_mask(width)) != 0) throw Error(Errc::InvalidArgument, "care bits beyond width");
}

TernaryWord TernaryWord::exact(std::uint64_t value, unsigned width) {
  check_width(width);
  if ((value & ~width_mask(width)) != 0)
    throw Error(Errc::RangeOutOfField, "value does not fit in " + std::to_string(width) + " bits");
  return TernaryWord(width, value, width_mask(width));
}

TernaryWord TernaryWord::prefix(std::uint64_t value, unsigned prefix_len, unsigned width) {
  check_width(width);
  if (prefix_len > width) throw Error(Errc::InvalidArgument, "prefix longer than word");
  const std::uint64_t care = width_mask(width) & ~width_mask(width - prefix_len);
  return TernaryWord(width, value, care);
}

TernaryWord TernaryWord::parse(std::string_view text) {
  if (text.empty() || text.size() > kMaxWidth)
    throw Error(Errc::ParseError, "ternary word length must be in [1, 64]");
  const auto width = static_cast<unsigned>(text.size());
  std::uint64_t value = 0;
  std::uint64_t care = 0;
  for (char c : text) {
    value <<= 1;
    care <<= 1;
    switch (c) {
      case '0': care |= 1; break;
      case '1': care |= 1; value |= 1; break;
      case '*': break;
      default: throw Error(Errc::ParseError, "bad ternary character '" + std::string(1, c) + "'");
    }
  }
  return TernaryWord(width, value, care);
}

Trit TernaryWord::bit(unsigned msb_index) const {
  if (msb_index >= width_) throw Error(Errc::InvalidArgument, "bit index out of range");
  const std::uint64_t m = std::uint64_t{1} << (width_ - 1 - msb_index);
  if ((care_ & m) == 0) return Trit::DontCare;
  return (value_ & m) ? Trit::One : Trit::Zero;
}

std::uint64_t TernaryWord::match_count() const noexcept {
  const int free = static_cast<int>(width_) - std::popcount(care_);
  return free >= 64 ? ~std::uint64_t{0} : std::uint64_t{1} << free;
}

bool TernaryWord::overlaps(const TernaryWord& other) const noexcept {
  const std::uint64_t common = care_ & other.care_;
  return (value_ & common) == (other.value_ & common);
}

std::string TernaryWord::to_string() const {
  std::string s(width_, '*');
  for (unsigned i = 0; i < width_; ++i) {
    switch (bit(i)) {
      case Trit::Zero: s[i] = '0'; break;
      case Trit::One: s[i] = '1'; break;
      case Trit::DontCare: break;
    }
  }
  return s;
}

TcamTable::TcamTable(unsigned key_width, unsigned ts_width, std::size_t capacity)
    : key_width_(key_width), ts_width_(ts_width), capacity_(capacity) {
  check_width(key_width);
  check_width(ts_width);
}

EntryId TcamTable::add(std::uint32_t priority, TernaryWord key, TernaryWord ts, ActionId action,
                       std::uint32_t version) {
  if (key.width() != key_width_ || ts.width() != ts_width_)
    throw Error(Errc::WidthMismatch, "entry widths do not match the table");
  if (entries_.size() >= capacity_) throw Error(Errc::TableFull, "capacity " + std::to_string(capacity_));
  const EntryId id = next_id_++;
  entries_.push_back(TcamEntry{id, priority, key, ts, action, version});
  return id;
}

void TcamTable::remove(EntryId id) {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.id == id; });
  if (it == entries_.end()) throw Error(Errc::UnknownEntry, "entry " + std::to_string(id));
  entries_.erase(it);
}

const TcamEntry* TcamTable::entry(EntryId id) const {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.id == id; });
  return it == entries_.end() ? nullptr : &*it;
}

std::optional<LookupResult> TcamTable::find(std::uint64_t key, std::uint64_t ts) const {
  if ((key & ~width_mask(key_width_)) != 0 || (ts & ~width_mask(ts_width_)) != 0)
    throw Error(Errc::WidthMismatch, "lookup input wider than the table fields");
  const TcamEntry* best = nullptr;
  for (const auto& e : entries_) {
    if (!e.key_match.matches(key) || !e.ts_match.matches(ts)) continue;
    if (best == nullptr || e.priority > best->priority) best = &e;
  }
  if (best == nullptr) return std::nullopt;
  return LookupResult{best->action, best->config_version, best->id};
}

LookupResult TcamTable::lookup(std::uint64_t key, std::uint64_t ts) const {
  if (auto r = find(key, ts)) return *r;
  throw Error(Errc::NoMatch, "no entry matches key " + std::to_string(key) + " ts " + std::to_string(ts));
}

void TcamTable::schedule_cleanup(CleanupRecord rec) {
  if (rec.key_match.width() != key_width_) throw Error(Errc::WidthMismatch, "cleanup key width");
  auto pos = std::upper_bound(cleanups_.begin(), cleanups_.end(), rec.due,
                              [](SimTime due, const CleanupRecord& r) { return due < r.due; });
  cleanups_.insert(pos, std::move(rec));
}

std::size_t TcamTable::run_cleanups(SimTime now) {
  std::size_t ran = 0;
  while (!cleanups_.empty() && cleanups_.front().due <= now) {
    CleanupRecord rec = std::move(cleanups_.front());
    cleanups_.erase(cleanups_.begin());
    // The collapsed entry takes the place of the first removed entry so the
    // relative order against unrelated entries is preserved.
    std::size_t slot = entries_.size();
    for (EntryId id : rec.remove) {
      auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.id == id; });
      if (it == entries_.end()) continue;
      slot = std::min(slot, static_cast<std::size_t>(it - entries_.begin()));
      entries_.erase(it);
    }
    slot = std::min(slot, entries_.size());
    entries_.insert(entries_.begin() + static_cast<std::ptrdiff_t>(slot),
                    TcamEntry{next_id_++, rec.priority, rec.key_match, TernaryWord(ts_width_),
                              rec.action, rec.config_version});
    ++ran;
  }
  return ran;
}

void TcamTable::dump(std::ostream& os) const {
  for (const auto& e : entries_) {
    os << e.priority << ' ' << e.key_match.to_string() << ' ' << e.ts_match.to_string() << ' '
       << e.action << ' ' << e.config_version << '\n';
  }
}

std::string TcamTable::dump() const {
  std::ostringstream os;
  dump(os);
  return os.str();
}

TcamTable TcamTable::load(std::istream& is, std::size_t capacity) {
  std::optional<TcamTable> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::uint64_t priority = 0;
    std::string key;
    std::string ts;
    ActionId action = 0;
    std::uint64_t version = 0;
    std::string extra;
    if (!(ls >> priority >> key >> ts >> action >> version) || (ls >> extra) ||
        priority > UINT32_MAX || version > UINT32_MAX)
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": '" + line + "'");
    auto kw = TernaryWord::parse(key);
    auto tw = TernaryWord::parse(ts);
    if (!table) table.emplace(kw.width(), tw.width(), capacity);
    table->add(static_cast<std::uint32_t>(priority), kw, tw, action,
               static_cast<std::uint32_t>(version));
  }
  if (!table) throw Error(Errc::ParseError, "empty table dump");
  return std::move(*table);
}

}  // namespace ttu
