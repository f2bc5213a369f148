#pragma once

// Strict JSON reading: unknown keys and type mismatches raise ConfigError,
// absent keys keep the caller's default. Durations are integer nanoseconds.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttu/error.hpp"
#include "ttu/random.hpp"
#include "ttu/time.hpp"
#include "ttu/timebase.hpp"

namespace ttu::json_io {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what);

void read_value(const json& j, bool& out, const std::string& where);
void read_value(const json& j, std::int64_t& out, const std::string& where);
void read_value(const json& j, std::uint64_t& out, const std::string& where);
void read_value(const json& j, std::uint32_t& out, const std::string& where);
void read_value(const json& j, double& out, const std::string& where);
void read_value(const json& j, std::string& out, const std::string& where);
void read_value(const json& j, Duration& out, const std::string& where);
void read_value(const json& j, SimTime& out, const std::string& where);
void read_value(const json& j, DelayModel& out, const std::string& where);
void read_value(const json& j, ClockModel::Params& out, const std::string& where);
template <typename T>
void read_value(const json& j, std::vector<T>& out, const std::string& where);
template <typename T>
void read_value(const json& j, std::optional<T>& out, const std::string& where);

template <typename T>
void read_value(const json& j, std::vector<T>& out, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  std::vector<T> tmp;
  tmp.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    T v{};
    read_value(j[i], v, where + "[" + std::to_string(i) + "]");
    tmp.push_back(std::move(v));
  }
  out = std::move(tmp);
}

template <typename T>
void read_value(const json& j, std::optional<T>& out, const std::string& where) {
  if (j.is_null()) {
    out.reset();
    return;
  }
  T v{};
  read_value(j, v, where);
  out = std::move(v);
}

/// Reads the members of one JSON object, tracking which keys were consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where);

  bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  ObjectReader& get(const std::string& key, T& out) {
    seen_.insert(key);
    if (auto it = j_.find(key); it != j_.end()) read_value(*it, out, where_ + "." + key);
    return *this;
  }

  template <typename T>
  ObjectReader& require(const std::string& key, T& out) {
    if (!j_.contains(key)) fail(where_, "missing key '" + key + "'");
    return get(key, out);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  const std::string& where() const noexcept { return where_; }

  /// Throws ConfigError naming the first key that was never read.
  void finish() const;

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json to_json(const DelayModel& m);
json to_json(const ClockModel::Params& p);

}  // namespace ttu::json_io
