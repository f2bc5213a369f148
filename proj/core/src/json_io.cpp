#include "ttu/json_io.hpp"

#include <limits>

namespace ttu::json_io {

void fail(const std::string& where, const std::string& what) {
  throw Error(Errc::ConfigError, where + ": " + what);
}

void read_value(const json& j, bool& out, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected a boolean");
  out = j.get<bool>();
}

void read_value(const json& j, std::int64_t& out, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
    fail(where, "integer out of range");
  out = j.get<std::int64_t>();
}

void read_value(const json& j, std::uint64_t& out, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  if (!j.is_number_unsigned() && j.get<std::int64_t>() < 0) fail(where, "expected a non-negative integer");
  out = j.get<std::uint64_t>();
}

void read_value(const json& j, std::uint32_t& out, const std::string& where) {
  std::uint64_t v = 0;
  read_value(j, v, where);
  if (v > std::numeric_limits<std::uint32_t>::max()) fail(where, "integer out of range");
  out = static_cast<std::uint32_t>(v);
}

void read_value(const json& j, double& out, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  out = j.get<double>();
}

void read_value(const json& j, std::string& out, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  out = j.get<std::string>();
}

void read_value(const json& j, Duration& out, const std::string& where) {
  std::int64_t v = 0;
  read_value(j, v, where);
  out = Duration{v};
}

void read_value(const json& j, SimTime& out, const std::string& where) {
  std::uint64_t v = 0;
  read_value(j, v, where);
  out = SimTime{v};
}

void read_value(const json& j, DelayModel& out, const std::string& where) {
  if (!j.is_object()) fail(where, "expected a delay model object");
  ObjectReader r(j, where);
  std::string kind;
  r.require("kind", kind);
  if (kind == "constant") {
    delay::Constant m;
    r.require("value_ns", m.value);
    out = m;
  } else if (kind == "uniform") {
    delay::Uniform m;
    r.require("lo_ns", m.lo).require("hi_ns", m.hi);
    if (m.hi < m.lo) fail(where, "uniform delay needs lo_ns <= hi_ns");
    out = m;
  } else if (kind == "gaussian") {
    delay::Gaussian m;
    r.require("mean_ns", m.mean).require("stddev_ns", m.stddev);
    out = m;
  } else if (kind == "contaminated") {
    delay::Contaminated m;
    r.require("mean_ns", m.base.mean)
        .require("stddev_ns", m.base.stddev)
        .require("outlier_prob", m.outlier_prob)
        .require("outlier_shift_ns", m.outlier_shift);
    if (m.outlier_prob < 0.0 || m.outlier_prob > 1.0) fail(where, "outlier_prob must lie in [0, 1]");
    out = m;
  } else {
    fail(where, "unknown delay kind '" + kind + "'");
  }
  if (auto c = std::get_if<delay::Constant>(&out); c && c->value < Duration{})
    fail(where, "delays must be non-negative");
  if (auto u = std::get_if<delay::Uniform>(&out); u && u->lo < Duration{})
    fail(where, "delays must be non-negative");
  r.finish();
}

void read_value(const json& j, ClockModel::Params& out, const std::string& where) {
  if (!j.is_object()) fail(where, "expected a clock object");
  ObjectReader r(j, where);
  r.get("true_offset_ns", out.true_offset)
      .get("skew_ppm", out.skew_ppm)
      .get("jitter_std_ns", out.jitter_std_ns)
      .get("rng_seed", out.rng_seed);
  r.finish();
}

ObjectReader::ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
  if (!j_.is_object()) fail(where_, "expected an object");
}

void ObjectReader::finish() const {
  for (const auto& [key, _] : j_.items())
    if (!seen_.contains(key)) fail(where_, "unknown key '" + key + "'");
}

json to_json(const DelayModel& m) {
  struct Visitor {
    json operator()(const delay::Constant& c) const { return {{"kind", "constant"}, {"value_ns", c.value.count()}}; }
    json operator()(const delay::Uniform& u) const {
      return {{"kind", "uniform"}, {"lo_ns", u.lo.count()}, {"hi_ns", u.hi.count()}};
    }
    json operator()(const delay::Gaussian& g) const {
      return {{"kind", "gaussian"}, {"mean_ns", g.mean.count()}, {"stddev_ns", g.stddev.count()}};
    }
    json operator()(const delay::Contaminated& c) const {
      return {{"kind", "contaminated"},
              {"mean_ns", c.base.mean.count()},
              {"stddev_ns", c.base.stddev.count()},
              {"outlier_prob", c.outlier_prob},
              {"outlier_shift_ns", c.outlier_shift.count()}};
    }
  };
  return std::visit(Visitor{}, m);
}

json to_json(const ClockModel::Params& p) {
  return {{"true_offset_ns", p.true_offset.count()},
          {"skew_ppm", p.skew_ppm},
          {"jitter_std_ns", p.jitter_std_ns},
          {"rng_seed", p.rng_seed}};
}

}  // namespace ttu::json_io
