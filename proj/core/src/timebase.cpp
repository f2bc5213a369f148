#include "ttu/timebase.hpp"

#include <cmath>

namespace ttu {

ClockModel::ClockModel(Params params) : params_(params), rng_(make_rng(params.rng_seed, 0xC10C)) {
  if (params_.jitter_std_ns < 0.0) throw Error(Errc::InvalidArgument, "negative clock jitter");
  if (params_.skew_ppm <= -1e6) throw Error(Errc::InvalidArgument, "clock skew stops the clock");
}

namespace {

__int128 noiseless(const ClockModel::Params& p, SimTime t) {
  const long double skew =
      static_cast<long double>(p.skew_ppm) * static_cast<long double>(t.ns()) / 1e6L;
  return static_cast<__int128>(t.ns()) + p.true_offset.count() +
         static_cast<__int128>(std::llroundl(skew));
}

SimTime clamp_time(__int128 v) {
  if (v < 0) return SimTime{};
  return SimTime::checked(v, "clock reading");
}

}  // namespace

SimTime ClockModel::ideal_read(SimTime true_time) const {
  return clamp_time(noiseless(params_, true_time));
}

SimTime ClockModel::read(SimTime true_time) {
  __int128 v = noiseless(params_, true_time);
  if (params_.jitter_std_ns > 0.0) {
    std::normal_distribution<double> noise(0.0, params_.jitter_std_ns);
    v += std::llround(noise(rng_));
  }
  return clamp_time(v);
}

SimTime ClockModel::true_time_at(SimTime local) const {
  // Closed-form guess, then walk to the exact earliest nanosecond since the
  // skew term is rounded.
  const long double rate = 1.0L + static_cast<long double>(params_.skew_ppm) / 1e6L;
  const long double guess =
      (static_cast<long double>(local.ns()) - static_cast<long double>(params_.true_offset.count())) /
      rate;
  __int128 t = guess <= 0 ? 0 : static_cast<__int128>(std::floor(guess));
  const auto target = static_cast<__int128>(local.ns());
  auto value_at = [&](__int128 tt) { return noiseless(params_, SimTime::checked(tt, "clock inverse")); };
  while (t > 0 && value_at(t - 1) >= target) --t;
  while (value_at(t) < target) ++t;
  return SimTime::checked(t, "clock inverse");
}

SimTime read_clock(ClockModel& clock, SimTime true_time) { return clock.read(true_time); }

SyncExchange rptp_exchange(SwitchId id, ClockModel& switch_clock, ClockModel& controller_clock,
                           PathDelays delays, SimTime true_time) {
  if (delays.switch_to_controller.count() < 0 || delays.controller_to_switch.count() < 0)
    throw Error(Errc::InvalidArgument, "negative path delay");
  SyncExchange ex;
  ex.switch_id = id;
  ex.t1 = switch_clock.read(true_time);
  const SimTime arrive = true_time + delays.switch_to_controller;
  ex.t2 = controller_clock.read(arrive);
  ex.t3 = controller_clock.read(arrive);
  ex.t4 = switch_clock.read(arrive + delays.controller_to_switch);
  return ex;
}

Duration two_way_offset(const SyncExchange& ex) {
  const __int128 sum = (static_cast<__int128>(ex.t1.ns()) - ex.t2.ns()) +
                       (static_cast<__int128>(ex.t4.ns()) - ex.t3.ns());
  const __int128 half = sum / 2;
  if (half > std::numeric_limits<std::int64_t>::max() ||
      half < std::numeric_limits<std::int64_t>::min())
    throw Error(Errc::TimeOverflow, "offset estimate");
  return Duration{static_cast<std::int64_t>(half)};
}

void OffsetTable::register_switch(SwitchId id) { records_.try_emplace(id); }

OffsetRecord OffsetTable::update(const SyncExchange& ex) {
  auto it = records_.find(ex.switch_id);
  if (it == records_.end())
    throw Error(Errc::UnknownSwitch, "switch " + std::to_string(ex.switch_id));

  if (ex.t4 + tolerance_ < ex.t1)
    throw Error(Errc::MalformedExchange, "t4 precedes t1 on the switch clock");
  if (ex.t3 + tolerance_ < ex.t2)
    throw Error(Errc::MalformedExchange, "t3 precedes t2 on the controller clock");
  if (it->second && ex.t3 < it->second->last_update)
    throw Error(Errc::StaleExchange, "exchange older than the stored estimate");

  const Duration round_trip = (ex.t4 - ex.t1) - (ex.t3 - ex.t2);
  OffsetRecord rec;
  rec.switch_id = ex.switch_id;
  rec.estimated_offset = two_way_offset(ex);
  rec.last_update = ex.t3;
  rec.error_bound = Duration{round_trip.count() > 0 ? round_trip.count() / 2 : 0};
  it->second = rec;
  return rec;
}

const OffsetRecord* OffsetTable::find(SwitchId id) const {
  auto it = records_.find(id);
  if (it == records_.end() || !it->second) return nullptr;
  return &*it->second;
}

const OffsetRecord& OffsetTable::at(SwitchId id) const {
  if (const auto* rec = find(id)) return *rec;
  throw Error(Errc::UnknownSwitch, "no offset for switch " + std::to_string(id));
}

SimTime OffsetTable::translate(SwitchId id, SimTime controller_time) const {
  return controller_time + at(id).estimated_offset;
}

std::vector<OffsetRecord> OffsetTable::snapshot() const {
  std::vector<OffsetRecord> out;
  for (const auto& [id, rec] : records_)
    if (rec) out.push_back(*rec);
  return out;
}

}  // namespace ttu
