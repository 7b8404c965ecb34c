// Copyright 2026 The rhsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rhsim/chaincode.h"

#include <algorithm>

#include "rhsim/crypto.h"
#include "rhsim/error.h"
#include "rhsim/timestamp.h"

namespace rhsim::chaincode {

using identity::Principal;
using identity::Role;
using ledger::Namespace;
using ledger::StateKey;
using nlohmann::json;

namespace {

constexpr std::size_t kSaltBytes = 16;

void set_opt(json& j, const char* name, const std::optional<std::string>& v) {
  if (v) j[name] = *v;
}

void set_opt(json& j, const char* name, const std::optional<geo::GeoPoint>& v) {
  if (v) j[name] = v->to_string();
}

std::optional<std::string> get_opt(const json& j, const char* name) {
  if (!j.contains(name)) return std::nullopt;
  return j.at(name).get<std::string>();
}

geo::GeoPoint point_or_throw(const std::string& text) {
  auto p = geo::GeoPoint::parse(text);
  if (!p) throw Error(ErrorCode::kBadArguments, "bad location '" + text + "'");
  return *p;
}

std::optional<geo::GeoPoint> get_opt_point(const json& j, const char* name) {
  auto s = get_opt(j, name);
  if (!s) return std::nullopt;
  return point_or_throw(*s);
}

RideStatus status_from_string(std::string_view s) {
  for (RideStatus st : {RideStatus::kRequested, RideStatus::kAccepted,
                        RideStatus::kCompleted}) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorCode::kBadArguments, "bad status '" + std::string(s) + "'");
}

// One chaincode execution: caller, simulator and the single event slot.
class Context {
 public:
  Context(const Invocation& inv, ledger::TxSimulator& sim,
          const ChaincodeConfig& config)
      : inv_(inv), sim_(sim), config_(config) {}

  const Invocation& inv() const { return inv_; }
  Principal caller() const { return inv_.caller.principal(); }
  const ChaincodeConfig& config() const { return config_; }

  void require_args(std::size_t n) const {
    if (inv_.args.size() != n) {
      throw Error(ErrorCode::kBadArguments,
                  inv_.function + " takes " + std::to_string(n) + " argument(s)");
    }
  }
  const std::string& arg(std::size_t i) const { return inv_.args.at(i); }

  RideTime now() const {
    auto t = RideTime::parse(inv_.now);
    if (!t) throw Error(ErrorCode::kInvalidTimestamp, "'" + inv_.now + "'");
    return *t;
  }

  std::optional<UserRecord> load_user(const StateKey& key) {
    auto bytes = sim_.get(key);
    if (!bytes) return std::nullopt;
    return UserRecord::decode(*bytes);
  }
  UserRecord require_caller_user() {
    auto user = load_user(user_key(caller()));
    if (!user) throw Error(ErrorCode::kNotRegistered, caller().uid);
    return *user;
  }
  std::optional<RideRecord> load_ride(const StateKey& key) {
    auto bytes = sim_.get(key);
    if (!bytes) return std::nullopt;
    return RideRecord::decode(*bytes);
  }
  RideRecord require_ride(const StateKey& key) {
    auto ride = load_ride(key);
    if (!ride) throw Error(ErrorCode::kRideNotFound, key.str());
    return *ride;
  }
  bool exists(const StateKey& key) { return sim_.get(key).has_value(); }

  void put(const StateKey& key, std::string bytes) { sim_.put(key, std::move(bytes)); }
  void del(const StateKey& key) { sim_.del(key); }

  void emit(EventName name, const StateKey& ride_key, std::string ride_id) {
    event_ = RideEvent{name, ride_key.str(), std::move(ride_id)};
  }
  std::optional<RideEvent> take_event() { return std::move(event_); }

 private:
  const Invocation& inv_;
  ledger::TxSimulator& sim_;
  const ChaincodeConfig& config_;
  std::optional<RideEvent> event_;
};

// A RideRequest key named by an argument.
StateKey ride_key_arg(const std::string& text) {
  auto key = StateKey::parse(text);
  if (!key || key->ns() != Namespace::kRideRequest || key->parts().size() != 2) {
    throw Error(ErrorCode::kBadArguments, "not a ride request key '" + text + "'");
  }
  return *key;
}

bool owned_by(const StateKey& key, const Principal& who) {
  return key.parts().size() >= 2 && key.parts()[0] == who.msp.str() &&
         key.parts()[1] == who.uid;
}

bool is_assigned_driver(const RideRecord& ride, const Principal& who) {
  return ride.driver_id && ride.driver_msp &&
         *ride.driver_id == ride_id_for(who.uid) &&
         *ride.driver_msp == who.msp.str();
}

void require_at(const Context& ctx, const geo::GeoPoint& actual,
                const geo::GeoPoint& expected) {
  double d = geo::haversine_m(actual, expected);
  if (d > ctx.config().location_tolerance_m) {
    throw Error(ErrorCode::kWrongLocation,
                std::to_string(static_cast<long long>(d)) + " m away");
  }
}

std::string register_user(Context& ctx) {
  ctx.require_args(1);
  StateKey key = user_key(ctx.caller());
  if (ctx.exists(key)) throw Error(ErrorCode::kAlreadyRegistered, ctx.caller().uid);
  // The salt is derived from the transaction id and the caller so that every
  // endorser computes the same bytes while no two users share a salt.
  std::string material = "rhsim/salt|" + ctx.inv().tx_id + "|" +
                         ctx.caller().msp.str() + "|" + ctx.caller().uid;
  std::string salt = digest_bytes(sha256(material)).substr(0, kSaltBytes);
  UserRecord user;
  user.pw_salt = to_hex(salt);
  user.pw_hash = password_hash(user.pw_salt, ctx.arg(0));
  user.role = Role::kRider;
  ctx.put(key, user.encode());
  return key.str();
}

std::string unregister_user(Context& ctx) {
  ctx.require_args(0);
  ctx.require_caller_user();
  if (ctx.exists(ride_request_key(ctx.caller()))) {
    throw Error(ErrorCode::kRideInProgress, ctx.caller().uid);
  }
  ctx.del(user_key(ctx.caller()));
  return "";
}

std::string upgrade_to_driver(Context& ctx) {
  ctx.require_args(0);
  UserRecord user = ctx.require_caller_user();
  if (user.role == Role::kDriver) throw Error(ErrorCode::kAlreadyDriver, ctx.caller().uid);
  user.role = Role::kDriver;
  ctx.put(user_key(ctx.caller()), user.encode());
  return "";
}

std::string request_ride(Context& ctx) {
  ctx.require_args(1);
  geo::GeoPoint pickup = point_or_throw(ctx.arg(0));
  ctx.require_caller_user();
  StateKey key = ride_request_key(ctx.caller());
  if (ctx.exists(key)) throw Error(ErrorCode::kRideAlreadyActive, key.str());
  RideRecord ride;
  ride.ride_id = ride_id_for(ctx.caller().uid);
  ride.status = RideStatus::kRequested;
  ride.pickup_loc = pickup;
  ctx.put(key, ride.encode());
  ctx.emit(EventName::kRideRequested, key, ride.ride_id);
  return key.str();
}

std::string accept_ride(Context& ctx) {
  ctx.require_args(1);
  StateKey key = ride_key_arg(ctx.arg(0));
  UserRecord user = ctx.require_caller_user();
  if (user.role != Role::kDriver) throw Error(ErrorCode::kNotADriver, ctx.caller().uid);
  RideRecord ride = ctx.require_ride(key);
  if (ride.status != RideStatus::kRequested) {
    throw Error(ErrorCode::kAlreadyAccepted, key.str());
  }
  ride.driver_id = ride_id_for(ctx.caller().uid);
  ride.driver_msp = ctx.caller().msp.str();
  ride.status = RideStatus::kAccepted;
  ctx.put(key, ride.encode());
  ctx.emit(EventName::kRideAccepted, key, ride.ride_id);
  return "";
}

std::string set_ride_destination(Context& ctx) {
  ctx.require_args(2);
  StateKey key = ride_key_arg(ctx.arg(0));
  geo::GeoPoint dest = point_or_throw(ctx.arg(1));
  if (!owned_by(key, ctx.caller())) throw Error(ErrorCode::kNotOwner, key.str());
  RideRecord ride = ctx.require_ride(key);
  // Only after acceptance, so drivers cannot pick rides by destination.
  if (ride.status != RideStatus::kAccepted) {
    throw Error(ErrorCode::kWrongStatus, std::string(to_string(ride.status)));
  }
  if (ride.dropoff_loc) throw Error(ErrorCode::kFieldAlreadySet, "dropoff_loc");
  ride.dropoff_loc = dest;
  ctx.put(key, ride.encode());
  return "";
}

std::string pickup_rider(Context& ctx) {
  ctx.require_args(2);
  StateKey key = ride_key_arg(ctx.arg(0));
  geo::GeoPoint here = point_or_throw(ctx.arg(1));
  RideRecord ride = ctx.require_ride(key);
  if (!is_assigned_driver(ride, ctx.caller())) {
    throw Error(ErrorCode::kNotAssignedDriver, key.str());
  }
  if (ride.status != RideStatus::kAccepted || ride.pickup_time) {
    throw Error(ErrorCode::kRideNotOngoing, key.str());
  }
  require_at(ctx, here, ride.pickup_loc);
  ride.pickup_time = ctx.now().text();
  ctx.put(key, ride.encode());
  ctx.emit(EventName::kDriverArrived, key, ride.ride_id);
  return "";
}

std::string set_corider_information(Context& ctx) {
  ctx.require_args(4);
  StateKey key = ride_key_arg(ctx.arg(0));
  const std::string& co_rider_id = ctx.arg(1);
  CoRiderEvent event;
  if (ctx.arg(2) == "Pickup") {
    event = CoRiderEvent::kPickup;
  } else if (ctx.arg(2) == "Dropoff") {
    event = CoRiderEvent::kDropoff;
  } else {
    throw Error(ErrorCode::kBadArguments, "event must be Pickup or Dropoff");
  }
  geo::GeoPoint loc = point_or_throw(ctx.arg(3));
  if (co_rider_id.size() <= 3 || co_rider_id.rfind("ID-", 0) != 0 ||
      !is_base64url(std::string_view(co_rider_id).substr(3))) {
    throw Error(ErrorCode::kBadArguments, "bad co-rider id '" + co_rider_id + "'");
  }

  RideRecord ride = ctx.require_ride(key);
  if (!is_assigned_driver(ride, ctx.caller())) {
    throw Error(ErrorCode::kNotAssignedDriver, key.str());
  }
  if (co_rider_id == ride.ride_id) {
    throw Error(ErrorCode::kBadArguments, "a rider is not their own co-rider");
  }
  // The observer only learns what happened while they were in the vehicle.
  bool onboard = ride.status == RideStatus::kAccepted && ride.pickup_time &&
                 !ride.dropoff_time;
  if (!onboard) throw Error(ErrorCode::kObserverNotPresent, key.str());
  if (ride.co_rider_id && *ride.co_rider_id != co_rider_id) {
    throw Error(ErrorCode::kFieldAlreadySet, "co_rider_id");
  }
  auto& field = event == CoRiderEvent::kPickup ? ride.co_rider_pickup_loc
                                               : ride.co_rider_dropoff_loc;
  if (field) {
    throw Error(ErrorCode::kFieldAlreadySet, event == CoRiderEvent::kPickup
                                                 ? "co_rider_pickup_loc"
                                                 : "co_rider_dropoff_loc");
  }
  ride.co_rider_id = co_rider_id;
  field = loc;
  ctx.put(key, ride.encode());
  return "";
}

std::string dropoff_rider(Context& ctx) {
  ctx.require_args(2);
  StateKey key = ride_key_arg(ctx.arg(0));
  geo::GeoPoint here = point_or_throw(ctx.arg(1));
  RideRecord ride = ctx.require_ride(key);
  if (!is_assigned_driver(ride, ctx.caller())) {
    throw Error(ErrorCode::kNotAssignedDriver, key.str());
  }
  if (ride.status != RideStatus::kAccepted) {
    throw Error(ErrorCode::kRideNotOngoing, key.str());
  }
  if (!ride.pickup_time) throw Error(ErrorCode::kNotPickedUp, key.str());
  if (!ride.dropoff_loc) throw Error(ErrorCode::kNoDestination, key.str());
  require_at(ctx, here, *ride.dropoff_loc);
  RideTime now = ctx.now();
  auto picked = RideTime::parse(*ride.pickup_time);
  if (!picked || now < *picked) {
    throw Error(ErrorCode::kInvalidTimestamp, "dropoff before pickup");
  }
  UserRecord driver = ctx.require_caller_user();
  StateKey archive = permanent_ride_key(ctx.caller(), now.text());
  if (ctx.exists(archive)) throw Error(ErrorCode::kPermanentRideExists, archive.str());

  ride.dropoff_time = now.text();
  ride.status = RideStatus::kCompleted;
  std::string bytes = ride.encode();
  ctx.put(key, bytes);
  ctx.put(archive, bytes);
  driver.ride_keys.push_back(archive.str());
  ctx.put(user_key(ctx.caller()), driver.encode());
  ctx.emit(EventName::kRideEnding, key, ride.ride_id);
  return "";
}

std::string leave_driver(Context& ctx) {
  ctx.require_args(1);
  StateKey key = ride_key_arg(ctx.arg(0));
  if (!owned_by(key, ctx.caller())) throw Error(ErrorCode::kNotOwner, key.str());
  RideRecord ride = ctx.require_ride(key);
  if (ride.status != RideStatus::kCompleted || !ride.dropoff_time) {
    throw Error(ErrorCode::kRideNotCompleted, key.str());
  }
  UserRecord rider = ctx.require_caller_user();
  StateKey archive = permanent_ride_key(ctx.caller(), *ride.dropoff_time);
  if (ctx.exists(archive)) throw Error(ErrorCode::kPermanentRideExists, archive.str());

  ctx.put(archive, ride.encode());
  rider.ride_keys.push_back(archive.str());
  ctx.put(user_key(ctx.caller()), rider.encode());
  ctx.del(key);
  return archive.str();
}

std::string get_user_info(Context& ctx) {
  ctx.require_args(0);
  return ctx.require_caller_user().encode();
}

std::string authenticate(Context& ctx) {
  ctx.require_args(1);
  UserRecord user = ctx.require_caller_user();
  bool ok = equal_bytes(password_hash(user.pw_salt, ctx.arg(0)), user.pw_hash);
  return ok ? "true" : "false";
}

std::string get_ride(Context& ctx) {
  ctx.require_args(1);
  auto key = StateKey::parse(ctx.arg(0));
  if (!key || key->ns() == Namespace::kUser) {
    throw Error(ErrorCode::kBadArguments, "not a ride key '" + ctx.arg(0) + "'");
  }
  if (!owned_by(*key, ctx.caller())) throw Error(ErrorCode::kAccessDenied, key->str());
  auto ride = ctx.load_ride(*key);
  if (!ride) throw Error(ErrorCode::kRideNotFound, key->str());
  return ride->encode();
}

using Handler = std::string (*)(Context&);

struct Entry {
  std::string_view name;
  Handler handler;
  bool query;
};

constexpr Entry kFunctions[] = {
    {fn::kRegisterUser, register_user, false},
    {fn::kUnregisterUser, unregister_user, false},
    {fn::kUpgradeToDriver, upgrade_to_driver, false},
    {fn::kRequestRide, request_ride, false},
    {fn::kAcceptRide, accept_ride, false},
    {fn::kSetRideDestination, set_ride_destination, false},
    {fn::kPickupRider, pickup_rider, false},
    {fn::kSetCoRiderInformation, set_corider_information, false},
    {fn::kDropoffRider, dropoff_rider, false},
    {fn::kLeaveDriver, leave_driver, false},
    {fn::kGetUserInfo, get_user_info, true},
    {fn::kAuthenticate, authenticate, true},
    {fn::kGetRide, get_ride, true},
};

const Entry* find_function(std::string_view name) {
  for (const Entry& e : kFunctions) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

}  // namespace

const std::vector<std::string_view>& function_names() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> out;
    for (const Entry& e : kFunctions) out.push_back(e.name);
    return out;
  }();
  return names;
}

bool is_query_function(std::string_view name) {
  const Entry* e = find_function(name);
  return e != nullptr && e->query;
}

std::string_view to_string(RideStatus s) {
  switch (s) {
    case RideStatus::kRequested: return "Requested";
    case RideStatus::kAccepted: return "Accepted";
    case RideStatus::kCompleted: return "Completed";
  }
  return "";
}

std::string_view to_string(EventName e) {
  switch (e) {
    case EventName::kRideRequested: return "RideRequested";
    case EventName::kRideAccepted: return "RideAccepted";
    case EventName::kDriverArrived: return "DriverArrived";
    case EventName::kRideEnding: return "RideEnding";
  }
  return "";
}

std::optional<EventName> event_from_string(std::string_view name) {
  for (EventName e : {EventName::kRideRequested, EventName::kRideAccepted,
                      EventName::kDriverArrived, EventName::kRideEnding}) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

json RideEvent::to_json() const {
  return json{{"name", to_string(name)}, {"ride_id", ride_id}, {"ride_key", ride_key}};
}

RideEvent RideEvent::from_json(const json& j) {
  auto name = event_from_string(j.at("name").get<std::string>());
  if (!name) throw Error(ErrorCode::kUnknownEvent, j.at("name").get<std::string>());
  return RideEvent{*name, j.at("ride_key").get<std::string>(),
                   j.at("ride_id").get<std::string>()};
}

std::string UserRecord::encode() const {
  return json{{"pw_hash", pw_hash},
              {"pw_salt", pw_salt},
              {"ride_keys", ride_keys},
              {"role", identity::to_string(role)}}
      .dump();
}

UserRecord UserRecord::decode(std::string_view bytes) {
  json j = json::parse(bytes);
  UserRecord u;
  u.pw_hash = j.at("pw_hash").get<std::string>();
  u.pw_salt = j.at("pw_salt").get<std::string>();
  u.ride_keys = j.at("ride_keys").get<std::vector<std::string>>();
  auto role = identity::role_from_string(j.at("role").get<std::string>());
  if (!role) throw Error(ErrorCode::kBadArguments, "bad role");
  u.role = *role;
  return u;
}

std::string RideRecord::encode() const {
  json j{{"ride_id", ride_id},
         {"status", to_string(status)},
         {"pickup_loc", pickup_loc.to_string()}};
  set_opt(j, "driver_id", driver_id);
  set_opt(j, "driver_msp", driver_msp);
  set_opt(j, "dropoff_loc", dropoff_loc);
  set_opt(j, "pickup_time", pickup_time);
  set_opt(j, "dropoff_time", dropoff_time);
  set_opt(j, "co_rider_id", co_rider_id);
  set_opt(j, "co_rider_pickup_loc", co_rider_pickup_loc);
  set_opt(j, "co_rider_dropoff_loc", co_rider_dropoff_loc);
  return j.dump();
}

RideRecord RideRecord::decode(std::string_view bytes) {
  json j = json::parse(bytes);
  RideRecord r;
  r.ride_id = j.at("ride_id").get<std::string>();
  r.status = status_from_string(j.at("status").get<std::string>());
  r.pickup_loc = point_or_throw(j.at("pickup_loc").get<std::string>());
  r.driver_id = get_opt(j, "driver_id");
  r.driver_msp = get_opt(j, "driver_msp");
  r.dropoff_loc = get_opt_point(j, "dropoff_loc");
  r.pickup_time = get_opt(j, "pickup_time");
  r.dropoff_time = get_opt(j, "dropoff_time");
  r.co_rider_id = get_opt(j, "co_rider_id");
  r.co_rider_pickup_loc = get_opt_point(j, "co_rider_pickup_loc");
  r.co_rider_dropoff_loc = get_opt_point(j, "co_rider_dropoff_loc");
  return r;
}

std::string ride_id_for(std::string_view uid) { return "ID-" + std::string(uid); }

StateKey user_key(const Principal& who) {
  return StateKey::make(Namespace::kUser, {who.msp.str(), who.uid});
}

StateKey ride_request_key(const Principal& who) {
  return StateKey::make(Namespace::kRideRequest, {who.msp.str(), who.uid});
}

StateKey permanent_ride_key(const Principal& who, std::string_view dropoff_time) {
  return StateKey::make(Namespace::kRide,
                        {who.msp.str(), who.uid, std::string(dropoff_time)});
}

std::string password_hash(std::string_view salt_hex, std::string_view password) {
  std::string salted;
  for (std::size_t i = 0; i + 1 < salt_hex.size(); i += 2) {
    salted.push_back(static_cast<char>(
        std::stoi(std::string(salt_hex.substr(i, 2)), nullptr, 16)));
  }
  salted += password;
  return to_hex(sha256(salted));
}

InvokeResult RideHailChaincode::invoke(const Invocation& inv,
                                       ledger::TxSimulator& sim) const {
  const Entry* entry = find_function(inv.function);
  if (entry == nullptr) throw Error(ErrorCode::kUnknownFunction, inv.function);
  Context ctx(inv, sim, config_);
  InvokeResult result;
  result.response = entry->handler(ctx);
  result.event = ctx.take_event();
  return result;
}

}  // namespace rhsim::chaincode
