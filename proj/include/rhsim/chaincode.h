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

// The ride-hailing chaincode.
//
// Every function is a pure transition of (snapshot, caller, args, now). The
// caller comes from the verified proposal signature, never from arguments, so
// all keys a function touches are derived from the caller's own (msp, uid)
// except the ride objects a driver has been assigned to.
//
// Ledger layout:
//   User~{msp}~{uid}                    UserRecord
//   RideRequest~{msp}~{uid}             RideRecord (temporal, one per rider)
//   Ride~{msp}~{uid}~{dropoff time}     RideRecord (permanent copy)

#ifndef RHSIM_CHAINCODE_H_
#define RHSIM_CHAINCODE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rhsim/geo.h"
#include "rhsim/identity.h"
#include "rhsim/ledger.h"

namespace rhsim::chaincode {

struct ChaincodeId {
  std::string name = "ridehail";
  std::string version = "1.0";

  bool operator==(const ChaincodeId&) const = default;
};

struct ChaincodeConfig {
  ChaincodeId id;
  // Maximum haversine distance between a driver and the pickup / dropoff
  // point for the driver to count as being there.
  double location_tolerance_m = 150.0;
};

// Function names as they appear in proposals.
namespace fn {
inline constexpr std::string_view kRegisterUser = "registerUser";
inline constexpr std::string_view kUnregisterUser = "unregisterUser";
inline constexpr std::string_view kUpgradeToDriver = "upgradeToDriver";
inline constexpr std::string_view kRequestRide = "requestRide";
inline constexpr std::string_view kAcceptRide = "acceptRide";
inline constexpr std::string_view kSetRideDestination = "setRideDestination";
inline constexpr std::string_view kPickupRider = "pickupRider";
inline constexpr std::string_view kSetCoRiderInformation = "setCoRiderInformation";
inline constexpr std::string_view kDropoffRider = "dropoffRider";
inline constexpr std::string_view kLeaveDriver = "leaveDriver";
inline constexpr std::string_view kGetUserInfo = "getUserInfo";
inline constexpr std::string_view kAuthenticate = "authenticate";
inline constexpr std::string_view kGetRide = "getRide";
}  // namespace fn

// All invocable function names, in declaration order.
const std::vector<std::string_view>& function_names();
// Functions that never write (evaluated, not ordered, by gateways).
bool is_query_function(std::string_view name);

enum class RideStatus { kRequested, kAccepted, kCompleted };
std::string_view to_string(RideStatus s);

enum class EventName { kRideRequested, kRideAccepted, kDriverArrived, kRideEnding };
std::string_view to_string(EventName e);
std::optional<EventName> event_from_string(std::string_view name);

struct RideEvent {
  EventName name = EventName::kRideRequested;
  std::string ride_key;
  std::string ride_id;

  nlohmann::json to_json() const;
  static RideEvent from_json(const nlohmann::json& j);
  bool operator==(const RideEvent&) const = default;
};

struct UserRecord {
  std::string pw_hash;  // hex
  std::string pw_salt;  // hex
  identity::Role role = identity::Role::kRider;
  std::vector<std::string> ride_keys;

  std::string encode() const;
  static UserRecord decode(std::string_view bytes);
  bool operator==(const UserRecord&) const = default;
};

// Temporal ride request and permanent ride share this layout; absent
// optionals are omitted from the encoding.
struct RideRecord {
  std::string ride_id;
  std::optional<std::string> driver_id;
  std::optional<std::string> driver_msp;
  RideStatus status = RideStatus::kRequested;
  geo::GeoPoint pickup_loc;
  std::optional<geo::GeoPoint> dropoff_loc;
  std::optional<std::string> pickup_time;
  std::optional<std::string> dropoff_time;
  std::optional<std::string> co_rider_id;
  std::optional<geo::GeoPoint> co_rider_pickup_loc;
  std::optional<geo::GeoPoint> co_rider_dropoff_loc;

  std::string encode() const;
  static RideRecord decode(std::string_view bytes);
  bool operator==(const RideRecord&) const = default;
};

enum class CoRiderEvent { kPickup, kDropoff };

// "ID-{uid}"
std::string ride_id_for(std::string_view uid);
ledger::StateKey user_key(const identity::Principal& who);
ledger::StateKey ride_request_key(const identity::Principal& who);
ledger::StateKey permanent_ride_key(const identity::Principal& who,
                                    std::string_view dropoff_time);

// hex(sha256(salt || password)) with a hex-encoded salt.
std::string password_hash(std::string_view salt_hex, std::string_view password);

struct Caller {
  identity::MspId msp;
  std::string uid;

  identity::Principal principal() const { return {msp, uid}; }
};

struct Invocation {
  Caller caller;
  std::string tx_id;
  std::string function;
  std::vector<std::string> args;
  // Client-supplied "M/D/YYYY HH:MM"; only functions that stamp a time
  // parse it.
  std::string now;
};

struct InvokeResult {
  std::string response;
  std::optional<RideEvent> event;
};

class RideHailChaincode {
 public:
  RideHailChaincode() = default;
  explicit RideHailChaincode(ChaincodeConfig config) : config_(std::move(config)) {}

  const ChaincodeConfig& config() const noexcept { return config_; }

  // Dispatches `inv.function`. Throws Error with a chaincode ErrorCode on
  // any precondition failure; nothing is written in that case because the
  // simulator's rwset is discarded.
  InvokeResult invoke(const Invocation& inv, ledger::TxSimulator& sim) const;

 private:
  ChaincodeConfig config_;
};

}  // namespace rhsim::chaincode

#endif  // RHSIM_CHAINCODE_H_
