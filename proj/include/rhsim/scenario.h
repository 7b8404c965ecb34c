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

// Scripted runs through the full transaction flow.
//
// Script format:
//
//   {
//     "actors": {"R1": {"org": "Org2PeerOrg", "role": "Rider",
//                       "uid": "eDUwOT"}, ...},        // uid or "seed"
//     "locations": {"Greyhound": "36.15212/-86.7735"},
//     "start_time": "12/5/2018 12:00",
//     "steps": [
//       {"actor": "D1", "fn": "subscribe", "args": ["RideRequested"]},
//       {"actor": "R1", "fn": "requestRide", "args": ["@Airport"],
//        "expect_events": [{"actor": "D1", "event": "RideRequested"}]},
//       {"actor": "R1", "fn": "query", "args": ["{R1.ride_key}"],
//        "capture": "r1_temporal"},
//       ...
//     ],
//     "assertions": [
//       {"type": "permanent_ride", "actor": "R1",
//        "field": "co_rider_pickup_loc", "equals": "@Greyhound"},
//       {"type": "permanent_ride", "actor": "R1",
//        "field": "co_rider_dropoff_loc", "absent": true},
//       {"type": "capture", "name": "r1_temporal", "field": "status",
//        "equals": "Completed"},
//       {"type": "key_absent", "key": "{R1.ride_key}"},
//       {"type": "permanent_count", "equals": 4}
//     ]
//   }
//
// Arguments and expected values expand "{A.ride_key}", "{A.ride_id}",
// "{A.uid}", "{A.msp}" and "@Location". Steps run strictly in order, each
// waiting until its transaction has committed. Actors are registered (and
// drivers upgraded) before the first step.

#ifndef RHSIM_SCENARIO_H_
#define RHSIM_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rhsim/geo.h"
#include "rhsim/identity.h"
#include "rhsim/network.h"

namespace rhsim::scenario {

struct ActorSpec {
  std::string org;
  identity::Role role = identity::Role::kRider;
  std::optional<std::string> uid;
  std::uint64_t seed = 0;
};

struct ExpectedEvent {
  std::string actor;
  std::string event;
};

struct Step {
  std::string actor;
  std::string fn;
  std::vector<std::string> args;
  std::optional<std::string> time;
  std::vector<ExpectedEvent> expect_events;
  std::optional<std::string> expect_error;
  std::optional<std::string> capture;
};

struct Script {
  std::map<std::string, ActorSpec> actors;
  std::map<std::string, geo::GeoPoint> locations;
  std::string start_time = "12/5/2018 12:00";
  std::vector<Step> steps;
  std::vector<nlohmann::json> assertions;

  // Throws Error(kScenarioError) on structural problems.
  static Script from_json(const nlohmann::json& j);
  static Script load(const std::filesystem::path& path);
};

struct CheckResult {
  std::string what;
  bool passed = false;
  std::string detail;
};

struct ScenarioReport {
  // Index of the step that failed, if any; later steps did not run.
  std::optional<std::size_t> failed_step;
  std::string error;
  std::vector<CheckResult> checks;
  std::map<std::string, std::string> captures;
  std::vector<network::TxOutcome> outcomes;

  bool passed() const;
  nlohmann::json to_json() const;
};

// How a caller asks for ledger data.
enum class QueryPath {
  // Through a chaincode query function, as the caller.
  kChaincode,
  // Reading the world state without chaincode; never allowed.
  kDirectState,
};

// Returns the record stored under `key` when the gateway lets `who` see
// it: only chaincode-mediated reads of the caller's own user record or
// ride objects succeed. Anything else throws Error(kAccessDenied).
std::string query_as(network::FabricNetwork& net, network::ClientId client,
                     const identity::Credential& who, const std::string& key,
                     QueryPath path = QueryPath::kChaincode);

class Runner {
 public:
  Runner(const Script& script, network::FabricNetwork& net);

  // Enrolls and registers actors, runs the steps, evaluates assertions.
  ScenarioReport run();

  const identity::Credential& credential(const std::string& actor) const;
  std::string expand(const std::string& text) const;

 private:
  struct Actor {
    std::unique_ptr<identity::Credential> cred;
    network::ClientId client = 0;
    std::vector<network::EventDelivery> received;
  };

  void setup();
  bool run_step(std::size_t index, const Step& step, ScenarioReport& report);
  CheckResult check(const nlohmann::json& assertion, const ScenarioReport& report) const;
  Actor& actor(const std::string& name);
  const Actor& actor(const std::string& name) const;

  const Script& script_;
  network::FabricNetwork& net_;
  std::map<std::string, Actor> actors_;
  std::string last_time_;
};

// Loads, builds the network and runs.
ScenarioReport run_scenario(const Script& script, const config::NetworkConfig& config);

}  // namespace rhsim::scenario

#endif  // RHSIM_SCENARIO_H_
