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

// Network topology file:
//
//   {
//     "seed": 42,
//     "orgs": [{"name": "Org1PeerOrg", "peers": 2, "orderers": 1}, ...],
//     "policy": "ALL_ORG_PEERS" | "ANY_ONE" | "CROSS_ORG:1",
//     "ordering": {"batch_timeout_ms": 2000, "max_message_count": 10},
//     "profile": "server" | "pi" | {"endorse_service_ms": 2, ...},
//     "link_latency_ms": 1,
//     "chaincode": {"name": "ridehail", "version": "1.0"},
//     "location_tolerance_m": 150,
//     "submitters_per_org": 2
//   }
//
// Every key except "orgs" is optional.

#ifndef RHSIM_CONFIG_H_
#define RHSIM_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rhsim/chaincode.h"
#include "rhsim/netsim.h"
#include "rhsim/txflow.h"

namespace rhsim::config {

struct OrgSpec {
  std::string name;
  int peers = 2;
  int orderers = 1;
};

struct NetworkConfig {
  std::vector<OrgSpec> orgs;
  std::uint64_t seed = 0;
  txflow::EndorsementPolicy policy;
  txflow::OrderingConfig ordering;
  // Preset name, or "custom" for an explicit object.
  std::string profile_name = "server";
  netsim::NodeProfile profile;
  double link_latency_ms = 1.0;
  chaincode::ChaincodeConfig chaincode;
  int submitters_per_org = 2;

  // `orgs` organizations named Org1PeerOrg, Org2PeerOrg, ...
  static NetworkConfig uniform(int orgs, int peers_per_org);

  // Throws Error(kConfigError) with the offending key.
  static NetworkConfig from_json(const nlohmann::json& j);
  static NetworkConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  void validate() const;
  void set_profile(const std::string& preset);
};

// Reads a whole JSON file; Error(kConfigError) if missing or malformed.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace rhsim::config

#endif  // RHSIM_CONFIG_H_
