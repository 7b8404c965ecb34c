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

#include "rhsim/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "rhsim/error.h"

namespace rhsim::config {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kConfigError, what); }

double number(const json& j, const char* key) {
  if (!j.is_number()) bad(std::string(key) + " must be a number");
  double v = j.get<double>();
  if (v < 0) bad(std::string(key) + " must be non-negative");
  return v;
}

int positive_int(const json& j, const char* key) {
  if (!j.is_number_integer() || j.get<long long>() < 1) {
    bad(std::string(key) + " must be a positive integer");
  }
  return j.get<int>();
}

struct ProfileField {
  const char* key;
  double netsim::NodeProfile::*field;
};

constexpr ProfileField kProfileFields[] = {
    {"endorse_service_ms", &netsim::NodeProfile::endorse_service_ms},
    {"commit_service_ms_per_tx", &netsim::NodeProfile::commit_service_ms_per_tx},
    {"verify_ms_per_endorsement", &netsim::NodeProfile::verify_ms_per_endorsement},
    {"commit_service_ms_per_block", &netsim::NodeProfile::commit_service_ms_per_block},
    {"order_service_ms", &netsim::NodeProfile::order_service_ms},
    {"client_ms_per_message", &netsim::NodeProfile::client_ms_per_message},
};

}  // namespace

NetworkConfig NetworkConfig::uniform(int orgs, int peers_per_org) {
  NetworkConfig c;
  for (int i = 1; i <= orgs; ++i) {
    c.orgs.push_back(OrgSpec{"Org" + std::to_string(i) + "PeerOrg", peers_per_org, 1});
  }
  return c;
}

void NetworkConfig::set_profile(const std::string& preset) {
  profile = netsim::profile_preset(preset);
  profile_name = preset;
}

NetworkConfig NetworkConfig::from_json(const json& j) {
  if (!j.is_object()) bad("network config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "seed",    "orgs",      "policy",          "ordering",           "profile",
      "chaincode", "link_latency_ms", "location_tolerance_m", "submitters_per_org"};
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.contains(key)) bad("unknown key '" + key + "'");
  }

  NetworkConfig c;
  if (!j.contains("orgs") || !j["orgs"].is_array()) bad("orgs must be an array");
  for (const json& o : j["orgs"]) {
    if (!o.is_object() || !o.contains("name") || !o["name"].is_string()) {
      bad("each org needs a name");
    }
    OrgSpec spec{o["name"].get<std::string>(), 2, 1};
    if (o.contains("peers")) spec.peers = positive_int(o["peers"], "peers");
    if (o.contains("orderers")) spec.orderers = positive_int(o["orderers"], "orderers");
    c.orgs.push_back(std::move(spec));
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) bad("seed must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("policy")) {
    if (!j["policy"].is_string()) bad("policy must be a string");
    c.policy = txflow::EndorsementPolicy::parse(j["policy"].get<std::string>());
  }
  if (j.contains("ordering")) {
    const json& o = j["ordering"];
    if (o.contains("batch_timeout_ms")) {
      c.ordering.batch_timeout = netsim::from_ms(number(o["batch_timeout_ms"], "batch_timeout_ms"));
    }
    if (o.contains("max_message_count")) {
      c.ordering.max_message_count = positive_int(o["max_message_count"], "max_message_count");
    }
  }
  if (j.contains("profile")) {
    const json& p = j["profile"];
    if (p.is_string()) {
      c.set_profile(p.get<std::string>());
    } else if (p.is_object()) {
      c.profile_name = "custom";
      for (const auto& [key, value] : p.items()) {
        bool known = false;
        for (const ProfileField& f : kProfileFields) {
          if (key == f.key) {
            c.profile.*f.field = number(value, f.key);
            known = true;
          }
        }
        if (!known) bad("unknown profile key '" + key + "'");
      }
    } else {
      bad("profile must be a preset name or an object");
    }
  }
  if (j.contains("link_latency_ms")) c.link_latency_ms = number(j["link_latency_ms"], "link_latency_ms");
  if (j.contains("chaincode")) {
    const json& cc = j["chaincode"];
    if (cc.contains("name")) c.chaincode.id.name = cc["name"].get<std::string>();
    if (cc.contains("version")) c.chaincode.id.version = cc["version"].get<std::string>();
  }
  if (j.contains("location_tolerance_m")) {
    c.chaincode.location_tolerance_m = number(j["location_tolerance_m"], "location_tolerance_m");
  }
  if (j.contains("submitters_per_org")) {
    c.submitters_per_org = positive_int(j["submitters_per_org"], "submitters_per_org");
  }
  c.validate();
  return c;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json j = json::parse(buf.str(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) bad(path.string() + " is not valid JSON");
  return j;
}

NetworkConfig NetworkConfig::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path));
}

json NetworkConfig::to_json() const {
  json orgs_j = json::array();
  for (const OrgSpec& o : orgs) {
    orgs_j.push_back({{"name", o.name}, {"peers", o.peers}, {"orderers", o.orderers}});
  }
  // Presets go out by name so the output loads back as the same config.
  json profile_j = profile_name;
  if (profile_name == "custom") {
    profile_j = json::object();
    for (const ProfileField& f : kProfileFields) profile_j[f.key] = profile.*f.field;
  }
  return json{{"seed", seed},
              {"orgs", std::move(orgs_j)},
              {"policy", policy.to_string()},
              {"ordering",
               {{"batch_timeout_ms", netsim::to_ms(ordering.batch_timeout)},
                {"max_message_count", ordering.max_message_count}}},
              {"profile", std::move(profile_j)},
              {"link_latency_ms", link_latency_ms},
              {"chaincode", {{"name", chaincode.id.name}, {"version", chaincode.id.version}}},
              {"location_tolerance_m", chaincode.location_tolerance_m},
              {"submitters_per_org", submitters_per_org}};
}

void NetworkConfig::validate() const {
  if (orgs.empty()) bad("at least one org is required");
  std::set<std::string> names;
  for (const OrgSpec& o : orgs) {
    if (o.peers < 1) bad("org " + o.name + " needs at least one peer");
    if (o.orderers < 1) bad("org " + o.name + " needs at least one orderer");
    if (!names.insert(o.name).second) bad("duplicate org " + o.name);
  }
  ordering.validate();
  if (policy.kind() == txflow::EndorsementPolicy::Kind::kCrossOrg &&
      static_cast<std::size_t>(policy.k()) + 1 > orgs.size()) {
    bad("policy " + policy.to_string() + " needs more orgs than configured");
  }
  if (submitters_per_org < 1) bad("submitters_per_org must be positive");
}

}  // namespace rhsim::config
