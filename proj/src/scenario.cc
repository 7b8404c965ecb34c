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

#include "rhsim/scenario.h"

#include "rhsim/chaincode.h"
#include "rhsim/config.h"
#include "rhsim/error.h"
#include "rhsim/ledger.h"

namespace rhsim::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kScenarioError, what); }

std::string str_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) bad(std::string("missing string '") + key + "'");
  return j[key].get<std::string>();
}

}  // namespace

Script Script::from_json(const json& j) {
  if (!j.is_object()) bad("scenario must be a JSON object");
  Script s;
  if (!j.contains("actors") || !j["actors"].is_object()) bad("missing actors");
  for (const auto& [name, a] : j["actors"].items()) {
    ActorSpec spec;
    spec.org = str_field(a, "org");
    auto role = identity::role_from_string(str_field(a, "role"));
    if (!role || (*role != identity::Role::kRider && *role != identity::Role::kDriver)) {
      bad("actor " + name + ": role must be Rider or Driver");
    }
    spec.role = *role;
    if (a.contains("uid")) spec.uid = str_field(a, "uid");
    if (a.contains("seed")) spec.seed = a["seed"].get<std::uint64_t>();
    s.actors.emplace(name, std::move(spec));
  }
  if (j.contains("locations")) {
    for (const auto& [name, loc] : j["locations"].items()) {
      auto p = loc.is_string() ? geo::GeoPoint::parse(loc.get<std::string>()) : std::nullopt;
      if (!p) bad("location " + name + " is not lat/lon");
      s.locations.emplace(name, *p);
    }
  }
  if (j.contains("start_time")) s.start_time = str_field(j, "start_time");
  if (!j.contains("steps") || !j["steps"].is_array()) bad("missing steps");
  for (const json& st : j["steps"]) {
    Step step;
    step.actor = str_field(st, "actor");
    step.fn = str_field(st, "fn");
    if (!s.actors.contains(step.actor)) bad("unknown actor " + step.actor);
    if (st.contains("args")) step.args = st["args"].get<std::vector<std::string>>();
    if (st.contains("time")) step.time = str_field(st, "time");
    if (st.contains("expect_error")) step.expect_error = str_field(st, "expect_error");
    if (st.contains("capture")) step.capture = str_field(st, "capture");
    if (st.contains("expect_events")) {
      for (const json& e : st["expect_events"]) {
        ExpectedEvent ev{str_field(e, "actor"), str_field(e, "event")};
        if (!s.actors.contains(ev.actor)) bad("unknown actor " + ev.actor);
        step.expect_events.push_back(std::move(ev));
      }
    }
    s.steps.push_back(std::move(step));
  }
  if (j.contains("assertions")) {
    for (const json& a : j["assertions"]) s.assertions.push_back(a);
  }
  return s;
}

Script Script::load(const std::filesystem::path& path) {
  json j;
  try {
    j = config::read_json_file(path);
  } catch (const Error& e) {
    bad(e.what());
  }
  return from_json(j);
}

bool ScenarioReport::passed() const {
  if (failed_step) return false;
  for (const CheckResult& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

json ScenarioReport::to_json() const {
  json checks_j = json::array();
  for (const CheckResult& c : checks) {
    checks_j.push_back({{"what", c.what}, {"passed", c.passed}, {"detail", c.detail}});
  }
  json steps = json::array();
  for (const network::TxOutcome& o : outcomes) {
    steps.push_back({{"fn", o.function},
                     {"tx_id", o.tx_id},
                     {"status", network::to_string(o.status)},
                     {"block_height", o.block_height}});
  }
  return json{{"passed", passed()},
              {"failed_step", failed_step ? json(*failed_step) : json(nullptr)},
              {"error", error},
              {"checks", std::move(checks_j)},
              {"captures", captures},
              {"transactions", std::move(steps)}};
}

std::string query_as(network::FabricNetwork& net, network::ClientId client,
                     const identity::Credential& who, const std::string& key, QueryPath path) {
  if (path == QueryPath::kDirectState) {
    throw Error(ErrorCode::kAccessDenied, "world state is readable only through chaincode");
  }
  auto parsed = ledger::StateKey::parse(key);
  if (!parsed) throw Error(ErrorCode::kAccessDenied, "not a ledger key");
  std::string fn;
  std::vector<std::string> args;
  if (parsed->ns() == ledger::Namespace::kUser) {
    // getUserInfo takes no key: it can only ever return the caller's record.
    if (*parsed != chaincode::user_key(who.principal())) {
      throw Error(ErrorCode::kAccessDenied, key);
    }
    fn = chaincode::fn::kGetUserInfo;
  } else {
    fn = chaincode::fn::kGetRide;
    args.push_back(key);
  }
  txflow::Endorsement e = net.evaluate(client, who, std::move(fn), std::move(args), "");
  if (!e.accepted()) {
    auto code = error_code_from_string(e.payload.error);
    throw Error(code.value_or(ErrorCode::kAccessDenied), e.payload.response);
  }
  return e.payload.response;
}

Runner::Runner(const Script& script, network::FabricNetwork& net)
    : script_(script), net_(net), last_time_(script.start_time) {}

Runner::Actor& Runner::actor(const std::string& name) {
  auto it = actors_.find(name);
  if (it == actors_.end()) bad("unknown actor " + name);
  return it->second;
}

const Runner::Actor& Runner::actor(const std::string& name) const {
  auto it = actors_.find(name);
  if (it == actors_.end()) bad("unknown actor " + name);
  return it->second;
}

const identity::Credential& Runner::credential(const std::string& name) const {
  return *actor(name).cred;
}

std::string Runner::expand(const std::string& text) const {
  if (!text.empty() && text.front() == '@') {
    auto it = script_.locations.find(text.substr(1));
    if (it == script_.locations.end()) bad("unknown location " + text);
    return it->second.to_string();
  }
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t open = text.find('{', pos);
    if (open == std::string::npos) break;
    std::size_t close = text.find('}', open);
    std::size_t dot = text.find('.', open);
    if (close == std::string::npos || dot == std::string::npos || dot > close) break;
    out += text.substr(pos, open - pos);
    const std::string who = text.substr(open + 1, dot - open - 1);
    const std::string field = text.substr(dot + 1, close - dot - 1);
    identity::Principal p = credential(who).principal();
    if (field == "ride_key") {
      out += chaincode::ride_request_key(p).str();
    } else if (field == "ride_id") {
      out += chaincode::ride_id_for(p.uid);
    } else if (field == "uid") {
      out += p.uid;
    } else if (field == "msp") {
      out += p.msp.str();
    } else {
      bad("unknown placeholder field " + field);
    }
    pos = close + 1;
  }
  out += text.substr(pos);
  return out;
}

void Runner::setup() {
  identity::Registry& reg = net_.registry();
  for (const auto& [name, spec] : script_.actors) {
    identity::MspId msp = identity::msp_for_org(spec.org);
    if (reg.find_org(msp) == nullptr) bad("actor " + name + ": org " + spec.org + " not in network");
    identity::Credential cred = spec.uid ? reg.import_identity(msp, spec.role, *spec.uid, spec.seed)
                                         : reg.enroll_identity(msp, spec.role, spec.seed);
    Actor a;
    a.cred = std::make_unique<identity::Credential>(std::move(cred));
    a.client = net_.add_client(name, msp);
    actors_.emplace(name, std::move(a));
  }
  std::vector<network::FabricNetwork::Call> reg_calls;
  std::vector<network::FabricNetwork::Call> upgrades;
  for (const auto& [name, spec] : script_.actors) {
    const identity::Credential* cred = actors_.at(name).cred.get();
    reg_calls.push_back({cred, std::string(chaincode::fn::kRegisterUser), {"pw-" + name},
                         script_.start_time});
    if (spec.role == identity::Role::kDriver) {
      upgrades.push_back({cred, std::string(chaincode::fn::kUpgradeToDriver), {},
                          script_.start_time});
    }
  }
  for (const auto* batch : {&reg_calls, &upgrades}) {
    for (const network::TxOutcome& o : net_.bootstrap(*batch)) {
      if (o.status != network::TxStatus::kValid) {
        bad("setup " + o.function + " failed: " + o.detail);
      }
    }
  }
}

bool Runner::run_step(std::size_t index, const Step& step, ScenarioReport& report) {
  Actor& a = actor(step.actor);
  std::vector<std::string> args;
  for (const std::string& arg : step.args) args.push_back(expand(arg));
  auto fail = [&](const std::string& why) {
    report.failed_step = index;
    report.error = "step " + std::to_string(index) + " (" + step.actor + " " + step.fn +
                   "): " + why;
    return false;
  };

  if (step.fn == "subscribe") {
    for (const std::string& name : args) {
      try {
        net_.subscribe(a.client, name, [&a](const network::EventDelivery& d) {
          a.received.push_back(d);
        });
      } catch (const Error& e) {
        return fail(e.what());
      }
    }
    return true;
  }

  if (step.fn == "query" || step.fn == "query_direct") {
    if (args.size() != 1) return fail("query takes one key");
    const QueryPath path = step.fn == "query" ? QueryPath::kChaincode : QueryPath::kDirectState;
    try {
      std::string value = query_as(net_, a.client, *a.cred, args[0], path);
      if (step.expect_error) return fail("expected " + *step.expect_error + ", got a record");
      if (step.capture) report.captures[*step.capture] = value;
    } catch (const Error& e) {
      if (!step.expect_error || to_string(e.code()) != *step.expect_error) return fail(e.what());
    }
    return true;
  }

  if (step.time) last_time_ = *step.time;
  std::optional<network::TxOutcome> outcome;
  net_.submit(a.client, *a.cred, step.fn, std::move(args), last_time_,
              [&outcome](const network::TxOutcome& o) { outcome = o; });
  net_.scheduler().run();
  if (!outcome) return fail("transaction never completed");
  report.outcomes.push_back(*outcome);

  if (step.expect_error) {
    if (outcome->status != network::TxStatus::kPolicyUnsatisfied ||
        outcome->chaincode_error != *step.expect_error) {
      return fail("expected " + *step.expect_error + ", got " +
                  std::string(network::to_string(outcome->status)) + " " +
                  outcome->chaincode_error);
    }
    return true;
  }
  if (outcome->status != network::TxStatus::kValid) {
    return fail(std::string(network::to_string(outcome->status)) + ": " + outcome->detail);
  }
  if (step.capture) report.captures[*step.capture] = outcome->response;
  for (const ExpectedEvent& ev : step.expect_events) {
    const Actor& listener = actor(ev.actor);
    int seen = 0;
    for (const network::EventDelivery& d : listener.received) {
      if (d.tx_id == outcome->tx_id && chaincode::to_string(d.event.name) == ev.event) ++seen;
    }
    if (seen != 1) {
      return fail(ev.actor + " received " + ev.event + " " + std::to_string(seen) + " times");
    }
  }
  return true;
}

CheckResult Runner::check(const json& as, const ScenarioReport& report) const {
  CheckResult r;
  r.what = as.dump();
  const ledger::WorldState& state = net_.peer(0).ledger().state();
  const std::string type = as.value("type", "");

  // Compares one field of a JSON record against "equals" or "absent".
  auto field_check = [&](const std::string& record) {
    json rec = json::parse(record, nullptr, false);
    if (rec.is_discarded()) {
      r.detail = "record is not JSON";
      return;
    }
    const std::string field = as.at("field").get<std::string>();
    if (as.value("absent", false)) {
      r.passed = !rec.contains(field);
      if (!r.passed) r.detail = field + " = " + rec[field].dump();
      return;
    }
    const std::string want = expand(as.at("equals").get<std::string>());
    if (!rec.contains(field)) {
      r.detail = field + " absent, want " + want;
      return;
    }
    const std::string got = rec[field].is_string() ? rec[field].get<std::string>() : rec[field].dump();
    r.passed = got == want;
    if (!r.passed) r.detail = field + " = " + got + ", want " + want;
  };

  if (type == "permanent_ride") {
    const identity::Principal who = credential(as.at("actor").get<std::string>()).principal();
    const ledger::VersionedValue* user = state.get(chaincode::user_key(who).str());
    if (user == nullptr) {
      r.detail = "no user record";
      return r;
    }
    const auto keys = chaincode::UserRecord::decode(user->bytes).ride_keys;
    const std::size_t idx = as.value("index", 0u);
    if (idx >= keys.size()) {
      r.detail = "actor has " + std::to_string(keys.size()) + " permanent ride(s)";
      return r;
    }
    const ledger::VersionedValue* ride = state.get(keys[idx]);
    if (ride == nullptr) {
      r.detail = "missing " + keys[idx];
      return r;
    }
    field_check(ride->bytes);
  } else if (type == "capture") {
    auto it = report.captures.find(as.at("name").get<std::string>());
    if (it == report.captures.end()) {
      r.detail = "nothing captured";
      return r;
    }
    field_check(it->second);
  } else if (type == "key_absent") {
    const std::string key = expand(as.at("key").get<std::string>());
    r.passed = state.get(key) == nullptr;
    if (!r.passed) r.detail = key + " still present";
  } else if (type == "permanent_count") {
    std::size_t n = 0;
    for (const auto& [key, _] : state.entries()) {
      auto k = ledger::StateKey::parse(key);
      if (k && k->ns() == ledger::Namespace::kRide) ++n;
    }
    r.passed = n == as.at("equals").get<std::size_t>();
    r.detail = std::to_string(n) + " permanent ride(s)";
  } else {
    r.detail = "unknown assertion type '" + type + "'";
  }
  return r;
}

ScenarioReport Runner::run() {
  ScenarioReport report;
  try {
    setup();
  } catch (const Error& e) {
    report.failed_step = 0;
    report.error = std::string("setup: ") + e.what();
    return report;
  }
  for (std::size_t i = 0; i < script_.steps.size(); ++i) {
    bool ok = false;
    try {
      ok = run_step(i, script_.steps[i], report);
    } catch (const Error& e) {
      report.failed_step = i;
      report.error = "step " + std::to_string(i) + ": " + e.what();
    }
    if (!ok) return report;
  }
  for (const json& as : script_.assertions) {
    try {
      report.checks.push_back(check(as, report));
    } catch (const std::exception& e) {
      report.checks.push_back(CheckResult{as.dump(), false, e.what()});
    }
  }
  // Every peer must have reached the same state and chain tip.
  CheckResult agree{"peers agree on state and chain", true, ""};
  const std::string ref_state = net_.peer(0).ledger().state().dump();
  for (std::size_t i = 1; i < net_.peer_count(); ++i) {
    if (net_.peer(i).ledger().state().dump() != ref_state ||
        net_.peer(i).ledger().tip_hash() != net_.peer(0).ledger().tip_hash()) {
      agree.passed = false;
      agree.detail = "peer " + std::to_string(i) + " differs";
    }
  }
  report.checks.push_back(std::move(agree));
  return report;
}

ScenarioReport run_scenario(const Script& script, const config::NetworkConfig& config) {
  network::FabricNetwork net(config);
  Runner runner(script, net);
  return runner.run();
}

}  // namespace rhsim::scenario
