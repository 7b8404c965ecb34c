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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Everything runs in virtual time from fixed seeds.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "properties.h"
#include "rhsim/chaincode.h"
#include "rhsim/config.h"
#include "rhsim/error.h"
#include "rhsim/network.h"
#include "rhsim/scenario.h"
#include "rhsim/workload.h"
#include "test_util.h"

namespace rhsim::acceptance {
namespace {

using config::NetworkConfig;

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fmt(double v, int prec = 2) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(prec);
  o << v;
  return o.str();
}

std::string series(const std::vector<double>& xs) {
  std::string out;
  for (double x : xs) out += (out.empty() ? "" : " ") + fmt(x);
  return out;
}

// Average ranks, ties share the mean rank.
std::vector<double> ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = (i + j) / 2.0 + 1;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx == 0 || syy == 0 ? 0 : sxy / std::sqrt(sxx * syy);
}

workload::BenchOptions constant_rate(std::size_t rides, double delay_ms, std::uint64_t seed) {
  workload::BenchOptions o;
  o.rides = rides;
  o.seed = seed;
  o.traffic = workload::TrafficProfile::constant(delay_ms, 0.3);
  return o;
}

std::string field(const std::optional<std::string>& v) { return v ? *v : "<absent>"; }
std::string field(const std::optional<geo::GeoPoint>& v) {
  return v ? v->to_string() : "<absent>";
}

Verdict shared_ride() {
  Verdict v;
  auto script = scenario::Script::load(testing::fixture("shared_ride.json"));
  auto report = scenario::run_scenario(script, NetworkConfig::load(testing::fixture("net2x2.json")));
  v.require(!report.failed_step, "scenario stopped: " + report.error);
  v.require(report.captures.count("r1_completed") == 1, "no pre-deletion capture");
  if (!v.ok) return v;
  const chaincode::RideRecord r = chaincode::RideRecord::decode(report.captures.at("r1_completed"));
  const std::vector<std::pair<std::string, std::pair<std::string, std::string>>> want = {
      {"ride_id", {r.ride_id, "ID-eDUwOT"}},
      {"driver_id", {field(r.driver_id), "ID-06Q049V"}},
      {"status", {std::string(chaincode::to_string(r.status)), "Completed"}},
      {"pickup_loc", {r.pickup_loc.to_string(), "36.1452/-85.4969"}},
      {"dropoff_loc", {field(r.dropoff_loc), "36.17488/-85.5089"}},
      {"pickup_time", {field(r.pickup_time), "12/5/2018 12:34"}},
      {"dropoff_time", {field(r.dropoff_time), "12/5/2018 12:36"}},
      {"co_rider_id", {field(r.co_rider_id), "ID-XNIcjF"}},
      {"co_rider_pickup_loc", {field(r.co_rider_pickup_loc), "36.15395/-85.5138"}},
      {"co_rider_dropoff_loc", {field(r.co_rider_dropoff_loc), "<absent>"}},
  };
  for (const auto& [name, pair] : want) {
    v.require(pair.first == pair.second, name + " is " + pair.first + ", expected " + pair.second);
  }
  v.require(report.passed(), "fixture assertions failed");
  if (v.ok) v.detail = "all 10 fields match; temporal key deleted after leaveDriver";
  return v;
}

Verdict nashville() {
  Verdict v;
  auto script = scenario::Script::load(testing::fixture("nashville.json"));
  network::FabricNetwork net(NetworkConfig::load(testing::fixture("net2x2.json")));
  scenario::Runner runner(script, net);
  scenario::ScenarioReport report = runner.run();
  v.require(!report.failed_step, "scenario stopped: " + report.error);
  if (!v.ok) return v;

  // Read the permanent copies straight from a peer's world state.
  const ledger::WorldState& state = net.peer(0).ledger().state();
  auto permanent = [&](const std::string& actor) -> std::optional<chaincode::RideRecord> {
    const auto* u = state.get(chaincode::user_key(runner.credential(actor).principal()).str());
    if (!u) return std::nullopt;
    auto user = chaincode::UserRecord::decode(u->bytes);
    if (user.ride_keys.size() != 1) return std::nullopt;
    const auto* ride = state.get(user.ride_keys[0]);
    if (!ride) return std::nullopt;
    return chaincode::RideRecord::decode(ride->bytes);
  };
  auto r1 = permanent("R1");
  auto r2 = permanent("R2");
  v.require(r1 && r2, "permanent rides missing");
  if (!v.ok) return v;
  const std::string greyhound = script.locations.at("Greyhound").to_string();
  const std::string nissan = script.locations.at("Nissan").to_string();
  v.require(field(r1->co_rider_pickup_loc) == greyhound,
            "R1 co-rider pickup " + field(r1->co_rider_pickup_loc));
  v.require(!r1->co_rider_dropoff_loc, "R1 holds R2's dropoff");
  v.require(field(r2->co_rider_dropoff_loc) == nissan,
            "R2 co-rider dropoff " + field(r2->co_rider_dropoff_loc));
  v.require(!r2->co_rider_pickup_loc, "R2 holds R1's pickup");
  v.require(report.passed(), "fixture assertions failed");
  if (v.ok) {
    v.detail = "R1 sees R2 pickup " + greyhound + " only; R2 sees R1 dropoff " + nissan + " only";
  }
  return v;
}

Verdict lossless() {
  Verdict v;
  auto r = workload::run_bench(NetworkConfig::uniform(2, 2), constant_rate(1000, 100, 1));
  v.require(r.samples.size() == 6000, std::to_string(r.samples.size()) + " txs submitted");
  v.require(r.valid == 6000, std::to_string(r.valid) + " valid commits");
  v.require(r.events_missing == 0 && r.events_duplicated == 0,
            std::to_string(r.events_missing) + " events missing, " +
                std::to_string(r.events_duplicated) + " duplicated");
  v.require(r.lossless(), "report not lossless");
  if (v.ok) {
    v.detail = "6000/6000 valid, " + std::to_string(r.events_delivered) + "/" +
               std::to_string(r.events_expected) + " events exactly once";
  }
  return v;
}

Verdict delay_trend() {
  Verdict v;
  const std::vector<double> delays = {100, 200, 300, 400, 500};
  std::vector<double> ev, peer, ord;
  for (double d : delays) {
    auto r = workload::run_bench(NetworkConfig::uniform(2, 2), constant_rate(300, d, 1));
    v.require(r.lossless(), "delay " + fmt(d, 0) + " lost transactions");
    ev.push_back(r.overall.event_ms);
    peer.push_back(r.overall.peer_ms);
    ord.push_back(r.overall.orderer_ms);
  }
  const double rho = spearman(delays, ev);
  v.require(rho >= 0.9, "event latency rho " + fmt(rho, 3));
  for (std::size_t i = 1; i < delays.size(); ++i) {
    v.require(peer[i] <= peer[i - 1] * 1.05, "peer latency rose at " + fmt(delays[i], 0));
    v.require(ord[i] <= ord[i - 1] * 1.05, "orderer latency rose at " + fmt(delays[i], 0));
  }
  v.detail = (v.ok ? "" : v.detail + "; ") + "event " + series(ev) + " (rho " + fmt(rho, 3) +
             "), peer " + series(peer) + ", orderer " + series(ord);
  return v;
}

std::vector<double> peer_sweep(const txflow::EndorsementPolicy& policy) {
  NetworkConfig base = NetworkConfig::uniform(1, 1);
  base.set_profile("pi");
  workload::SweepSpec spec{workload::SweepSpec::Axis::kPeers, 1, 4, policy, false};
  std::vector<double> out;
  for (const auto& p : workload::run_sweep(base, spec, constant_rate(200, 200, 1))) {
    out.push_back(p.report.overall.peer_ms);
  }
  return out;
}

Verdict peer_trend() {
  Verdict v;
  const auto all = peer_sweep(txflow::EndorsementPolicy::all_org_peers());
  const auto any = peer_sweep(txflow::EndorsementPolicy::any_one());
  for (std::size_t i = 1; i < all.size(); ++i) {
    v.require(all[i] > all[i - 1], "ALL_ORG_PEERS did not rise at " + std::to_string(i + 1));
    v.require(any[i] <= any[0] * 1.10, "ANY_ONE exceeded baseline +10% at " + std::to_string(i + 1));
  }
  v.detail = (v.ok ? "" : v.detail + "; ") + "ALL_ORG_PEERS " + series(all) + ", ANY_ONE " +
             series(any);
  return v;
}

Verdict org_trend() {
  Verdict v;
  NetworkConfig base = NetworkConfig::from_json(
      nlohmann::json{{"orgs", {{{"name", "Org1PeerOrg"}, {"peers", 2}}}}, {"profile", "pi"}});
  workload::SweepSpec spec{workload::SweepSpec::Axis::kOrgs, 1, 6,
                           txflow::EndorsementPolicy::all_org_peers(), true};
  std::vector<double> tps;
  for (const auto& p : workload::run_sweep(base, spec, constant_rate(50, 300, 1))) {
    tps.push_back(p.report.tps);
  }
  const std::size_t peak = std::max_element(tps.begin(), tps.end()) - tps.begin();
  v.require(peak != 0 && peak + 1 != tps.size(), "peak at an endpoint");
  for (std::size_t i = 1; i < tps.size(); ++i) {
    if (i <= peak) {
      v.require(tps[i] > tps[i - 1], "not strictly rising before the peak");
    } else {
      v.require(tps[i] < tps[i - 1], "not strictly falling after the peak");
    }
  }
  v.detail = (v.ok ? "" : v.detail + "; ") + "TPS " + series(tps) + ", peak at " +
             std::to_string(peak + 1) + " orgs";
  return v;
}

Verdict adversaries() {
  Verdict v;
  const NetworkConfig c = NetworkConfig::uniform(2, 2);
  auto cross = workload::run_eclipse(c, txflow::EndorsementPolicy::cross_org(1), 100, 1);
  auto any = workload::run_eclipse(c, txflow::EndorsementPolicy::any_one(), 100, 1);
  auto query = workload::run_malicious_query(c, 100, 1);
  auto stale = workload::run_stale_endorser(c, 1);
  v.require(cross.passed && cross.committed == 0,
            "eclipse CROSS_ORG:1 committed " + std::to_string(cross.committed));
  v.require(any.passed && any.committed == any.attempts,
            "eclipse ANY_ONE committed " + std::to_string(any.committed));
  v.require(query.passed && query.leaks == 0,
            "malicious query leaked " + std::to_string(query.leaks));
  v.require(stale.passed, "stale endorser: " + stale.detail);
  if (v.ok) {
    v.detail = "eclipse CROSS_ORG:1 0/" + std::to_string(cross.attempts) +
               " commits, ANY_ONE " + std::to_string(any.committed) + "/" +
               std::to_string(any.attempts) + ", query leaks 0/" +
               std::to_string(query.attempts) + ", stale endorser diverged with nothing committed";
  }
  return v;
}

Verdict property_suites() {
  Verdict v;
  const std::vector<std::pair<std::string, properties::Result>> results = {
      {"mvcc", properties::mvcc_matches_serial_oracle(2024, 600, 20)},
      {"tamper", properties::tamper_always_detected(77, 100)},
      {"co-rider", properties::corider_matches_presence_oracle(9, 250)},
      {"cutter", properties::cutter_respects_bounds(1, 20, true)},
      {"csv", properties::bench_reproducible(NetworkConfig::uniform(2, 2), {11, 12}, 15)},
  };
  std::string detail;
  for (const auto& [name, r] : results) {
    v.require(r.ok, name + ": " + r.detail);
    detail += (detail.empty() ? "" : "; ") + name + ": " + r.detail;
  }
  if (v.ok) v.detail = detail;
  return v;
}

Verdict determinism() {
  Verdict v;
  properties::Result r = properties::chaincode_deterministic(31337, 4000);
  v.require(r.ok, r.detail);
  v.require(r.cases >= 1000, "only " + std::to_string(r.cases) + " cases");
  if (v.ok) v.detail = r.detail;
  return v;
}

}  // namespace
}  // namespace rhsim::acceptance

int main() {
  using namespace rhsim::acceptance;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"Shared ride record before archiving", shared_ride},
      {"Nashville privacy asymmetry", nashville},
      {"Lossless 1000-ride benchmark", lossless},
      {"Latency trend over send delay", delay_trend},
      {"Peer sweep by endorsement policy", peer_trend},
      {"Org sweep throughput is unimodal", org_trend},
      {"Adversary verdicts", adversaries},
      {"Oracle-backed property suites", property_suites},
      {"Chaincode determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %zu %s: %s (%.1fs)\n", v.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.ok) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
