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

// End-to-end tests through the simulated network: config, submit path,
// bench, scenarios and the adversary drivers.

#include <gtest/gtest.h>

#include <cmath>

#include "json.hpp"
#include "rhsim/config.h"
#include "rhsim/network.h"
#include "rhsim/scenario.h"
#include "rhsim/workload.h"
#include "test_util.h"

namespace rhsim {
namespace {

using config::NetworkConfig;
using network::TxStatus;
using nlohmann::json;

TEST(Config, UniformNaming) {
  NetworkConfig c = NetworkConfig::uniform(3, 2);
  ASSERT_EQ(c.orgs.size(), 3u);
  EXPECT_EQ(c.orgs[2].name, "Org3PeerOrg");
  EXPECT_EQ(c.orgs[2].peers, 2);
}

TEST(Config, JsonRoundTrip) {
  NetworkConfig c = NetworkConfig::load(testing::fixture("net2x2.json"));
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.orgs.size(), 2u);
  NetworkConfig back = NetworkConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(Config, RejectsBadInput) {
  auto code = [](const json& j) {
    try {
      NetworkConfig::from_json(j);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kScenarioError;
  };
  EXPECT_EQ(code(json{{"orgs", json::array()}, {"colour", "red"}}), ErrorCode::kConfigError);
  EXPECT_EQ(code(json{{"orgs", json::array({{{"name", "A"}, {"peers", 0}}})}}),
            ErrorCode::kConfigError);
  EXPECT_EQ(code(json{{"orgs", json::array({{{"name", "A"}}})}, {"policy", "SOME"}}),
            ErrorCode::kConfigError);
  EXPECT_EQ(code(json{{"orgs", json::array({{{"name", "A"}}})}, {"profile", "mainframe"}}),
            ErrorCode::kConfigError);
  EXPECT_EQ(code(json::array()), ErrorCode::kConfigError);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(NetworkConfig::load("/nonexistent/net.json"), Error);
}

class Net : public ::testing::Test {
 protected:
  Net() : net(NetworkConfig::uniform(2, 2)) {}
  network::FabricNetwork net;
};

TEST_F(Net, SubmitRegisterThroughNetwork) {
  const identity::MspId org = identity::msp_for_org("Org1PeerOrg");
  identity::Credential rider = net.registry().enroll_identity(org, identity::Role::kRider, 1);
  network::ClientId client = net.add_client("c", org);
  std::optional<network::TxOutcome> out;
  net.submit(client, rider, "registerUser", {"pw"}, "12/5/2018 12:00",
             [&](const network::TxOutcome& o) { out = o; });
  net.scheduler().run();
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->status, TxStatus::kValid);
  EXPECT_GT(out->peer_ms(), 0.0);
  EXPECT_GT(out->orderer_ms(), 0.0);
  EXPECT_GE(out->event_ms(), out->orderer_ms());
  EXPECT_EQ(out->block_height, 1u);
  EXPECT_EQ(net.in_flight(), 0u);
  // The lone tx waits out the batch timeout before it is cut.
  EXPECT_GE(netsim::to_ms(out->committed - out->order_submitted), 2000.0);
  for (std::size_t i = 0; i < net.peer_count(); ++i) {
    EXPECT_EQ(net.peer(i).ledger().tip_hash(), net.peer(0).ledger().tip_hash());
  }
}

TEST_F(Net, ChaincodeErrorIsPolicyUnsatisfiedWithReason) {
  const identity::MspId org = identity::msp_for_org("Org1PeerOrg");
  identity::Credential rider = net.registry().enroll_identity(org, identity::Role::kRider, 1);
  network::ClientId client = net.add_client("c", org);
  std::optional<network::TxOutcome> out;
  net.submit(client, rider, "requestRide", {"36.1452/-85.4969"}, "12/5/2018 12:00",
             [&](const network::TxOutcome& o) { out = o; });
  net.scheduler().run();
  ASSERT_TRUE(out);
  EXPECT_EQ(out->status, TxStatus::kPolicyUnsatisfied);
  EXPECT_EQ(out->chaincode_error, "NotRegistered");
  EXPECT_EQ(net.blocks_cut(), 0u);
}

TEST_F(Net, EventsReachSubscribers) {
  const identity::MspId org = identity::msp_for_org("Org1PeerOrg");
  identity::Credential rider = net.registry().enroll_identity(org, identity::Role::kRider, 1);
  net.bootstrap({{&rider, "registerUser", {"pw"}, "12/5/2018 12:00"}});
  network::ClientId client = net.add_client("c", org);
  std::vector<network::EventDelivery> got;
  net.subscribe(client, "RideRequested", [&](const network::EventDelivery& d) {
    got.push_back(d);
  });
  EXPECT_THROW(net.subscribe(client, "NoSuchEvent", [](const auto&) {}), Error);
  net.submit(client, rider, "requestRide", {"36.1452/-85.4969"}, "12/5/2018 12:00",
             [](const network::TxOutcome&) {});
  net.scheduler().run();
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].event.name, chaincode::EventName::kRideRequested);
}

TEST_F(Net, DirectStateQueryDenied) {
  const identity::MspId org = identity::msp_for_org("Org1PeerOrg");
  identity::Credential a = net.registry().enroll_identity(org, identity::Role::kRider, 1);
  identity::Credential b = net.registry().enroll_identity(org, identity::Role::kRider, 2);
  net.bootstrap({{&a, "registerUser", {"pw"}, ""}, {&b, "registerUser", {"pw"}, ""}});
  network::ClientId client = net.add_client("c", org);
  const std::string mine = chaincode::user_key(a.principal()).str();
  const std::string theirs = chaincode::user_key(b.principal()).str();
  EXPECT_FALSE(scenario::query_as(net, client, a, mine).empty());
  EXPECT_THROW(scenario::query_as(net, client, a, theirs), Error);
  EXPECT_THROW(scenario::query_as(net, client, a, mine, scenario::QueryPath::kDirectState),
               Error);
}

TEST(Generators, ConstantRateBoundsAndMean) {
  workload::ConstantRateGenerator g(200.0, 0.3);
  netsim::Rng rng(1);
  double sum = 0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    double v = g.next_ms(rng);
    ASSERT_GE(v, 140.0);
    ASSERT_LE(v, 260.0);
    sum += v;
  }
  EXPECT_NEAR(sum / n, 200.0, 1.0);
}

TEST(Generators, PoissonMeanAndVariance) {
  workload::PoissonGenerator g(50.0);
  netsim::Rng rng(4);
  double sum = 0, sq = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double v = g.next_ms(rng);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 20.0, 0.3);
  // Exponential: standard deviation equals the mean.
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 20.0, 0.5);
}

TEST(Generators, Validation) {
  EXPECT_THROW(workload::TrafficProfile::constant(0, 0.1), Error);
  EXPECT_THROW(workload::TrafficProfile::constant(100, 1.0), Error);
  EXPECT_THROW(workload::TrafficProfile::constant(100, -0.1), Error);
  EXPECT_THROW(workload::TrafficProfile::poisson(0), Error);
  EXPECT_DOUBLE_EQ(workload::TrafficProfile::poisson_interarrival(20).lambda_tps, 50.0);
}

workload::BenchOptions small(std::size_t rides, std::uint64_t seed) {
  workload::BenchOptions o;
  o.rides = rides;
  o.seed = seed;
  o.traffic = workload::TrafficProfile::constant(100, 0.3);
  return o;
}

TEST(Bench, OneRideSixSamples) {
  workload::BenchReport r = workload::run_bench(NetworkConfig::uniform(2, 2), small(1, 1));
  ASSERT_EQ(r.samples.size(), 6u);
  std::vector<std::string> fns;
  for (const auto& s : r.samples) fns.push_back(s.fn);
  EXPECT_EQ(fns, workload::ride_functions());
  EXPECT_EQ(r.valid, 6u);
  EXPECT_EQ(r.rides_completed, 1u);
  EXPECT_TRUE(r.lossless());
  for (const auto& s : r.samples) {
    EXPECT_EQ(s.ride_id, r.samples[0].ride_id);
    EXPECT_GE(s.event_ms, s.orderer_ms);
  }
}

TEST(Bench, CsvShape) {
  workload::BenchReport r = workload::run_bench(NetworkConfig::uniform(2, 2), small(2, 1));
  const std::string csv = r.csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "tx_id,ride_id,fn,peer_ms,orderer_ms,event_ms,valid,block_height");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
  json s = r.summary();
  EXPECT_EQ(s.at("rng"), "mt19937_64");
  EXPECT_TRUE(s.at("lossless").get<bool>());
}

TEST(Bench, SameSeedSameCsvDifferentSeedDiffers) {
  const NetworkConfig c = NetworkConfig::uniform(2, 2);
  const std::string a = workload::run_bench(c, small(20, 7)).csv();
  EXPECT_EQ(a, workload::run_bench(c, small(20, 7)).csv());
  EXPECT_NE(a, workload::run_bench(c, small(20, 8)).csv());
}

TEST(Bench, PoissonTraffic) {
  workload::BenchOptions o = small(20, 3);
  o.traffic = workload::TrafficProfile::poisson(40);
  workload::BenchReport r = workload::run_bench(NetworkConfig::uniform(2, 2), o);
  EXPECT_EQ(r.samples.size(), 120u);
  EXPECT_TRUE(r.lossless());
}

TEST(Bench, MeansIgnoreEmptyRange) {
  workload::Means m = workload::means_of({}, 0, 0);
  EXPECT_EQ(m.count, 0u);
}

TEST(Sweep, PeersAxisTrendCsv) {
  workload::SweepSpec spec;
  spec.axis = workload::SweepSpec::Axis::kPeers;
  spec.from = 1;
  spec.to = 2;
  spec.policy = txflow::EndorsementPolicy::any_one();
  auto points = workload::run_sweep(NetworkConfig::uniform(1, 1), spec, small(5, 1));
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[1].value, 2);
  const std::string csv = workload::trend_csv(spec, points);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "axis,value,policy,submitters,rides,submitted,valid,peer_ms,orderer_ms,event_ms,tps");
  EXPECT_THROW(workload::run_sweep(NetworkConfig::uniform(1, 1),
                                   workload::SweepSpec{workload::SweepSpec::Axis::kPeers, 3, 2,
                                                       {}, false},
                                   small(1, 1)),
               Error);
}

TEST(Scenario, NashvilleFixturePasses) {
  auto script = scenario::Script::load(testing::fixture("nashville.json"));
  auto report = scenario::run_scenario(script, NetworkConfig::load(testing::fixture("net2x2.json")));
  EXPECT_TRUE(report.passed()) << report.to_json().dump(2);
  EXPECT_FALSE(report.failed_step.has_value());
}

TEST(Scenario, SharedRideFixturePasses) {
  auto script = scenario::Script::load(testing::fixture("shared_ride.json"));
  auto report = scenario::run_scenario(script, NetworkConfig::load(testing::fixture("net2x2.json")));
  EXPECT_TRUE(report.passed()) << report.to_json().dump(2);
}

TEST(Scenario, ExpectedErrorMismatchStopsRun) {
  json j = {
      {"actors", {{"A", {{"org", "Org1PeerOrg"}, {"role", "Rider"}, {"seed", 1}}}}},
      {"steps",
       json::array({{{"actor", "A"}, {"fn", "requestRide"}, {"args", {"36.1/-85.1"}}}})}};
  auto report = scenario::run_scenario(scenario::Script::from_json(j), NetworkConfig::uniform(2, 2));
  // Actors are registered during setup, so the request itself succeeds.
  EXPECT_TRUE(report.passed()) << report.to_json().dump(2);

  j["steps"][0]["expect_error"] = "NotADriver";
  report = scenario::run_scenario(scenario::Script::from_json(j), NetworkConfig::uniform(2, 2));
  EXPECT_FALSE(report.passed());
  EXPECT_EQ(report.failed_step, std::optional<std::size_t>(0));
}

TEST(Scenario, MalformedScript) {
  EXPECT_THROW(scenario::Script::from_json(json{{"steps", 3}}), Error);
  EXPECT_THROW(scenario::Script::from_json(
                   json{{"steps", json::array({{{"actor", "ghost"}, {"fn", "registerUser"}}})}}),
               Error);
}

TEST(Adversary, MaliciousQueryNoLeaks) {
  auto v = workload::run_malicious_query(NetworkConfig::uniform(2, 2), 20, 1);
  EXPECT_TRUE(v.passed) << v.detail;
  EXPECT_EQ(v.leaks, 0u);
}

TEST(Adversary, StaleEndorser) {
  auto v = workload::run_stale_endorser(NetworkConfig::uniform(2, 2), 1);
  EXPECT_TRUE(v.passed) << v.detail;
}

TEST(Adversary, EclipseUnderAllOrgPeers) {
  auto v = workload::run_eclipse(NetworkConfig::uniform(2, 2),
                                 txflow::EndorsementPolicy::all_org_peers(), 20, 1);
  EXPECT_TRUE(v.passed) << v.detail;
  EXPECT_EQ(v.committed, 0u);
}

TEST(Adversary, EclipseUnderCrossOrgAndAnyOne) {
  auto cross = workload::run_eclipse(NetworkConfig::uniform(2, 2),
                                     txflow::EndorsementPolicy::cross_org(1), 20, 1);
  EXPECT_TRUE(cross.passed) << cross.detail;
  EXPECT_EQ(cross.policy_failures, 20u);
  auto any = workload::run_eclipse(NetworkConfig::uniform(2, 2),
                                   txflow::EndorsementPolicy::any_one(), 20, 1);
  EXPECT_TRUE(any.passed) << any.detail;
  EXPECT_EQ(any.committed, 20u);
}

}  // namespace
}  // namespace rhsim
