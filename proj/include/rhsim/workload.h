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

// Load generation and metrics: traffic profiles, the ride benchmark,
// topology sweeps and adversary scenarios.
//
// A benchmark ride is six transactions, each submitted only after the
// previous one committed: requestRide, acceptRide, setRideDestination,
// pickupRider, dropoffRider, leaveDriver. Every ride has its own rider and
// driver, so rides never touch each other's keys.

#ifndef RHSIM_WORKLOAD_H_
#define RHSIM_WORKLOAD_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rhsim/config.h"
#include "rhsim/netsim.h"
#include "rhsim/network.h"
#include "rhsim/txflow.h"

namespace rhsim::workload {

struct TrafficProfile {
  enum class Kind { kConstantRate, kPoisson };

  Kind kind = Kind::kConstantRate;
  double delay_ms = 100.0;
  double deviation = 0.3;
  // Aggregate offered rate over all submitters, transactions per second.
  double lambda_tps = 50.0;

  // Throws Error(kConfigError) on delay <= 0, deviation outside [0, 1)
  // or lambda <= 0.
  static TrafficProfile constant(double delay_ms, double deviation);
  static TrafficProfile poisson(double lambda_tps);
  // Mean inter-arrival in milliseconds; lambda = 1000 / ms.
  static TrafficProfile poisson_interarrival(double mean_ms);

  void validate() const;
  nlohmann::json to_json() const;
};

// Per-submission delays drawn uniformly from [d(1-dev), d(1+dev)].
class ConstantRateGenerator {
 public:
  ConstantRateGenerator(double delay_ms, double deviation);
  double next_ms(netsim::Rng& rng) const;

 private:
  double lo_;
  double hi_;
};

// Exponential inter-arrivals with mean 1000 / lambda ms.
class PoissonGenerator {
 public:
  explicit PoissonGenerator(double lambda_tps);
  double next_ms(netsim::Rng& rng) const;

 private:
  double mean_ms_;
};

// The six lifecycle functions of one ride, in submission order.
const std::vector<std::string>& ride_functions();

struct BenchOptions {
  std::size_t rides = 1000;
  TrafficProfile traffic;
  std::uint64_t seed = 1;
  // Overrides submitters_per_org * orgs when set.
  std::optional<int> total_submitters;
  // Rides a single submitter keeps open at once.
  std::size_t max_open_rides = 16;

  nlohmann::json to_json() const;
};

struct LatencySample {
  std::string tx_id;
  std::string ride_id;
  std::string fn;
  double peer_ms = 0;
  double orderer_ms = 0;
  double event_ms = 0;
  network::TxStatus status = network::TxStatus::kValid;
  std::uint64_t block_height = 0;
  int retries = 0;
  double submitted_ms = 0;
  double committed_ms = 0;
};

struct Means {
  std::size_t count = 0;
  double peer_ms = 0;
  double orderer_ms = 0;
  double event_ms = 0;
};

struct BenchReport {
  nlohmann::json config;
  int submitters = 0;
  std::size_t rides = 0;
  std::vector<LatencySample> samples;  // submission order
  std::size_t submitted = 0;
  std::size_t valid = 0;
  std::size_t invalid = 0;
  std::size_t policy_failures = 0;
  std::size_t divergences = 0;
  std::size_t endorsement_errors = 0;
  std::size_t retries = 0;
  std::size_t read_after_write_flags = 0;
  std::size_t rides_completed = 0;
  std::size_t blocks = 0;
  // RideEvent accounting, per subscriber: every event of a valid tx
  // should reach every subscriber exactly once.
  std::size_t events_expected = 0;
  std::size_t events_delivered = 0;
  std::size_t events_missing = 0;
  std::size_t events_duplicated = 0;
  double first_submit_ms = 0;
  double last_commit_ms = 0;
  double tps = 0;
  Means overall;
  std::vector<Means> windows;  // consecutive 1000-sample windows

  // Every tx valid, every event delivered exactly once.
  bool lossless() const;
  std::string csv() const;
  nlohmann::json summary() const;
};

// Means over samples that reached ordering.
Means means_of(const std::vector<LatencySample>& samples, std::size_t begin, std::size_t end);

// Builds a fresh network from `config` and runs the ride benchmark on it.
// Throws Error(kConfigError) for invalid options.
BenchReport run_bench(const config::NetworkConfig& config, const BenchOptions& options);

struct SweepSpec {
  enum class Axis { kPeers, kOrgs };
  Axis axis = Axis::kPeers;
  int from = 1;
  int to = 4;
  txflow::EndorsementPolicy policy;
  // Orgs axis: two submitters and the base ride count per org.
  bool scale_traffic = false;
};

struct SweepPoint {
  int value = 0;
  BenchReport report;
};

// One independent simulation per point, run concurrently. The peers axis
// uses a single org; the orgs axis keeps the base peers per org.
std::vector<SweepPoint> run_sweep(const config::NetworkConfig& base, const SweepSpec& spec,
                                  const BenchOptions& options);

std::string trend_csv(const SweepSpec& spec, const std::vector<SweepPoint>& points);

struct AdversaryVerdict {
  std::string scenario;
  bool passed = false;
  std::size_t attempts = 0;
  std::size_t committed = 0;
  std::size_t policy_failures = 0;
  std::size_t divergences = 0;
  std::size_t leaks = 0;
  std::string detail;

  nlohmann::json to_json() const;
};

// A client that can reach only one org's peers submits `attempts`
// ride requests.
AdversaryVerdict run_eclipse(const config::NetworkConfig& base,
                             const txflow::EndorsementPolicy& policy, std::size_t attempts,
                             std::uint64_t seed);

// Users try to read every foreign key in the world state through the
// query gateway, plus `random_attempts` randomized tries and direct state
// reads.
AdversaryVerdict run_malicious_query(const config::NetworkConfig& base,
                                     std::size_t random_attempts, std::uint64_t seed);

// One peer stops receiving blocks; a transaction reading state it missed
// must end in Divergence with nothing committed.
AdversaryVerdict run_stale_endorser(const config::NetworkConfig& base, std::uint64_t seed);

}  // namespace rhsim::workload

#endif  // RHSIM_WORKLOAD_H_
