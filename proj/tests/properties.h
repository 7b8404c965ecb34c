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

// Randomised invariant checks, each against an independent oracle. Shared by
// the gtest property suite and the acceptance binary.

#ifndef RHSIM_TESTS_PROPERTIES_H_
#define RHSIM_TESTS_PROPERTIES_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rhsim/config.h"

namespace rhsim::properties {

struct Result {
  bool ok = true;
  std::size_t cases = 0;
  // First failure, or a one-line summary on success.
  std::string detail;

  // Records a failure (keeping the first message) and returns false.
  bool fail(std::string why);
};

// Random blocks of 1..max_txs rwsets over a small key space, some reads
// deliberately stale; validity flags and state must match serial replay.
Result mvcc_matches_serial_oracle(std::uint64_t seed, int blocks, std::size_t max_txs);

// Flips one byte of a chain dump per mutation; every mutation must fail
// verification.
Result tamper_always_detected(std::uint64_t seed, int mutations);

// Two riders sharing one driver under random interleavings; the driver
// reports each rider's pickup and dropoff into the other's record. Accepted
// iff the observer was aboard, and the final records hold exactly that.
Result corider_matches_presence_oracle(std::uint64_t seed, int timelines);

// Poisson arrivals through a BlockCutter on a Scheduler. `default_config`
// uses the stock 10-tx / 2 s settings, otherwise each run draws its own.
Result cutter_respects_bounds(std::uint64_t seed, int runs, bool default_config);

// Random invocations against an evolving world state: each is simulated
// twice with identical rwsets and outcome, never reads its own writes, and
// only writes keys the caller owns or rides it drives.
Result chaincode_deterministic(std::uint64_t seed, int invocations);

// satisfied(S) implies satisfied(T) for every S subset of T over 3x2 peers.
Result policy_monotone();

// Two runs per seed produce byte-identical CSV and summary; also checks
// losslessness and event_ms >= orderer_ms on every sample.
Result bench_reproducible(const config::NetworkConfig& config,
                          const std::vector<std::uint64_t>& seeds, std::size_t rides);

}  // namespace rhsim::properties

#endif  // RHSIM_TESTS_PROPERTIES_H_
