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

#include <gtest/gtest.h>

#include "properties.h"

namespace rhsim::properties {
namespace {

TEST(Property, MvccMatchesSerialOracle) {
  for (std::uint64_t seed : {2024ull, 7ull}) {
    Result r = mvcc_matches_serial_oracle(seed, 600, 20);
    EXPECT_TRUE(r.ok) << "seed " << seed << ": " << r.detail;
  }
}

TEST(Property, SingleByteTamperAlwaysDetected) {
  Result r = tamper_always_detected(77, 100);
  EXPECT_TRUE(r.ok) << r.detail;
  EXPECT_EQ(r.cases, 100u);
}

TEST(Property, CoRiderOnlyWhileObserverOnboard) {
  Result r = corider_matches_presence_oracle(9, 250);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Property, CutterDefaultBounds) {
  Result r = cutter_respects_bounds(1, 20, true);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Property, CutterRandomConfigs) {
  Result r = cutter_respects_bounds(2, 30, false);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Property, ChaincodeDeterministicAndOwnsItsWrites) {
  Result r = chaincode_deterministic(31337, 4000);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Property, PolicyMonotoneInEndorserSet) {
  Result r = policy_monotone();
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Property, BenchReproducibleAndEventAfterAck) {
  Result r = bench_reproducible(config::NetworkConfig::uniform(2, 2), {11, 12, 13}, 15);
  EXPECT_TRUE(r.ok) << r.detail;
}

}  // namespace
}  // namespace rhsim::properties
