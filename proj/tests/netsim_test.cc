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

#include <cmath>

#include "rhsim/error.h"
#include "rhsim/netsim.h"

namespace rhsim::netsim {
namespace {

using std::chrono::milliseconds;

TEST(Scheduler, FiresInTimeThenInsertionOrder) {
  Scheduler s;
  std::vector<int> order;
  s.schedule(Time{milliseconds(5)}, [&] { order.push_back(2); });
  s.schedule(Time{milliseconds(1)}, [&] { order.push_back(0); });
  s.schedule(Time{milliseconds(5)}, [&] { order.push_back(3); });
  s.schedule(Time{milliseconds(1)}, [&] { order.push_back(1); });
  RunStats st = s.run();
  EXPECT_EQ(order, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(st.executed, 4u);
  EXPECT_EQ(s.now(), Time{milliseconds(5)});
}

TEST(Scheduler, PastEventIsTimeTravel) {
  Scheduler s;
  s.schedule(Time{milliseconds(10)}, [] {});
  s.run();
  try {
    s.schedule(Time{milliseconds(9)}, [] {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTimeTravel);
  }
}

TEST(Scheduler, EventsScheduledDuringRunAreExecuted) {
  Scheduler s;
  int fired = 0;
  s.schedule_after(milliseconds(1), [&] {
    ++fired;
    s.schedule_after(milliseconds(0), [&] { ++fired; });
  });
  s.run();
  EXPECT_EQ(fired, 2);
}

TEST(Scheduler, RunUntilStopsAtDeadline) {
  Scheduler s;
  int fired = 0;
  s.schedule(Time{milliseconds(1)}, [&] { ++fired; });
  s.schedule(Time{milliseconds(3)}, [&] { ++fired; });
  s.run_until(Time{milliseconds(2)});
  EXPECT_EQ(fired, 1);
  EXPECT_EQ(s.now(), Time{milliseconds(2)});
  EXPECT_EQ(s.pending(), 1u);
}

TEST(Scheduler, TraceIsReproducible) {
  auto build = [] {
    Scheduler s;
    s.set_tracing(true);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
      s.schedule(Time{Duration(static_cast<std::int64_t>(rng.below(1000)))}, [] {},
                 "e" + std::to_string(i));
    }
    s.run();
    return s.trace();
  };
  EXPECT_EQ(build(), build());
}

TEST(Server, FifoQueueing) {
  Scheduler s;
  Server srv(s);
  std::vector<Time> done;
  for (int i = 0; i < 3; ++i) srv.submit(milliseconds(2), [&] { done.push_back(s.now()); });
  EXPECT_EQ(srv.in_system(), 3u);
  s.run();
  EXPECT_EQ(done, (std::vector<Time>{Time{milliseconds(2)}, Time{milliseconds(4)},
                                      Time{milliseconds(6)}}));
  EXPECT_EQ(srv.completed(), 3u);
  EXPECT_EQ(srv.max_in_system(), 3u);
  EXPECT_EQ(srv.busy_time(), milliseconds(6));
}

TEST(Server, IdleGapNotCountedAsBusy) {
  Scheduler s;
  Server srv(s);
  srv.submit(milliseconds(1), [] {});
  s.schedule(Time{milliseconds(10)}, [&] { srv.submit(milliseconds(1), [] {}); });
  s.run();
  EXPECT_EQ(s.now(), Time{milliseconds(11)});
  EXPECT_EQ(srv.busy_time(), milliseconds(2));
}

TEST(Network, SendAddsLatencyThenService) {
  Scheduler s;
  Network net(s, milliseconds(3));
  NodeId a = net.add_node("a");
  NodeId b = net.add_node("b");
  Time processed{};
  net.send(a, b, milliseconds(2), [&] { processed = s.now(); });
  s.run();
  EXPECT_EQ(processed, Time{milliseconds(5)});
  net.set_latency(a, b, milliseconds(10));
  EXPECT_EQ(net.latency(a, b), milliseconds(10));
  EXPECT_EQ(net.latency(b, a), milliseconds(3));
  EXPECT_EQ(net.messages_sent(), 1u);
  EXPECT_EQ(net.name(b), "b");
}

TEST(Network, UnknownNode) {
  Scheduler s;
  Network net(s);
  NodeId a = net.add_node("a");
  try {
    net.send(a, NodeId{7}, milliseconds(1), [] {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownNode);
  }
}

// The C++ standard pins the 10000th output of a default-seeded mt19937_64.
TEST(Rng, MatchesStandardEngine) {
  Rng rng(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next();
  EXPECT_EQ(v, 9981545732273789042ull);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  Rng c(99);
  Rng child = c.fork();
  Rng d(99);
  Rng child2 = d.fork();
  EXPECT_EQ(child.next(), child2.next());
}

TEST(Rng, UniformAndBelowRanges) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.below(7), 7u);
  }
}

TEST(Rng, ExponentialMean) {
  Rng rng(2);
  const int n = 200000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += rng.exponential(20.0);
  // Standard error of the mean is 20 / sqrt(n) ~ 0.045.
  EXPECT_NEAR(sum / n, 20.0, 0.25);
}

TEST(Time, MsConversions) {
  EXPECT_EQ(from_ms(1.5), Duration(1500));
  EXPECT_DOUBLE_EQ(to_ms(Duration(2500)), 2.5);
  EXPECT_DOUBLE_EQ(to_ms(Time{Duration(1000)}), 1.0);
}

TEST(Profiles, Presets) {
  EXPECT_EQ(profile_preset("server"), NodeProfile{});
  NodeProfile pi = profile_preset("pi");
  EXPECT_GT(pi.endorse_service_ms, NodeProfile{}.endorse_service_ms);
  EXPECT_THROW(profile_preset("mainframe"), Error);
}

}  // namespace
}  // namespace rhsim::netsim
