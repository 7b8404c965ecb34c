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

// Deterministic discrete-event simulation: virtual clock, event queue,
// single-server FIFO nodes and constant-latency links.
//
// A Scheduler is single-threaded. Separate simulations share nothing and
// may run on separate threads.

#ifndef RHSIM_NETSIM_H_
#define RHSIM_NETSIM_H_

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace rhsim::netsim {

// Virtual time, integer microseconds since the start of a simulation.
struct SimClock {
  using rep = std::int64_t;
  using period = std::micro;
  using duration = std::chrono::duration<rep, period>;
  using time_point = std::chrono::time_point<SimClock>;
  static constexpr bool is_steady = true;
};

using Duration = SimClock::duration;
using Time = SimClock::time_point;

// Milliseconds to ticks, rounded to the nearest microsecond.
Duration from_ms(double ms);
double to_ms(Duration d);
inline double to_ms(Time t) { return to_ms(t.time_since_epoch()); }

using Action = std::function<void()>;

struct TraceEntry {
  Time fire_at;
  std::uint64_t seq;
  std::string label;

  bool operator==(const TraceEntry&) const = default;
};

struct RunStats {
  Time now;
  std::uint64_t executed = 0;
};

class Scheduler {
 public:
  Time now() const noexcept { return now_; }

  // Throws Error(kTimeTravel) when `at` is before now().
  void schedule(Time at, Action action, std::string_view label = {});
  void schedule_after(Duration delay, Action action, std::string_view label = {}) {
    schedule(now_ + delay, std::move(action), label);
  }

  // Runs until the queue is empty.
  RunStats run();
  // Runs every event with fire_at <= deadline, then advances now to the
  // deadline.
  RunStats run_until(Time deadline);

  std::size_t pending() const noexcept { return queue_.size(); }
  std::uint64_t executed() const noexcept { return executed_; }

  void set_tracing(bool on) { tracing_ = on; }
  const std::vector<TraceEntry>& trace() const noexcept { return trace_; }

 private:
  struct Event {
    Time fire_at;
    std::uint64_t seq;
    Action action;
    std::string label;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return std::tie(a.fire_at, a.seq) > std::tie(b.fire_at, b.seq);
    }
  };

  bool step(Time deadline);

  Time now_{};
  std::uint64_t next_seq_ = 0;
  std::uint64_t executed_ = 0;
  std::vector<Event> queue_;  // min-heap on (fire_at, seq)
  bool tracing_ = false;
  std::vector<TraceEntry> trace_;
};

// One job at a time, first come first served.
class Server {
 public:
  explicit Server(Scheduler& sched) : sched_(&sched) {}

  // Queues a job; `on_done` runs when its service completes. Returns the
  // completion time.
  Time submit(Duration service, Action on_done);

  // Jobs queued or in service.
  std::size_t in_system() const noexcept { return in_system_; }
  std::size_t max_in_system() const noexcept { return max_in_system_; }
  std::uint64_t completed() const noexcept { return completed_; }
  Duration busy_time() const noexcept { return busy_; }
  Time free_at() const noexcept { return free_at_; }

 private:
  Scheduler* sched_;
  Time free_at_{};
  std::size_t in_system_ = 0;
  std::size_t max_in_system_ = 0;
  std::uint64_t completed_ = 0;
  Duration busy_{};
};

struct NodeId {
  std::uint32_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

// Service-time profile of a simulated machine, in milliseconds.
struct NodeProfile {
  double endorse_service_ms = 2.0;
  double commit_service_ms_per_tx = 1.0;
  // Signature checks at commit, per endorsement carried by a transaction.
  double verify_ms_per_endorsement = 0.2;
  // Fixed cost of committing one block (hashing, state flush).
  double commit_service_ms_per_block = 1.0;
  double order_service_ms = 0.5;
  // Client-side handling of each proposal response / ack / event.
  double client_ms_per_message = 0.2;

  bool operator==(const NodeProfile&) const = default;
};

// "server" or "pi"; throws Error(kConfigError) for other names.
NodeProfile profile_preset(std::string_view name);

// Nodes with FIFO servers connected by constant-latency directed links.
class Network {
 public:
  explicit Network(Scheduler& sched, Duration default_latency = std::chrono::milliseconds(1))
      : sched_(&sched), default_latency_(default_latency) {}

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  NodeId add_node(std::string name);
  void set_latency(NodeId from, NodeId to, Duration latency);
  Duration latency(NodeId from, NodeId to) const;

  // Delivers after the link latency, then queues a job of `service` on the
  // destination's server; `on_processed` runs when that job completes.
  // Throws Error(kUnknownNode).
  void send(NodeId from, NodeId to, Duration service, Action on_processed);

  Server& server(NodeId id);
  const std::string& name(NodeId id) const;
  std::size_t size() const noexcept { return nodes_.size(); }
  std::uint64_t messages_sent() const noexcept { return messages_; }

 private:
  struct Node {
    std::string name;
    std::unique_ptr<Server> server;
  };
  void check(NodeId id) const;

  Scheduler* sched_;
  Duration default_latency_;
  std::vector<Node> nodes_;
  std::map<std::pair<NodeId, NodeId>, Duration> latency_;
  std::uint64_t messages_ = 0;
};

// The simulation's only entropy source: 64-bit Mersenne Twister
// (std::mt19937_64, fully specified by the C++ standard) with
// distribution transforms implemented here so streams are identical on
// every platform.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }
  // Uniform in [lo, hi].
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Exponential with the given mean (inverse CDF).
  double exponential(double mean);
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  // Independent child stream, derived deterministically from this one.
  Rng fork() { return Rng(next() ^ 0x9e3779b97f4a7c15ull); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rhsim::netsim

#endif  // RHSIM_NETSIM_H_
