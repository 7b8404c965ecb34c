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

#include "rhsim/netsim.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "rhsim/error.h"

namespace rhsim::netsim {

Duration from_ms(double ms) {
  return Duration(static_cast<std::int64_t>(std::llround(ms * 1000.0)));
}

double to_ms(Duration d) { return double(d.count()) / 1000.0; }

void Scheduler::schedule(Time at, Action action, std::string_view label) {
  if (at < now_) {
    throw Error(ErrorCode::kTimeTravel,
                std::to_string(at.time_since_epoch().count()) + "us < now " +
                    std::to_string(now_.time_since_epoch().count()) + "us");
  }
  queue_.push_back(Event{at, next_seq_++, std::move(action), std::string(label)});
  std::push_heap(queue_.begin(), queue_.end(), Later{});
}

bool Scheduler::step(Time deadline) {
  if (queue_.empty() || queue_.front().fire_at > deadline) return false;
  std::pop_heap(queue_.begin(), queue_.end(), Later{});
  Event ev = std::move(queue_.back());
  queue_.pop_back();
  now_ = ev.fire_at;
  if (tracing_) trace_.push_back(TraceEntry{ev.fire_at, ev.seq, std::move(ev.label)});
  ++executed_;
  ev.action();
  return true;
}

RunStats Scheduler::run() {
  std::uint64_t before = executed_;
  while (step(Time::max())) {
  }
  return RunStats{now_, executed_ - before};
}

RunStats Scheduler::run_until(Time deadline) {
  std::uint64_t before = executed_;
  while (step(deadline)) {
  }
  if (deadline > now_) now_ = deadline;
  return RunStats{now_, executed_ - before};
}

Time Server::submit(Duration service, Action on_done) {
  Time start = std::max(sched_->now(), free_at_);
  Time done = start + service;
  free_at_ = done;
  busy_ += service;
  ++in_system_;
  max_in_system_ = std::max(max_in_system_, in_system_);
  sched_->schedule(done, [this, cb = std::move(on_done)] {
    --in_system_;
    ++completed_;
    cb();
  });
  return done;
}

NodeProfile profile_preset(std::string_view name) {
  if (name == "server") return NodeProfile{};
  if (name == "pi") {
    // Roughly an order of magnitude slower than the server preset.
    NodeProfile p;
    p.endorse_service_ms = 20.0;
    p.commit_service_ms_per_tx = 8.0;
    p.verify_ms_per_endorsement = 3.0;
    p.commit_service_ms_per_block = 10.0;
    p.order_service_ms = 2.0;
    p.client_ms_per_message = 2.0;
    return p;
  }
  throw Error(ErrorCode::kConfigError, "unknown profile '" + std::string(name) + "'");
}

NodeId Network::add_node(std::string name) {
  NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back(Node{std::move(name), std::make_unique<Server>(*sched_)});
  return id;
}

void Network::check(NodeId id) const {
  if (id.value >= nodes_.size()) {
    throw Error(ErrorCode::kUnknownNode, "node #" + std::to_string(id.value));
  }
}

void Network::set_latency(NodeId from, NodeId to, Duration latency) {
  check(from);
  check(to);
  latency_[{from, to}] = latency;
}

Duration Network::latency(NodeId from, NodeId to) const {
  auto it = latency_.find({from, to});
  return it == latency_.end() ? default_latency_ : it->second;
}

void Network::send(NodeId from, NodeId to, Duration service, Action on_processed) {
  check(from);
  check(to);
  ++messages_;
  Server* dest = nodes_[to.value].server.get();
  sched_->schedule_after(latency(from, to),
                         [dest, service, cb = std::move(on_processed)]() mutable {
                           dest->submit(service, std::move(cb));
                         });
}

Server& Network::server(NodeId id) {
  check(id);
  return *nodes_[id.value].server;
}

const std::string& Network::name(NodeId id) const {
  check(id);
  return nodes_[id.value].name;
}

double Rng::exponential(double mean) {
  // 1 - u lies in (0, 1], so the log is finite.
  return -std::log(1.0 - uniform01()) * mean;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

}  // namespace rhsim::netsim
