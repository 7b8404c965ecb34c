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

#include "rhsim/workload.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <future>
#include <map>
#include <set>

#include "rhsim/chaincode.h"
#include "rhsim/error.h"
#include "rhsim/geo.h"
#include "rhsim/scenario.h"
#include "rhsim/timestamp.h"

namespace rhsim::workload {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kConfigError, what); }

constexpr std::string_view kBaseTime = "12/5/2018 12:00";
constexpr std::size_t kWindow = 1000;

std::string fixed3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Ride time for a virtual instant: the base time plus whole minutes elapsed.
std::string ride_time_at(netsim::Time t) {
  static const RideTime base = *RideTime::parse(kBaseTime);
  auto mins = std::chrono::duration_cast<std::chrono::minutes>(t.time_since_epoch());
  return base.plus(mins).text();
}

// A point within roughly 5 km of downtown Nashville.
geo::GeoPoint random_point(netsim::Rng& rng) {
  const std::int64_t lat = 3616000 + static_cast<std::int64_t>(rng.below(10001)) - 5000;
  const std::int64_t lon = -8678000 + static_cast<std::int64_t>(rng.below(10001)) - 5000;
  return *geo::GeoPoint::from_e5(lat, lon);
}

json means_json(const Means& m) {
  return json{{"count", m.count},
              {"peer_ms", m.peer_ms},
              {"orderer_ms", m.orderer_ms},
              {"event_ms", m.event_ms}};
}

std::vector<network::FabricNetwork::Call> calls_for(
    const std::vector<const identity::Credential*>& who, std::string_view fn,
    const std::vector<std::vector<std::string>>& args, const std::string& time) {
  std::vector<network::FabricNetwork::Call> out;
  for (std::size_t i = 0; i < who.size(); ++i) {
    out.push_back({who[i], std::string(fn), args.empty() ? std::vector<std::string>{} : args[i],
                   time});
  }
  return out;
}

void bootstrap_or_throw(network::FabricNetwork& net,
                        const std::vector<network::FabricNetwork::Call>& calls) {
  for (const network::TxOutcome& o : net.bootstrap(calls)) {
    if (o.status != network::TxStatus::kValid) {
      throw Error(ErrorCode::kScenarioError,
                  "bootstrap " + o.function + " failed: " + o.detail + " " + o.chaincode_error);
    }
  }
}

// Registers every credential, then upgrades the drivers.
void register_users(network::FabricNetwork& net,
                    const std::vector<const identity::Credential*>& riders,
                    const std::vector<const identity::Credential*>& drivers) {
  std::vector<const identity::Credential*> all = riders;
  all.insert(all.end(), drivers.begin(), drivers.end());
  std::vector<std::vector<std::string>> pw(all.size(), std::vector<std::string>{"secret"});
  bootstrap_or_throw(net, calls_for(all, chaincode::fn::kRegisterUser, pw, std::string(kBaseTime)));
  bootstrap_or_throw(net, calls_for(drivers, chaincode::fn::kUpgradeToDriver, {},
                                    std::string(kBaseTime)));
}

}  // namespace

TrafficProfile TrafficProfile::constant(double delay_ms, double deviation) {
  TrafficProfile p;
  p.kind = Kind::kConstantRate;
  p.delay_ms = delay_ms;
  p.deviation = deviation;
  p.validate();
  return p;
}

TrafficProfile TrafficProfile::poisson(double lambda_tps) {
  TrafficProfile p;
  p.kind = Kind::kPoisson;
  p.lambda_tps = lambda_tps;
  p.validate();
  return p;
}

TrafficProfile TrafficProfile::poisson_interarrival(double mean_ms) {
  if (!(mean_ms > 0)) bad("inter-arrival must be positive");
  return poisson(1000.0 / mean_ms);
}

void TrafficProfile::validate() const {
  if (kind == Kind::kConstantRate) {
    if (!(delay_ms > 0)) bad("delay must be positive");
    if (!(deviation >= 0 && deviation < 1)) bad("deviation must be in [0, 1)");
  } else if (!(lambda_tps > 0)) {
    bad("lambda must be positive");
  }
}

json TrafficProfile::to_json() const {
  if (kind == Kind::kConstantRate) {
    return json{{"kind", "constant"}, {"delay_ms", delay_ms}, {"deviation", deviation}};
  }
  return json{{"kind", "poisson"}, {"lambda_tps", lambda_tps}};
}

ConstantRateGenerator::ConstantRateGenerator(double delay_ms, double deviation)
    : lo_(delay_ms * (1 - deviation)), hi_(delay_ms * (1 + deviation)) {
  TrafficProfile::constant(delay_ms, deviation);  // validates
}

double ConstantRateGenerator::next_ms(netsim::Rng& rng) const { return rng.uniform(lo_, hi_); }

PoissonGenerator::PoissonGenerator(double lambda_tps) : mean_ms_(1000.0 / lambda_tps) {
  TrafficProfile::poisson(lambda_tps);
}

double PoissonGenerator::next_ms(netsim::Rng& rng) const { return rng.exponential(mean_ms_); }

const std::vector<std::string>& ride_functions() {
  static const std::vector<std::string> kFns = {
      std::string(chaincode::fn::kRequestRide),  std::string(chaincode::fn::kAcceptRide),
      std::string(chaincode::fn::kSetRideDestination), std::string(chaincode::fn::kPickupRider),
      std::string(chaincode::fn::kDropoffRider), std::string(chaincode::fn::kLeaveDriver)};
  return kFns;
}

json BenchOptions::to_json() const {
  return json{{"rides", rides},
              {"traffic", traffic.to_json()},
              {"seed", seed},
              {"total_submitters", total_submitters ? json(*total_submitters) : json(nullptr)},
              {"max_open_rides", max_open_rides}};
}

Means means_of(const std::vector<LatencySample>& samples, std::size_t begin, std::size_t end) {
  Means m;
  for (std::size_t i = begin; i < end && i < samples.size(); ++i) {
    const LatencySample& s = samples[i];
    if (s.status != network::TxStatus::kValid && s.status != network::TxStatus::kInvalid) continue;
    ++m.count;
    m.peer_ms += s.peer_ms;
    m.orderer_ms += s.orderer_ms;
    m.event_ms += s.event_ms;
  }
  if (m.count > 0) {
    m.peer_ms /= double(m.count);
    m.orderer_ms /= double(m.count);
    m.event_ms /= double(m.count);
  }
  return m;
}

bool BenchReport::lossless() const {
  return submitted == rides * ride_functions().size() && valid == submitted &&
         events_missing == 0 && events_duplicated == 0 && events_delivered == events_expected;
}

std::string BenchReport::csv() const {
  std::string out = "tx_id,ride_id,fn,peer_ms,orderer_ms,event_ms,valid,block_height\n";
  for (const LatencySample& s : samples) {
    out += s.tx_id + "," + s.ride_id + "," + s.fn + "," + fixed3(s.peer_ms) + "," +
           fixed3(s.orderer_ms) + "," + fixed3(s.event_ms) + "," +
           (s.status == network::TxStatus::kValid ? "1" : "0") + "," +
           std::to_string(s.block_height) + "\n";
  }
  return out;
}

json BenchReport::summary() const {
  json win = json::array();
  for (const Means& m : windows) win.push_back(means_json(m));
  return json{{"config", config},
              {"hash_algorithm", kHashAlgorithm},
              {"rng", netsim::Rng::kAlgorithm},
              {"submitters", submitters},
              {"rides", rides},
              {"rides_completed", rides_completed},
              {"blocks", blocks},
              {"counts",
               {{"submitted", submitted},
                {"valid", valid},
                {"invalid", invalid},
                {"policy_unsatisfied", policy_failures},
                {"divergence", divergences},
                {"endorsement_errors", endorsement_errors},
                {"retries", retries},
                {"read_after_write_flags", read_after_write_flags}}},
              {"events",
               {{"expected", events_expected},
                {"delivered", events_delivered},
                {"missing", events_missing},
                {"duplicated", events_duplicated}}},
              {"first_submit_ms", first_submit_ms},
              {"last_commit_ms", last_commit_ms},
              {"tps", tps},
              {"means", means_json(overall)},
              {"window_means", std::move(win)},
              {"lossless", lossless()}};
}

namespace {

struct BenchRide {
  std::size_t submitter = 0;
  std::size_t rider = 0;
  std::size_t driver = 0;
  std::string pickup;
  std::string dest;
  std::string key;
  std::string ride_id;
  std::size_t step = 0;
};

struct Submitter {
  network::ClientId client = 0;
  netsim::Rng rng{0};
  std::deque<std::size_t> unstarted;
  std::deque<std::size_t> ready;
  std::size_t open = 0;
};

class Bench {
 public:
  Bench(const config::NetworkConfig& config, const BenchOptions& options)
      : config_(config), options_(options), net_(config), rng_(options.seed) {}

  BenchReport run();

 private:
  void tick(std::size_t s);
  void submit(std::size_t r);
  double next_delay_ms(Submitter& sub);

  const config::NetworkConfig& config_;
  const BenchOptions& options_;
  network::FabricNetwork net_;
  netsim::Rng rng_;
  std::vector<identity::Credential> users_;
  std::vector<BenchRide> rides_;
  std::vector<Submitter> subs_;
  BenchReport report_;
  // (subscriber index, tx id) -> deliveries
  std::map<std::pair<std::size_t, std::string>, std::size_t> delivered_;
};

double Bench::next_delay_ms(Submitter& sub) {
  const TrafficProfile& t = options_.traffic;
  if (t.kind == TrafficProfile::Kind::kConstantRate) {
    return ConstantRateGenerator(t.delay_ms, t.deviation).next_ms(sub.rng);
  }
  // The aggregate rate is split evenly across submitters.
  return PoissonGenerator(t.lambda_tps / double(subs_.size())).next_ms(sub.rng);
}

void Bench::tick(std::size_t s) {
  Submitter& sub = subs_[s];
  std::optional<std::size_t> r;
  if (!sub.ready.empty()) {
    r = sub.ready.front();
    sub.ready.pop_front();
  } else if (!sub.unstarted.empty() && sub.open < options_.max_open_rides) {
    r = sub.unstarted.front();
    sub.unstarted.pop_front();
    ++sub.open;
  }
  if (r) submit(*r);
  if (sub.unstarted.empty() && sub.open == 0) return;
  net_.scheduler().schedule_after(netsim::from_ms(next_delay_ms(sub)), [this, s] { tick(s); });
}

void Bench::submit(std::size_t r) {
  BenchRide& ride = rides_[r];
  const std::string& fn = ride_functions()[ride.step];
  std::vector<std::string> args;
  std::size_t creator = ride.rider;
  switch (ride.step) {
    case 0: args = {ride.pickup}; break;
    case 1: args = {ride.key}; creator = ride.driver; break;
    case 2: args = {ride.key, ride.dest}; break;
    case 3: args = {ride.key, ride.pickup}; creator = ride.driver; break;
    case 4: args = {ride.key, ride.dest}; creator = ride.driver; break;
    default: args = {ride.key}; break;
  }
  const std::size_t slot = report_.samples.size();
  report_.samples.push_back(LatencySample{});
  report_.samples[slot].ride_id = ride.ride_id;
  report_.samples[slot].fn = fn;
  ++report_.submitted;
  net_.submit(subs_[ride.submitter].client, users_[creator], fn, std::move(args),
              ride_time_at(net_.scheduler().now()), [this, r, slot](const network::TxOutcome& o) {
                LatencySample& s = report_.samples[slot];
                s.tx_id = o.tx_id;
                s.status = o.status;
                s.peer_ms = o.peer_ms();
                s.orderer_ms = o.orderer_ms();
                s.event_ms = o.event_ms();
                s.block_height = o.block_height;
                s.retries = o.retries;
                s.submitted_ms = netsim::to_ms(o.submitted);
                s.committed_ms = netsim::to_ms(std::max(o.committed, o.acked));
                BenchRide& ride = rides_[r];
                Submitter& sub = subs_[ride.submitter];
                if (o.status != network::TxStatus::kValid) {
                  --sub.open;  // abandoned
                  return;
                }
                if (o.event) {
                  ++report_.events_expected;  // per subscriber, scaled below
                }
                if (++ride.step == ride_functions().size()) {
                  --sub.open;
                  ++report_.rides_completed;
                } else {
                  sub.ready.push_back(r);
                }
              });
}

BenchReport Bench::run() {
  if (options_.rides == 0) bad("rides must be positive");
  if (options_.max_open_rides == 0) bad("max_open_rides must be positive");
  options_.traffic.validate();
  const auto& orgs = net_.registry().orgs();
  const int n_subs = options_.total_submitters.value_or(config_.submitters_per_org *
                                                        static_cast<int>(orgs.size()));
  if (n_subs < 1) bad("at least one submitter is required");

  for (int s = 0; s < n_subs; ++s) {
    Submitter sub;
    sub.client = net_.add_client("submitter" + std::to_string(s), orgs[s % orgs.size()].msp);
    sub.rng = rng_.fork();
    subs_.push_back(std::move(sub));
  }

  std::vector<const identity::Credential*> riders, drivers;
  users_.reserve(2 * options_.rides);
  for (std::size_t r = 0; r < options_.rides; ++r) {
    BenchRide ride;
    ride.submitter = r % subs_.size();
    const identity::MspId& msp = orgs[ride.submitter % orgs.size()].msp;
    ride.rider = users_.size();
    users_.push_back(net_.registry().enroll_identity(msp, identity::Role::kRider, rng_.next()));
    ride.driver = users_.size();
    users_.push_back(net_.registry().enroll_identity(msp, identity::Role::kDriver, rng_.next()));
    ride.pickup = random_point(rng_).to_string();
    ride.dest = random_point(rng_).to_string();
    const identity::Principal who = users_[ride.rider].principal();
    ride.key = chaincode::ride_request_key(who).str();
    ride.ride_id = chaincode::ride_id_for(who.uid);
    subs_[ride.submitter].unstarted.push_back(r);
    rides_.push_back(std::move(ride));
  }
  for (const BenchRide& ride : rides_) {
    riders.push_back(&users_[ride.rider]);
    drivers.push_back(&users_[ride.driver]);
  }
  register_users(net_, riders, drivers);

  for (std::size_t s = 0; s < subs_.size(); ++s) {
    for (chaincode::EventName e :
         {chaincode::EventName::kRideRequested, chaincode::EventName::kRideAccepted,
          chaincode::EventName::kDriverArrived, chaincode::EventName::kRideEnding}) {
      net_.subscribe(subs_[s].client, chaincode::to_string(e),
                     [this, s](const network::EventDelivery& d) { ++delivered_[{s, d.tx_id}]; });
    }
  }

  const netsim::Time start = net_.scheduler().now();
  for (std::size_t s = 0; s < subs_.size(); ++s) {
    net_.scheduler().schedule(start, [this, s] { tick(s); });
  }
  net_.scheduler().run();

  BenchReport& rep = report_;
  rep.config = json{{"network", config_.to_json()}, {"bench", options_.to_json()}};
  rep.submitters = n_subs;
  rep.rides = options_.rides;
  rep.blocks = net_.peer(0).ledger().height();
  std::set<std::string> event_txs;
  bool first = true;
  for (const LatencySample& s : rep.samples) {
    switch (s.status) {
      case network::TxStatus::kValid: ++rep.valid; break;
      case network::TxStatus::kInvalid: ++rep.invalid; break;
      case network::TxStatus::kPolicyUnsatisfied: ++rep.policy_failures; break;
      case network::TxStatus::kDivergence: ++rep.divergences; break;
      case network::TxStatus::kEndorsementError: ++rep.endorsement_errors; break;
    }
    rep.retries += static_cast<std::size_t>(s.retries);
    if (first || s.submitted_ms < rep.first_submit_ms) rep.first_submit_ms = s.submitted_ms;
    first = false;
    if (s.status == network::TxStatus::kValid) {
      rep.last_commit_ms = std::max(rep.last_commit_ms, s.committed_ms);
    }
  }
  // Every subscriber should see every event of every valid tx once.
  std::size_t event_tx_count = rep.events_expected;
  rep.events_expected = event_tx_count * subs_.size();
  std::map<std::string, bool> valid_event_tx;
  for (const ledger::Block& b : net_.peer(0).ledger().blocks()) {
    for (std::size_t i = 0; i < b.txs.size(); ++i) {
      txflow::EndorsedTx tx = txflow::EndorsedTx::decode(b.txs[i]);
      if (tx.payload.rwset.read_after_write) ++rep.read_after_write_flags;
      if (b.validity[i] && tx.payload.event) valid_event_tx[tx.proposal.tx_id] = true;
    }
  }
  for (std::size_t s = 0; s < subs_.size(); ++s) {
    for (const auto& [tx_id, _] : valid_event_tx) {
      auto it = delivered_.find({s, tx_id});
      const std::size_t n = it == delivered_.end() ? 0 : it->second;
      if (n == 0) ++rep.events_missing;
      if (n > 1) rep.events_duplicated += n - 1;
    }
  }
  for (const auto& [key, n] : delivered_) rep.events_delivered += n;

  const double span_ms = rep.last_commit_ms - rep.first_submit_ms;
  rep.tps = span_ms > 0 ? double(rep.valid) / (span_ms / 1000.0) : 0.0;
  rep.overall = means_of(rep.samples, 0, rep.samples.size());
  for (std::size_t b = 0; b < rep.samples.size(); b += kWindow) {
    rep.windows.push_back(means_of(rep.samples, b, b + kWindow));
  }
  return std::move(report_);
}

}  // namespace

BenchReport run_bench(const config::NetworkConfig& config, const BenchOptions& options) {
  Bench bench(config, options);
  return bench.run();
}

std::vector<SweepPoint> run_sweep(const config::NetworkConfig& base, const SweepSpec& spec,
                                  const BenchOptions& options) {
  if (spec.from < 1 || spec.to < spec.from) bad("sweep range must satisfy 1 <= from <= to");
  struct Job {
    config::NetworkConfig config;
    BenchOptions options;
  };
  std::vector<Job> jobs;
  for (int v = spec.from; v <= spec.to; ++v) {
    Job job{base, options};
    job.config.policy = spec.policy;
    if (spec.axis == SweepSpec::Axis::kPeers) {
      job.config.orgs = config::NetworkConfig::uniform(1, v).orgs;
    } else {
      job.config.orgs = config::NetworkConfig::uniform(v, base.orgs.front().peers).orgs;
      if (spec.scale_traffic) {
        job.options.total_submitters = base.submitters_per_org * v;
        job.options.rides = options.rides * static_cast<std::size_t>(v);
      } else {
        job.options.total_submitters = base.submitters_per_org;
      }
    }
    job.config.validate();
    jobs.push_back(std::move(job));
  }
  std::vector<std::future<BenchReport>> futures;
  for (const Job& job : jobs) {
    futures.push_back(std::async(std::launch::async, [&job] {
      return run_bench(job.config, job.options);
    }));
  }
  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    points.push_back(SweepPoint{spec.from + static_cast<int>(i), futures[i].get()});
  }
  return points;
}

std::string trend_csv(const SweepSpec& spec, const std::vector<SweepPoint>& points) {
  const char* axis = spec.axis == SweepSpec::Axis::kPeers ? "peers" : "orgs";
  std::string out =
      "axis,value,policy,submitters,rides,submitted,valid,peer_ms,orderer_ms,event_ms,tps\n";
  for (const SweepPoint& p : points) {
    const BenchReport& r = p.report;
    out += std::string(axis) + "," + std::to_string(p.value) + "," + spec.policy.to_string() +
           "," + std::to_string(r.submitters) + "," + std::to_string(r.rides) + "," +
           std::to_string(r.submitted) + "," + std::to_string(r.valid) + "," +
           fixed3(r.overall.peer_ms) + "," + fixed3(r.overall.orderer_ms) + "," +
           fixed3(r.overall.event_ms) + "," + fixed3(r.tps) + "\n";
  }
  return out;
}

json AdversaryVerdict::to_json() const {
  return json{{"scenario", scenario},   {"passed", passed},
              {"attempts", attempts},   {"committed", committed},
              {"policy_unsatisfied", policy_failures}, {"divergence", divergences},
              {"leaks", leaks},         {"detail", detail}};
}

AdversaryVerdict run_eclipse(const config::NetworkConfig& base,
                             const txflow::EndorsementPolicy& policy, std::size_t attempts,
                             std::uint64_t seed) {
  config::NetworkConfig cfg = base;
  cfg.policy = policy;
  network::FabricNetwork net(cfg);
  netsim::Rng rng(seed);
  const identity::MspId home = net.registry().orgs().front().msp;
  const network::ClientId victim = net.add_client("eclipsed", home);
  net.restrict_client(victim, net.peers_of(home));

  std::vector<identity::Credential> riders;
  for (std::size_t i = 0; i < attempts; ++i) {
    riders.push_back(net.registry().enroll_identity(home, identity::Role::kRider, rng.next()));
  }
  std::vector<const identity::Credential*> ptrs;
  for (const auto& c : riders) ptrs.push_back(&c);
  register_users(net, ptrs, {});

  AdversaryVerdict v;
  v.scenario = "eclipse/" + policy.to_string();
  v.attempts = attempts;
  for (const identity::Credential& rider : riders) {
    net.submit(victim, rider, std::string(chaincode::fn::kRequestRide),
               {random_point(rng).to_string()}, std::string(kBaseTime),
               [&v](const network::TxOutcome& o) {
                 if (o.status == network::TxStatus::kValid) ++v.committed;
                 if (o.status == network::TxStatus::kPolicyUnsatisfied) ++v.policy_failures;
               });
  }
  net.scheduler().run();
  // Whether the peers the victim can still reach are enough on their own.
  std::set<identity::Principal> reachable;
  for (std::size_t i : net.peers_of(home)) reachable.insert(net.peer(i).principal());
  if (policy.satisfied(reachable, net.channel().peers)) {
    v.passed = v.committed == attempts;
    v.detail = "home-org peers satisfy " + policy.to_string() + ", so the eclipsed client commits";
  } else {
    v.passed = v.committed == 0 && v.policy_failures == attempts;
    v.detail = "home-org endorsements must never satisfy " + policy.to_string();
  }
  return v;
}

AdversaryVerdict run_malicious_query(const config::NetworkConfig& base,
                                     std::size_t random_attempts, std::uint64_t seed) {
  network::FabricNetwork net(base);
  netsim::Rng rng(seed);
  struct User {
    std::unique_ptr<identity::Credential> cred;
    network::ClientId client;
  };
  std::vector<User> users;
  std::vector<const identity::Credential*> riders, drivers;
  std::vector<std::size_t> finished, active;  // rider indices
  std::vector<std::size_t> driver_of;         // per org
  for (const identity::Org& org : net.registry().orgs()) {
    for (identity::Role role :
         {identity::Role::kRider, identity::Role::kRider, identity::Role::kDriver}) {
      auto cred = std::make_unique<identity::Credential>(
          net.registry().enroll_identity(org.msp, role, rng.next()));
      (role == identity::Role::kRider ? riders : drivers).push_back(cred.get());
      const network::ClientId client =
          net.add_client("user" + std::to_string(users.size()), org.msp);
      users.push_back(User{std::move(cred), client});
    }
    finished.push_back(users.size() - 3);
    active.push_back(users.size() - 2);
    driver_of.push_back(users.size() - 1);
  }
  register_users(net, riders, drivers);

  // One completed ride and one open request per org.
  auto stage = [&](std::vector<std::size_t> who, std::string_view fn,
                   std::vector<std::vector<std::string>> args, const std::string& time) {
    std::vector<const identity::Credential*> creds;
    for (std::size_t u : who) creds.push_back(users[u].cred.get());
    bootstrap_or_throw(net, calls_for(creds, fn, args, time));
  };
  std::vector<std::string> pickup, dest, keys_finished, keys_active;
  for (std::size_t o = 0; o < finished.size(); ++o) {
    pickup.push_back(random_point(rng).to_string());
    dest.push_back(random_point(rng).to_string());
    keys_finished.push_back(chaincode::ride_request_key(users[finished[o]].cred->principal()).str());
    keys_active.push_back(chaincode::ride_request_key(users[active[o]].cred->principal()).str());
  }
  std::vector<std::vector<std::string>> a_req, a_acc, a_dest, a_pick, a_drop, a_leave, a_req2;
  for (std::size_t o = 0; o < finished.size(); ++o) {
    a_req.push_back({pickup[o]});
    a_acc.push_back({keys_finished[o]});
    a_dest.push_back({keys_finished[o], dest[o]});
    a_pick.push_back({keys_finished[o], pickup[o]});
    a_drop.push_back({keys_finished[o], dest[o]});
    a_leave.push_back({keys_finished[o]});
    a_req2.push_back({random_point(rng).to_string()});
  }
  stage(finished, chaincode::fn::kRequestRide, a_req, "12/5/2018 13:00");
  stage(active, chaincode::fn::kRequestRide, a_req2, "12/5/2018 13:00");
  stage(driver_of, chaincode::fn::kAcceptRide, a_acc, "12/5/2018 13:01");
  stage(finished, chaincode::fn::kSetRideDestination, a_dest, "12/5/2018 13:02");
  stage(driver_of, chaincode::fn::kPickupRider, a_pick, "12/5/2018 13:05");
  stage(driver_of, chaincode::fn::kDropoffRider, a_drop, "12/5/2018 13:20");
  stage(finished, chaincode::fn::kLeaveDriver, a_leave, "12/5/2018 13:21");

  const ledger::WorldState& state = net.peer(0).ledger().state();
  std::vector<std::string> all_keys;
  for (const auto& [key, _] : state.entries()) all_keys.push_back(key);

  AdversaryVerdict v;
  v.scenario = "malicious_query";
  std::size_t own_ok = 0, own_total = 0;
  auto owner_is = [](const std::string& key, const identity::Principal& p) {
    auto k = ledger::StateKey::parse(key);
    return k && k->parts().size() >= 2 && k->parts()[0] == p.msp.str() && k->parts()[1] == p.uid;
  };
  // Counts a leak when the gateway hands back the foreign record.
  auto attempt = [&](const User& u, const std::string& key, scenario::QueryPath path) {
    ++v.attempts;
    try {
      std::string got = scenario::query_as(net, u.client, *u.cred, key, path);
      const ledger::VersionedValue* real = state.get(key);
      if (real != nullptr && got == real->bytes) ++v.leaks;
    } catch (const Error&) {
      // denied
    }
  };

  for (const User& u : users) {
    const identity::Principal me = u.cred->principal();
    for (const std::string& key : all_keys) {
      if (owner_is(key, me)) {
        ++own_total;
        try {
          std::string got = scenario::query_as(net, u.client, *u.cred, key);
          if (got == state.get(key)->bytes) ++own_ok;
        } catch (const Error&) {
        }
        // Even one's own data is not reachable outside chaincode.
        attempt(u, key, scenario::QueryPath::kDirectState);
      } else {
        attempt(u, key, scenario::QueryPath::kChaincode);
        attempt(u, key, scenario::QueryPath::kDirectState);
      }
    }
  }
  // Randomized: foreign keys, keys spliced from other users' ids, and
  // namespace swaps.
  for (std::size_t i = 0; i < random_attempts; ++i) {
    const User& u = users[rng.below(users.size())];
    const identity::Principal me = u.cred->principal();
    const User& other = users[rng.below(users.size())];
    const identity::Principal them = other.cred->principal();
    std::string key;
    switch (rng.below(3)) {
      case 0: key = all_keys[rng.below(all_keys.size())]; break;
      case 1: key = chaincode::user_key(them).str(); break;
      default: key = chaincode::ride_request_key(them).str(); break;
    }
    if (owner_is(key, me)) continue;  // not an attack
    attempt(u, key, scenario::QueryPath::kChaincode);
  }
  v.passed = v.leaks == 0 && own_ok == own_total && own_total > 0;
  v.detail = std::to_string(own_ok) + "/" + std::to_string(own_total) +
             " self-owned reads served; " + std::to_string(all_keys.size()) + " keys in state";
  return v;
}

AdversaryVerdict run_stale_endorser(const config::NetworkConfig& base, std::uint64_t seed) {
  config::NetworkConfig cfg = base;
  cfg.policy = txflow::EndorsementPolicy::all_org_peers();
  network::FabricNetwork net(cfg);
  netsim::Rng rng(seed);
  AdversaryVerdict v;
  v.scenario = "stale_endorser";
  if (net.peer_count() < 2) {
    v.detail = "needs at least two peers";
    return v;
  }
  const identity::MspId home = net.registry().orgs().front().msp;
  const network::ClientId client = net.add_client("client", home);
  identity::Credential user = net.registry().enroll_identity(home, identity::Role::kRider, rng.next());
  register_users(net, {&user}, {});

  const std::size_t stale = net.peer_count() - 1;
  net.set_withholding(stale, true);
  std::optional<network::TxOutcome> upgrade, request;
  net.submit(client, user, std::string(chaincode::fn::kUpgradeToDriver), {},
             std::string(kBaseTime), [&](const network::TxOutcome& o) { upgrade = o; });
  net.scheduler().run();
  const std::string pickup = random_point(rng).to_string();
  net.submit(client, user, std::string(chaincode::fn::kRequestRide), {pickup},
             std::string(kBaseTime), [&](const network::TxOutcome& o) { request = o; });
  net.scheduler().run();
  v.attempts = 1;

  bool leaked = false;
  const std::string key = chaincode::ride_request_key(user.principal()).str();
  for (std::size_t p = 0; p < net.peer_count(); ++p) {
    if (net.peer(p).ledger().state().get(key) != nullptr) leaked = true;
  }
  if (request) {
    for (const ledger::Block& b : net.peer(0).ledger().blocks()) {
      for (const std::string& tx : b.txs) {
        if (tx.find(request->tx_id) != std::string::npos) leaked = true;
      }
    }
    if (request->status == network::TxStatus::kDivergence) ++v.divergences;
    if (request->status == network::TxStatus::kValid) ++v.committed;
  }
  v.passed = upgrade && upgrade->status == network::TxStatus::kValid && request &&
             request->status == network::TxStatus::kDivergence && request->retries == 1 &&
             !leaked;

  // Once the backlog is delivered the same request goes through.
  net.set_withholding(stale, false);
  net.scheduler().run();
  std::optional<network::TxOutcome> again;
  net.submit(client, user, std::string(chaincode::fn::kRequestRide), {pickup},
             std::string(kBaseTime), [&](const network::TxOutcome& o) { again = o; });
  net.scheduler().run();
  v.detail = std::string("request after catch-up: ") +
             (again ? std::string(network::to_string(again->status)) : "none");
  return v;
}

}  // namespace rhsim::workload
