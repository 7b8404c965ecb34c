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

// rhsim: scenarios, benchmarks, sweeps, adversary runs and chain dumps.
//
// Exit codes: 0 success, 1 failed assertion or verdict, 2 usage or config
// error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rhsim/config.h"
#include "rhsim/error.h"
#include "rhsim/ledger.h"
#include "rhsim/network.h"
#include "rhsim/scenario.h"
#include "rhsim/workload.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rhsim;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

// Written beside the target and renamed, so readers never see half a file.
void write_atomic(const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kConfigError, "cannot write " + tmp.string());
    f << body;
  }
  fs::rename(tmp, path);
}

config::NetworkConfig load_config(const Globals& g) {
  config::NetworkConfig c = g.config_path.empty() ? config::NetworkConfig::uniform(2, 2)
                                                  : config::NetworkConfig::load(g.config_path);
  c.seed = *g.seed;
  c.validate();
  return c;
}

fs::path out_dir(const Globals& g) { return g.out.empty() ? fs::path(".") : fs::path(g.out); }

int cmd_scenario(const Globals& g, const std::string& file, bool dump_blocks) {
  if (!fs::exists(file)) throw Error(ErrorCode::kConfigError, "no such scenario file: " + file);
  const scenario::Script script = scenario::Script::load(file);
  const config::NetworkConfig cfg = load_config(g);
  network::FabricNetwork net(cfg);
  scenario::Runner runner(script, net);
  const scenario::ScenarioReport report = runner.run();

  if (dump_blocks) {
    std::string text;
    for (const ledger::Block& b : net.peer(0).ledger().blocks()) {
      text += ledger::to_dump_line(b) + "\n";
    }
    if (g.out.empty()) {
      std::cout << text;
    } else {
      write_atomic(out_dir(g) / "blocks.jsonl", text);
      std::cout << "wrote " << (out_dir(g) / "blocks.jsonl").string() << " ("
                << net.peer(0).ledger().blocks().size() << " blocks, tip "
                << to_hex(net.peer(0).ledger().tip_hash()) << ")\n";
    }
    if (!report.passed()) std::cerr << "scenario failed: " << report.error << "\n";
    return report.passed() ? kOk : kFailed;
  }

  for (const scenario::CheckResult& c : report.checks) {
    std::cout << (c.passed ? "ok   " : "FAIL ") << c.what;
    if (!c.passed && !c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
  }
  if (report.failed_step) {
    std::cout << "FAIL step " << *report.failed_step << ": " << report.error << "\n";
  }
  if (!g.out.empty()) write_atomic(out_dir(g) / "scenario.json", report.to_json().dump(2) + "\n");
  return report.passed() ? kOk : kFailed;
}

struct BenchFlags {
  std::string profile = "constant";
  double delay_ms = 100;
  double deviation = 0.3;
  std::optional<double> lambda_tps;
  std::optional<double> lambda_interarrival_ms;
  std::size_t rides = 1000;
  std::optional<int> submitters;
};

workload::BenchOptions bench_options(const Globals& g, const BenchFlags& f) {
  workload::BenchOptions o;
  o.rides = f.rides;
  o.seed = *g.seed;
  o.total_submitters = f.submitters;
  if (f.profile == "constant") {
    if (f.lambda_tps || f.lambda_interarrival_ms) {
      throw Error(ErrorCode::kConfigError, "lambda flags need --profile poisson");
    }
    o.traffic = workload::TrafficProfile::constant(f.delay_ms, f.deviation);
  } else if (f.profile == "poisson") {
    if (f.lambda_tps.has_value() == f.lambda_interarrival_ms.has_value()) {
      throw Error(ErrorCode::kConfigError,
                  "poisson needs exactly one of --lambda-tps, --lambda-interarrival-ms");
    }
    o.traffic = f.lambda_tps
                    ? workload::TrafficProfile::poisson(*f.lambda_tps)
                    : workload::TrafficProfile::poisson_interarrival(*f.lambda_interarrival_ms);
  } else {
    throw Error(ErrorCode::kConfigError, "unknown profile " + f.profile);
  }
  if (o.rides == 0) throw Error(ErrorCode::kConfigError, "--rides must be positive");
  return o;
}

int cmd_bench(const Globals& g, const BenchFlags& f) {
  const config::NetworkConfig cfg = load_config(g);
  const workload::BenchReport r = workload::run_bench(cfg, bench_options(g, f));
  write_atomic(out_dir(g) / "bench.csv", r.csv());
  write_atomic(out_dir(g) / "bench.json", r.summary().dump(2) + "\n");
  std::cout << r.summary().dump(2) << "\n";
  return kOk;
}

struct SweepFlags {
  std::string axis = "peers";
  int from = 1;
  int to = 4;
  std::string policy = "ALL_ORG_PEERS";
  bool scale_traffic = false;
};

int cmd_sweep(const Globals& g, const BenchFlags& bf, const SweepFlags& sf) {
  const config::NetworkConfig cfg = load_config(g);
  workload::SweepSpec spec;
  if (sf.axis == "peers") {
    spec.axis = workload::SweepSpec::Axis::kPeers;
  } else if (sf.axis == "orgs") {
    spec.axis = workload::SweepSpec::Axis::kOrgs;
  } else {
    throw Error(ErrorCode::kConfigError, "--axis must be peers or orgs");
  }
  spec.from = sf.from;
  spec.to = sf.to;
  spec.policy = txflow::EndorsementPolicy::parse(sf.policy);
  spec.scale_traffic = sf.scale_traffic;
  const auto points = workload::run_sweep(cfg, spec, bench_options(g, bf));
  for (const workload::SweepPoint& p : points) {
    const std::string stem = "point_" + sf.axis + "_" + std::to_string(p.value);
    write_atomic(out_dir(g) / (stem + ".csv"), p.report.csv());
    write_atomic(out_dir(g) / (stem + ".json"), p.report.summary().dump(2) + "\n");
  }
  const std::string trend = workload::trend_csv(spec, points);
  write_atomic(out_dir(g) / "trend.csv", trend);
  std::cout << trend;
  return kOk;
}

int cmd_adversary(const Globals& g, const std::string& which, const std::string& policy,
                  std::size_t attempts) {
  const config::NetworkConfig cfg = load_config(g);
  std::vector<workload::AdversaryVerdict> verdicts;
  const bool all = which == "all";
  if (all || which == "eclipse") {
    if (all) {
      verdicts.push_back(workload::run_eclipse(cfg, txflow::EndorsementPolicy::cross_org(1),
                                               attempts, *g.seed));
      verdicts.push_back(workload::run_eclipse(cfg, txflow::EndorsementPolicy::any_one(),
                                               attempts, *g.seed));
    } else {
      verdicts.push_back(workload::run_eclipse(cfg, txflow::EndorsementPolicy::parse(policy),
                                               attempts, *g.seed));
    }
  }
  if (all || which == "malicious-query") {
    verdicts.push_back(workload::run_malicious_query(cfg, attempts, *g.seed));
  }
  if (all || which == "stale-endorser") {
    verdicts.push_back(workload::run_stale_endorser(cfg, *g.seed));
  }
  if (verdicts.empty()) {
    throw Error(ErrorCode::kConfigError,
                "--scenario must be eclipse, malicious-query, stale-endorser or all");
  }
  json out = json::array();
  bool ok = true;
  for (const auto& v : verdicts) {
    std::cout << (v.passed ? "PASS " : "FAIL ") << v.scenario << ": " << v.detail << "\n";
    ok = ok && v.passed;
    out.push_back(v.to_json());
  }
  if (!g.out.empty()) write_atomic(out_dir(g) / "adversary.json", out.dump(2) + "\n");
  return ok ? kOk : kFailed;
}

int cmd_verify_chain(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  const ledger::DumpCheck c = ledger::verify_dump(ss.str());
  if (c.ok) {
    std::cout << "chain ok: " << c.blocks << " blocks\n";
    return kOk;
  }
  std::cout << "chain broken at line " << c.bad_line.value_or(0) << ": " << c.error << "\n";
  return kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ride-hailing on a simulated permissioned ledger"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Network topology JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "RNG seed (required for simulating commands)");
  app.add_option("--out", g.out, "Output directory");

  std::string scenario_file;
  auto* scen = app.add_subcommand("scenario", "Run a scripted scenario and its assertions");
  scen->add_option("file", scenario_file, "Scenario JSON")->required();

  BenchFlags bf;
  auto add_bench_flags = [&bf](CLI::App* sub) {
    sub->add_option("--profile", bf.profile, "constant | poisson");
    sub->add_option("--delay-ms", bf.delay_ms, "Constant-rate mean delay");
    sub->add_option("--deviation", bf.deviation, "Constant-rate deviation fraction");
    sub->add_option("--lambda-tps", bf.lambda_tps, "Poisson rate, tx/s over all submitters");
    sub->add_option("--lambda-interarrival-ms", bf.lambda_interarrival_ms,
                    "Poisson mean inter-arrival in ms");
    sub->add_option("--rides", bf.rides, "Rides to run (6 txs each)");
    sub->add_option("--submitters", bf.submitters, "Total submitters, overriding the config");
  };
  auto* bench = app.add_subcommand("bench", "Run the ride benchmark");
  add_bench_flags(bench);

  SweepFlags sf;
  auto* sweep = app.add_subcommand("sweep", "Benchmark across topologies");
  add_bench_flags(sweep);
  sweep->add_option("--axis", sf.axis, "peers | orgs");
  sweep->add_option("--from", sf.from);
  sweep->add_option("--to", sf.to);
  sweep->add_option("--policy", sf.policy, "ALL_ORG_PEERS | ANY_ONE | CROSS_ORG:k");
  sweep->add_flag("--scale-traffic", sf.scale_traffic, "Orgs axis: scale submitters and rides");

  std::string adv_which = "all";
  std::string adv_policy = "CROSS_ORG:1";
  std::size_t adv_attempts = 100;
  auto* adv = app.add_subcommand("adversary", "Run attack scenarios and report verdicts");
  adv->add_option("--scenario", adv_which, "eclipse | malicious-query | stale-endorser | all");
  adv->add_option("--policy", adv_policy, "Eclipse policy when run alone");
  adv->add_option("--attempts", adv_attempts, "Attempts per scenario");

  std::string dump_file;
  auto* dump = app.add_subcommand("dump", "Run a scenario and dump peer 0's block store");
  dump->add_option("file", dump_file, "Scenario JSON")->required();

  std::string verify_file;
  auto* verify = app.add_subcommand("verify-chain", "Check a block dump's hash chain");
  verify->add_option("file", verify_file, "Dump produced by `rhsim dump`")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify_chain(verify_file);
    if (!g.seed) {
      std::cerr << "error: --seed is required\n";
      return kUsage;
    }
    if (scen->parsed()) return cmd_scenario(g, scenario_file, false);
    if (dump->parsed()) return cmd_scenario(g, dump_file, true);
    if (bench->parsed()) return cmd_bench(g, bf);
    if (sweep->parsed()) return cmd_sweep(g, bf, sf);
    if (adv->parsed()) return cmd_adversary(g, adv_which, adv_policy, adv_attempts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfigError || e.code() == ErrorCode::kScenarioError ||
                   e.code() == ErrorCode::kInvalidArgument
               ? kUsage
               : kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
