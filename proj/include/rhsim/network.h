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

// A simulated channel: peers, one ordering service and client processes,
// each a netsim node with its own FIFO server. Every interaction between
// them is a netsim message, so all timing comes from the scheduler.
//
// Transaction life cycle as seen by a client:
//   submitted -> endorsements back (peer latency)
//   -> envelope sent to ordering, commit listener registered
//   -> ack from ordering (orderer latency)
//   -> commit event from the client's event peer (event latency)

#ifndef RHSIM_NETWORK_H_
#define RHSIM_NETWORK_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rhsim/chaincode.h"
#include "rhsim/config.h"
#include "rhsim/identity.h"
#include "rhsim/netsim.h"
#include "rhsim/txflow.h"

namespace rhsim::network {

enum class TxStatus {
  kValid,
  kInvalid,
  kPolicyUnsatisfied,
  kDivergence,
  // No endorser would simulate (version mismatch, bad signature).
  kEndorsementError,
};

std::string_view to_string(TxStatus s);

struct TxOutcome {
  std::string tx_id;
  std::string function;
  TxStatus status = TxStatus::kPolicyUnsatisfied;
  std::string detail;
  // Set when every endorser rejected the proposal.
  std::string chaincode_error;
  std::string response;
  std::optional<chaincode::RideEvent> event;
  netsim::Time submitted{};
  netsim::Time endorsed{};
  netsim::Time order_submitted{};
  netsim::Time acked{};
  netsim::Time committed{};
  std::uint64_t block_height = 0;
  int retries = 0;

  bool ordered() const noexcept {
    return status == TxStatus::kValid || status == TxStatus::kInvalid;
  }
  double peer_ms() const { return netsim::to_ms(endorsed - submitted); }
  double orderer_ms() const { return ordered() ? netsim::to_ms(acked - order_submitted) : 0.0; }
  // Registration to the later of commit event and ack.
  double event_ms() const {
    return ordered() ? netsim::to_ms(std::max(committed, acked) - order_submitted) : 0.0;
  }
};

struct EventDelivery {
  chaincode::RideEvent event;
  std::string tx_id;
  std::uint64_t block_height = 0;
  netsim::Time received{};
};

using ClientId = std::uint32_t;

class FabricNetwork {
 public:
  using Callback = std::function<void(const TxOutcome&)>;
  using EventHandler = std::function<void(const EventDelivery&)>;

  // Provisions every org and peer and starts an empty channel.
  explicit FabricNetwork(config::NetworkConfig config);
  FabricNetwork(const FabricNetwork&) = delete;
  FabricNetwork& operator=(const FabricNetwork&) = delete;

  const config::NetworkConfig& config() const noexcept { return config_; }
  identity::Registry& registry() noexcept { return registry_; }
  netsim::Scheduler& scheduler() noexcept { return sched_; }
  netsim::Network& net() noexcept { return *net_; }
  const txflow::Channel& channel() const noexcept { return channel_; }

  std::size_t peer_count() const noexcept { return peers_.size(); }
  const txflow::Peer& peer(std::size_t i) const { return *peers_.at(i).peer; }
  netsim::NodeId peer_node(std::size_t i) const { return peers_.at(i).node; }
  std::vector<std::size_t> peers_of(const identity::MspId& org) const;
  netsim::NodeId orderer_node() const noexcept { return orderer_node_; }
  std::uint64_t blocks_cut() const noexcept { return factory_.height(); }

  // A client process. Its event peer is the first peer of `home_org`.
  ClientId add_client(std::string name, const identity::MspId& home_org);
  // Limits the peers a client can reach (eclipse); the first becomes its
  // event peer.
  void restrict_client(ClientId client, std::vector<std::size_t> peers);
  netsim::NodeId client_node(ClientId client) const { return clients_.at(client).node; }

  // Starts a transaction now; `done` runs once the outcome is final.
  void submit(ClientId client, const identity::Credential& creator, std::string function,
              std::vector<std::string> args, std::string timestamp, Callback done);
  // As submit, naming an explicit chaincode id (for version checks).
  void submit_to(ClientId client, const chaincode::ChaincodeId& chaincode,
                 const identity::Credential& creator, std::string function,
                 std::vector<std::string> args, std::string timestamp, Callback done);

  // Registers for RideEvents at the client's event peer.
  // Throws Error(kUnknownEvent).
  void subscribe(ClientId client, std::string_view event_name, EventHandler handler);

  // Evaluates on the client's event peer without ordering and without
  // advancing time. Chaincode errors come back as a rejected endorsement.
  txflow::Endorsement evaluate(ClientId client, const identity::Credential& creator,
                               std::string function, std::vector<std::string> args,
                               std::string timestamp);

  struct Call {
    const identity::Credential* creator = nullptr;
    std::string function;
    std::vector<std::string> args;
    std::string timestamp;
  };
  // Setup path outside simulated time: endorses on every peer, cuts blocks
  // and commits them everywhere immediately. Requires an idle ordering
  // service.
  std::vector<TxOutcome> bootstrap(const std::vector<Call>& calls);

  // While on, blocks for `peer` are buffered instead of delivered; turning
  // it off delivers the backlog in order.
  void set_withholding(std::size_t peer, bool on);

  // Outcomes still waiting on endorsement, ack or commit.
  std::size_t in_flight() const noexcept { return pending_.size(); }

 private:
  struct PeerSlot {
    std::unique_ptr<txflow::Peer> peer;
    netsim::NodeId node;
    txflow::EventHub hub;
    bool withholding = false;
    std::deque<ledger::Block> backlog;
  };
  struct Client {
    std::string name;
    netsim::NodeId node;
    identity::MspId home;
    std::vector<std::size_t> visible;
    std::size_t round_robin = 0;
    std::uint64_t nonce = 0;
  };
  struct Pending;
  struct OrderItem {
    std::string bytes;
    std::size_t endorsements = 0;
  };

  std::vector<std::size_t> choose_targets(Client& c);
  void endorse_round(const std::shared_ptr<Pending>& p);
  void on_endorsed(const std::shared_ptr<Pending>& p);
  void finish(const std::shared_ptr<Pending>& p);
  void orderer_receive(OrderItem item);
  void broadcast(std::vector<OrderItem> batch);
  void deliver(std::size_t peer, const ledger::Block& block, netsim::Duration service);
  void commit_at(std::size_t peer, const ledger::Block& block);
  std::string next_nonce(Client& c);

  config::NetworkConfig config_;
  identity::Registry registry_;
  netsim::Scheduler sched_;
  std::unique_ptr<netsim::Network> net_;
  txflow::Channel channel_;
  std::vector<PeerSlot> peers_;
  netsim::NodeId orderer_node_;
  txflow::BlockCutter<OrderItem> cutter_;
  txflow::BlockFactory factory_;
  std::vector<Client> clients_;
  std::map<txflow::EventHub::SubscriberId, std::pair<ClientId, EventHandler>> handlers_;
  txflow::EventHub::SubscriberId next_subscriber_ = 0;
  std::map<std::string, std::shared_ptr<Pending>> pending_;
  std::uint64_t bootstrap_nonce_ = 0;
};

}  // namespace rhsim::network

#endif  // RHSIM_NETWORK_H_
