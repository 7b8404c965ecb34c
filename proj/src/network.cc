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

#include "rhsim/network.h"

#include <algorithm>

#include "rhsim/error.h"

namespace rhsim::network {

std::string_view to_string(TxStatus s) {
  switch (s) {
    case TxStatus::kValid: return "valid";
    case TxStatus::kInvalid: return "invalid";
    case TxStatus::kPolicyUnsatisfied: return "policy_unsatisfied";
    case TxStatus::kDivergence: return "divergence";
    case TxStatus::kEndorsementError: return "endorsement_error";
  }
  return "";
}

struct FabricNetwork::Pending {
  ClientId client = 0;
  txflow::Proposal proposal;
  TxOutcome outcome;
  Callback done;
  std::size_t expected = 0;
  std::vector<txflow::Endorsement> responses;
  std::vector<std::string> errors;
  std::size_t event_peer = 0;
  bool acked = false;
  bool committed = false;
};

FabricNetwork::FabricNetwork(config::NetworkConfig config)
    : config_(std::move(config)),
      registry_(config_.seed),
      cutter_((config_.validate(), config_.ordering)) {
  net_ = std::make_unique<netsim::Network>(sched_, netsim::from_ms(config_.link_latency_ms));
  channel_.policy = config_.policy;
  channel_.chaincode = config_.chaincode.id;
  for (const config::OrgSpec& spec : config_.orgs) {
    const identity::Org& org = registry_.provision_org(spec.name, spec.peers, spec.orderers);
    for (const identity::Credential& cred : org.peers) {
      channel_.peers.push_back(txflow::PeerInfo{cred.principal(), org.msp});
    }
  }
  // Peers hold a pointer to channel_, so it is complete before they exist.
  std::size_t i = 0;
  for (const identity::Org& org : registry_.orgs()) {
    for (const identity::Credential& cred : org.peers) {
      PeerSlot slot;
      slot.peer = std::make_unique<txflow::Peer>(cred, registry_, channel_,
                                                 chaincode::RideHailChaincode(config_.chaincode));
      slot.node = net_->add_node(org.name + "/peer" + std::to_string(i++));
      peers_.push_back(std::move(slot));
    }
  }
  orderer_node_ = net_->add_node("orderer");
}

std::vector<std::size_t> FabricNetwork::peers_of(const identity::MspId& org) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < channel_.peers.size(); ++i) {
    if (channel_.peers[i].org == org) out.push_back(i);
  }
  return out;
}

ClientId FabricNetwork::add_client(std::string name, const identity::MspId& home_org) {
  for (const Client& c : clients_) {
    if (c.name == name) throw Error(ErrorCode::kInvalidArgument, "duplicate client " + name);
  }
  std::vector<std::size_t> home = peers_of(home_org);
  if (home.empty()) throw Error(ErrorCode::kUnknownOrg, home_org.str());
  Client c;
  c.node = net_->add_node("client/" + name);
  c.name = std::move(name);
  c.home = home_org;
  // Home org first, then the rest in channel order.
  c.visible = home;
  for (std::size_t i = 0; i < channel_.peers.size(); ++i) {
    if (channel_.peers[i].org != home_org) c.visible.push_back(i);
  }
  clients_.push_back(std::move(c));
  return static_cast<ClientId>(clients_.size() - 1);
}

void FabricNetwork::restrict_client(ClientId client, std::vector<std::size_t> peers) {
  if (peers.empty()) throw Error(ErrorCode::kInvalidArgument, "empty peer view");
  for (std::size_t p : peers) {
    if (p >= peers_.size()) throw Error(ErrorCode::kInvalidArgument, "no such peer");
  }
  clients_.at(client).visible = std::move(peers);
}

std::string FabricNetwork::next_nonce(Client& c) {
  return c.name + "#" + std::to_string(c.nonce++);
}

std::vector<std::size_t> FabricNetwork::choose_targets(Client& c) {
  using Kind = txflow::EndorsementPolicy::Kind;
  switch (channel_.policy.kind()) {
    case Kind::kAllOrgPeers:
      return c.visible;
    case Kind::kAnyOne:
      return {c.visible[c.round_robin++ % c.visible.size()]};
    case Kind::kCrossOrg: {
      // One peer from each of the first k + 1 reachable orgs, rotating
      // within each org.
      std::vector<identity::MspId> orgs;
      std::map<identity::MspId, std::vector<std::size_t>> by_org;
      for (std::size_t p : c.visible) {
        const identity::MspId& org = channel_.peers[p].org;
        if (!by_org.contains(org)) orgs.push_back(org);
        by_org[org].push_back(p);
      }
      std::size_t want = std::min(orgs.size(), static_cast<std::size_t>(channel_.policy.k()) + 1);
      std::vector<std::size_t> out;
      for (std::size_t i = 0; i < want; ++i) {
        const auto& members = by_org[orgs[i]];
        out.push_back(members[c.round_robin % members.size()]);
      }
      ++c.round_robin;
      return out;
    }
  }
  return {};
}

void FabricNetwork::submit(ClientId client, const identity::Credential& creator,
                           std::string function, std::vector<std::string> args,
                           std::string timestamp, Callback done) {
  submit_to(client, config_.chaincode.id, creator, std::move(function), std::move(args),
            std::move(timestamp), std::move(done));
}

void FabricNetwork::submit_to(ClientId client, const chaincode::ChaincodeId& chaincode,
                              const identity::Credential& creator, std::string function,
                              std::vector<std::string> args, std::string timestamp,
                              Callback done) {
  Client& c = clients_.at(client);
  auto p = std::make_shared<Pending>();
  p->client = client;
  p->proposal = txflow::make_proposal(creator, chaincode, function, std::move(args),
                                      std::move(timestamp), next_nonce(c));
  p->outcome.tx_id = p->proposal.tx_id;
  p->outcome.function = std::move(function);
  p->outcome.submitted = sched_.now();
  p->done = std::move(done);
  endorse_round(p);
}

void FabricNetwork::endorse_round(const std::shared_ptr<Pending>& p) {
  Client& c = clients_[p->client];
  std::vector<std::size_t> targets = choose_targets(c);
  p->expected = targets.size();
  p->responses.clear();
  p->errors.clear();
  const netsim::NodeProfile& prof = config_.profile;
  for (std::size_t t : targets) {
    net_->send(c.node, peers_[t].node, netsim::from_ms(prof.endorse_service_ms), [this, p, t] {
      // Simulated against the peer's state at the end of its service time.
      std::optional<txflow::Endorsement> e;
      std::string err;
      try {
        e = peers_[t].peer->endorse(p->proposal);
      } catch (const Error& ex) {
        err = ex.what();
      }
      const netsim::NodeId client_node = clients_[p->client].node;
      net_->send(peers_[t].node, client_node, netsim::from_ms(config_.profile.client_ms_per_message),
                 [this, p, e = std::move(e), err = std::move(err)]() mutable {
                   if (e) {
                     p->responses.push_back(std::move(*e));
                   } else {
                     p->errors.push_back(std::move(err));
                   }
                   if (p->responses.size() + p->errors.size() == p->expected) on_endorsed(p);
                 });
    });
  }
}

void FabricNetwork::on_endorsed(const std::shared_ptr<Pending>& p) {
  TxOutcome& out = p->outcome;
  out.endorsed = sched_.now();
  if (p->responses.empty()) {
    out.status = TxStatus::kEndorsementError;
    out.detail = p->errors.empty() ? "no endorsers" : p->errors.front();
    p->done(out);
    return;
  }
  txflow::CollectResult r = txflow::collect(channel_, registry_, p->proposal, p->responses);
  if (r.kind == txflow::CollectResult::Kind::kDivergence && out.retries == 0) {
    ++out.retries;
    endorse_round(p);
    return;
  }
  if (r.kind != txflow::CollectResult::Kind::kEndorsed) {
    out.status = r.kind == txflow::CollectResult::Kind::kDivergence ? TxStatus::kDivergence
                                                                   : TxStatus::kPolicyUnsatisfied;
    out.detail = r.detail;
    out.chaincode_error = r.chaincode_error;
    p->done(out);
    return;
  }

  out.response = r.tx->payload.response;
  out.event = r.tx->payload.event;
  out.order_submitted = sched_.now();
  Client& c = clients_[p->client];
  p->event_peer = c.visible.front();
  pending_[out.tx_id] = p;  // commit listener registered before submission
  OrderItem item{r.tx->encode(), r.tx->endorsements.size()};
  net_->send(c.node, orderer_node_, netsim::from_ms(config_.profile.order_service_ms),
             [this, p, item = std::move(item)]() mutable {
               orderer_receive(std::move(item));
               net_->send(orderer_node_, clients_[p->client].node,
                          netsim::from_ms(config_.profile.client_ms_per_message), [this, p] {
                            p->acked = true;
                            p->outcome.acked = sched_.now();
                            finish(p);
                          });
             });
}

void FabricNetwork::finish(const std::shared_ptr<Pending>& p) {
  if (!p->acked || !p->committed) return;
  pending_.erase(p->outcome.tx_id);
  p->done(p->outcome);
}

void FabricNetwork::orderer_receive(OrderItem item) {
  if (auto batch = cutter_.ordered(std::move(item), sched_.now())) {
    broadcast(std::move(*batch));
    return;
  }
  if (cutter_.pending() == 1) {
    const std::uint64_t gen = cutter_.generation();
    sched_.schedule(*cutter_.deadline(), [this, gen] {
      if (auto batch = cutter_.timer_fired(gen, sched_.now())) broadcast(std::move(*batch));
    });
  }
}

void FabricNetwork::broadcast(std::vector<OrderItem> batch) {
  const netsim::NodeProfile& prof = config_.profile;
  double service_ms = prof.commit_service_ms_per_block;
  std::vector<std::string> txs;
  txs.reserve(batch.size());
  for (OrderItem& item : batch) {
    service_ms += prof.commit_service_ms_per_tx +
                  prof.verify_ms_per_endorsement * static_cast<double>(item.endorsements);
    txs.push_back(std::move(item.bytes));
  }
  ledger::Block block = factory_.next(std::move(txs), sched_.now());
  const netsim::Duration service = netsim::from_ms(service_ms);
  for (std::size_t i = 0; i < peers_.size(); ++i) {
    if (peers_[i].withholding) {
      peers_[i].backlog.push_back(block);
    } else {
      deliver(i, block, service);
    }
  }
}

void FabricNetwork::deliver(std::size_t peer, const ledger::Block& block,
                            netsim::Duration service) {
  net_->send(orderer_node_, peers_[peer].node, service,
             [this, peer, block] { commit_at(peer, block); });
}

void FabricNetwork::commit_at(std::size_t peer, const ledger::Block& block) {
  PeerSlot& slot = peers_[peer];
  txflow::CommitReport report = slot.peer->commit(block);
  const netsim::Duration client_service = netsim::from_ms(config_.profile.client_ms_per_message);

  for (const txflow::CommittedTx& tx : report.txs) {
    auto it = pending_.find(tx.tx_id);
    if (it == pending_.end() || it->second->event_peer != peer) continue;
    std::shared_ptr<Pending> p = it->second;
    const bool valid = tx.valid;
    const std::uint64_t height = report.height;
    net_->send(slot.node, clients_[p->client].node, client_service, [this, p, valid, height] {
      p->committed = true;
      p->outcome.committed = sched_.now();
      p->outcome.status = valid ? TxStatus::kValid : TxStatus::kInvalid;
      p->outcome.block_height = height;
      finish(p);
    });
  }
  for (txflow::EventHub::Delivery& d : slot.hub.deliveries(report)) {
    auto h = handlers_.find(d.subscriber);
    if (h == handlers_.end()) continue;
    const ClientId client = h->second.first;
    net_->send(slot.node, clients_[client].node, client_service,
               [this, sub = d.subscriber, d = std::move(d)] {
                 EventDelivery ev{d.event, d.tx_id, d.block_height, sched_.now()};
                 handlers_.at(sub).second(ev);
               });
  }
}

void FabricNetwork::subscribe(ClientId client, std::string_view event_name,
                              EventHandler handler) {
  const Client& c = clients_.at(client);
  const txflow::EventHub::SubscriberId id = next_subscriber_;
  peers_[c.visible.front()].hub.subscribe(id, event_name);
  ++next_subscriber_;
  handlers_.emplace(id, std::make_pair(client, std::move(handler)));
}

txflow::Endorsement FabricNetwork::evaluate(ClientId client, const identity::Credential& creator,
                                            std::string function, std::vector<std::string> args,
                                            std::string timestamp) {
  Client& c = clients_.at(client);
  txflow::Proposal p = txflow::make_proposal(creator, config_.chaincode.id, std::move(function),
                                             std::move(args), std::move(timestamp), next_nonce(c));
  return peers_[c.visible.front()].peer->endorse(p);
}

std::vector<TxOutcome> FabricNetwork::bootstrap(const std::vector<Call>& calls) {
  if (cutter_.pending() != 0 || !pending_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "bootstrap needs an idle channel");
  }
  std::vector<TxOutcome> outcomes(calls.size());
  std::vector<std::string> envelopes;
  std::vector<std::size_t> envelope_owner;
  for (std::size_t i = 0; i < calls.size(); ++i) {
    const Call& call = calls[i];
    txflow::Proposal prop = txflow::make_proposal(
        *call.creator, config_.chaincode.id, call.function, call.args, call.timestamp,
        "bootstrap#" + std::to_string(bootstrap_nonce_++));
    TxOutcome& out = outcomes[i];
    out.tx_id = prop.tx_id;
    out.function = call.function;
    out.submitted = out.endorsed = out.order_submitted = sched_.now();
    std::vector<txflow::Endorsement> ends;
    for (PeerSlot& slot : peers_) ends.push_back(slot.peer->endorse(prop));
    txflow::CollectResult r = txflow::collect(channel_, registry_, prop, ends);
    if (r.kind != txflow::CollectResult::Kind::kEndorsed) {
      out.status = r.kind == txflow::CollectResult::Kind::kDivergence
                       ? TxStatus::kDivergence
                       : TxStatus::kPolicyUnsatisfied;
      out.detail = r.detail;
      out.chaincode_error = r.chaincode_error;
      continue;
    }
    out.response = r.tx->payload.response;
    out.event = r.tx->payload.event;
    envelopes.push_back(r.tx->encode());
    envelope_owner.push_back(i);
  }

  const std::size_t max = config_.ordering.max_message_count;
  for (std::size_t start = 0; start < envelopes.size(); start += max) {
    const std::size_t end = std::min(envelopes.size(), start + max);
    std::vector<std::string> txs(envelopes.begin() + start, envelopes.begin() + end);
    ledger::Block block = factory_.next(std::move(txs), sched_.now());
    std::optional<txflow::CommitReport> first;
    for (PeerSlot& slot : peers_) {
      txflow::CommitReport rep = slot.peer->commit(block);
      if (!first) first = std::move(rep);
    }
    for (std::size_t k = start; k < end; ++k) {
      TxOutcome& out = outcomes[envelope_owner[k]];
      out.acked = out.committed = sched_.now();
      out.block_height = first->height;
      out.status = first->txs[k - start].valid ? TxStatus::kValid : TxStatus::kInvalid;
    }
  }
  return outcomes;
}

void FabricNetwork::set_withholding(std::size_t peer, bool on) {
  PeerSlot& slot = peers_.at(peer);
  slot.withholding = on;
  if (on) return;
  const netsim::NodeProfile& prof = config_.profile;
  while (!slot.backlog.empty()) {
    ledger::Block b = std::move(slot.backlog.front());
    slot.backlog.pop_front();
    // Endorsement counts are gone by now; catch-up skips the per-signature
    // cost.
    deliver(peer, b,
            netsim::from_ms(prof.commit_service_ms_per_block +
                            prof.commit_service_ms_per_tx * static_cast<double>(b.txs.size())));
  }
}

}  // namespace rhsim::network
