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

#include "rhsim/txflow.h"

#include <charconv>

#include "rhsim/error.h"

namespace rhsim::txflow {

using nlohmann::json;

namespace {

json principal_to_json(const identity::Principal& p) {
  return json{{"msp", p.msp.str()}, {"uid", p.uid}};
}

identity::Principal principal_from_json(const json& j) {
  return identity::Principal{identity::MspId(j.at("msp").get<std::string>()),
                             j.at("uid").get<std::string>()};
}

json signature_to_json(const identity::Signature& s) {
  return json{{"digest", to_hex(s.payload_digest)},
              {"signer", principal_to_json(s.signer)},
              {"tag", to_hex(std::string_view(s.bytes))}};
}

std::string unhex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::kInvalidArgument, "odd hex length");
  std::string out(hex.size() / 2, '\0');
  for (std::size_t i = 0; i < out.size(); ++i) {
    unsigned v = 0;
    auto [p, ec] = std::from_chars(hex.data() + 2 * i, hex.data() + 2 * i + 2, v, 16);
    if (ec != std::errc() || p != hex.data() + 2 * i + 2) {
      throw Error(ErrorCode::kInvalidArgument, "bad hex");
    }
    out[i] = static_cast<char>(v);
  }
  return out;
}

identity::Signature signature_from_json(const json& j) {
  identity::Signature s;
  s.signer = principal_from_json(j.at("signer"));
  s.bytes = unhex(j.at("tag").get<std::string>());
  auto d = digest_from_hex(j.at("digest").get<std::string>());
  if (!d) throw Error(ErrorCode::kInvalidArgument, "bad digest");
  s.payload_digest = *d;
  return s;
}

json proposal_body(const Proposal& p) {
  return json{{"args", p.args},
              {"chaincode", {{"name", p.chaincode.name}, {"version", p.chaincode.version}}},
              {"creator", principal_to_json(p.creator)},
              {"fn", p.function},
              {"timestamp", p.timestamp},
              {"tx_id", p.tx_id}};
}

bool verifies(const identity::Registry& registry, const identity::Signature& sig,
              std::string_view payload) {
  try {
    return registry.verify(sig, payload);
  } catch (const Error&) {
    return false;  // unknown signer
  }
}

bool verifies_digest(const identity::Registry& registry, const identity::Signature& sig,
                     const Digest& digest) {
  try {
    return registry.verify_digest(sig, digest);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

std::string Proposal::signed_bytes() const { return proposal_body(*this).dump(); }

json Proposal::to_json() const {
  json j = proposal_body(*this);
  j["signature"] = signature_to_json(signature);
  return j;
}

Proposal Proposal::from_json(const json& j) {
  Proposal p;
  p.tx_id = j.at("tx_id").get<std::string>();
  p.creator = principal_from_json(j.at("creator"));
  p.chaincode.name = j.at("chaincode").at("name").get<std::string>();
  p.chaincode.version = j.at("chaincode").at("version").get<std::string>();
  p.function = j.at("fn").get<std::string>();
  p.args = j.at("args").get<std::vector<std::string>>();
  p.timestamp = j.at("timestamp").get<std::string>();
  p.signature = signature_from_json(j.at("signature"));
  return p;
}

Proposal make_proposal(const identity::Credential& creator,
                       const chaincode::ChaincodeId& chaincode, std::string function,
                       std::vector<std::string> args, std::string timestamp,
                       std::string_view nonce) {
  Proposal p;
  p.creator = creator.principal();
  p.tx_id = to_hex(sha256("rhsim/tx|" + p.creator.msp.str() + "|" + p.creator.uid +
                          "|" + std::string(nonce)));
  p.chaincode = chaincode;
  p.function = std::move(function);
  p.args = std::move(args);
  p.timestamp = std::move(timestamp);
  p.signature = creator.sign(p.signed_bytes());
  return p;
}

json ResponsePayload::to_json() const {
  return json{{"accepted", accepted},
              {"error", error},
              {"event", event ? event->to_json() : json(nullptr)},
              {"response", response},
              {"rwset", rwset.to_json()},
              {"tx_id", tx_id}};
}

std::string ResponsePayload::encode() const { return to_json().dump(); }

std::string ResponsePayload::signing_bytes() const {
  return json{{"accepted", accepted},
              {"error", error},
              {"event", event ? event->to_json() : json(nullptr)},
              {"response", response},
              {"rwset_digest", to_hex(sha256(rwset.encode()))},
              {"tx_id", tx_id}}
      .dump();
}

ResponsePayload ResponsePayload::from_json(const json& j) {
  ResponsePayload p;
  p.tx_id = j.at("tx_id").get<std::string>();
  p.accepted = j.at("accepted").get<bool>();
  p.rwset = ledger::ReadWriteSet::from_json(j.at("rwset"));
  p.response = j.at("response").get<std::string>();
  if (!j.at("event").is_null()) p.event = chaincode::RideEvent::from_json(j.at("event"));
  p.error = j.at("error").get<std::string>();
  return p;
}

EndorsementPolicy EndorsementPolicy::cross_org(int k) {
  if (k < 1) throw Error(ErrorCode::kConfigError, "CROSS_ORG needs k >= 1");
  return EndorsementPolicy(Kind::kCrossOrg, k);
}

EndorsementPolicy EndorsementPolicy::parse(std::string_view text) {
  if (text == "ALL_ORG_PEERS") return all_org_peers();
  if (text == "ANY_ONE") return any_one();
  constexpr std::string_view kCross = "CROSS_ORG:";
  if (text.starts_with(kCross)) {
    std::string_view num = text.substr(kCross.size());
    int k = 0;
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
    if (ec == std::errc() && p == num.data() + num.size() && !num.empty()) {
      return cross_org(k);
    }
  }
  throw Error(ErrorCode::kConfigError, "unknown policy '" + std::string(text) + "'");
}

std::string EndorsementPolicy::to_string() const {
  switch (kind_) {
    case Kind::kAllOrgPeers: return "ALL_ORG_PEERS";
    case Kind::kAnyOne: return "ANY_ONE";
    case Kind::kCrossOrg: return "CROSS_ORG:" + std::to_string(k_);
  }
  return {};
}

bool EndorsementPolicy::satisfied(const std::set<identity::Principal>& endorsers,
                                  std::span<const PeerInfo> channel_peers) const {
  std::size_t members = 0;
  std::set<identity::MspId> orgs;
  for (const PeerInfo& peer : channel_peers) {
    if (!endorsers.contains(peer.principal)) continue;
    ++members;
    orgs.insert(peer.org);
  }
  switch (kind_) {
    case Kind::kAllOrgPeers:
      return !channel_peers.empty() && members == channel_peers.size();
    case Kind::kAnyOne:
      return members >= 1;
    case Kind::kCrossOrg:
      return orgs.size() >= static_cast<std::size_t>(k_) + 1;
  }
  return false;
}

const PeerInfo* Channel::find(const identity::Principal& p) const {
  for (const PeerInfo& info : peers) {
    if (info.principal == p) return &info;
  }
  return nullptr;
}

std::string EndorsedTx::encode() const {
  json sigs = json::array();
  for (const EndorserSignature& e : endorsements) {
    sigs.push_back(json{{"endorser", principal_to_json(e.endorser)},
                        {"signature", signature_to_json(e.signature)}});
  }
  return json{{"endorsements", std::move(sigs)},
              {"payload", payload.to_json()},
              {"proposal", proposal.to_json()}}
      .dump();
}

EndorsedTx EndorsedTx::decode(std::string_view bytes) {
  json j = json::parse(bytes);
  EndorsedTx tx;
  tx.proposal = Proposal::from_json(j.at("proposal"));
  tx.payload = ResponsePayload::from_json(j.at("payload"));
  for (const json& e : j.at("endorsements")) {
    tx.endorsements.push_back(EndorserSignature{principal_from_json(e.at("endorser")),
                                                signature_from_json(e.at("signature"))});
  }
  return tx;
}

std::string_view to_string(CollectResult::Kind k) {
  switch (k) {
    case CollectResult::Kind::kEndorsed: return "Endorsed";
    case CollectResult::Kind::kPolicyUnsatisfied: return "PolicyUnsatisfied";
    case CollectResult::Kind::kDivergence: return "Divergence";
  }
  return "";
}

CollectResult collect(const Channel& channel, const identity::Registry& registry,
                      const Proposal& proposal,
                      std::span<const Endorsement> endorsements) {
  std::vector<const Endorsement*> accepted;
  std::vector<const Endorsement*> rejected;
  for (const Endorsement& e : endorsements) {
    if (e.payload.tx_id != proposal.tx_id || e.signature.signer != e.endorser ||
        !verifies(registry, e.signature, e.payload.signing_bytes())) {
      continue;
    }
    (e.accepted() ? accepted : rejected).push_back(&e);
  }

  CollectResult out;
  if (accepted.empty()) {
    out.kind = CollectResult::Kind::kPolicyUnsatisfied;
    if (!rejected.empty()) {
      out.chaincode_error = rejected.front()->payload.error;
      out.detail = "rejected: " + rejected.front()->payload.response;
    } else {
      out.detail = "no valid endorsements";
    }
    return out;
  }
  const std::string reference = accepted.front()->payload.encode();
  for (const Endorsement* e : accepted) {
    if (e->payload.encode() != reference) {
      out.kind = CollectResult::Kind::kDivergence;
      out.detail = "endorsers returned different read-write sets";
      return out;
    }
  }
  if (!rejected.empty()) {
    out.kind = CollectResult::Kind::kDivergence;
    out.detail = "endorsers disagree on the outcome";
    return out;
  }
  std::set<identity::Principal> who;
  for (const Endorsement* e : accepted) who.insert(e->endorser);
  if (!channel.policy.satisfied(who, channel.peers)) {
    out.kind = CollectResult::Kind::kPolicyUnsatisfied;
    out.detail = "policy " + channel.policy.to_string() + " not satisfied by " +
                 std::to_string(who.size()) + " endorsement(s)";
    return out;
  }
  EndorsedTx tx{proposal, accepted.front()->payload, {}};
  for (const Endorsement* e : accepted) {
    tx.endorsements.push_back(EndorserSignature{e->endorser, e->signature});
  }
  out.kind = CollectResult::Kind::kEndorsed;
  out.tx = std::move(tx);
  return out;
}

void OrderingConfig::validate() const {
  if (batch_timeout <= netsim::Duration::zero()) {
    throw Error(ErrorCode::kConfigError, "batch_timeout must be positive");
  }
  if (max_message_count == 0) {
    throw Error(ErrorCode::kConfigError, "max_message_count must be positive");
  }
}

BlockFactory::BlockFactory() : tip_(ledger::make_genesis().hash()) {}

ledger::Block BlockFactory::next(std::vector<std::string> txs, netsim::Time now) {
  ledger::Block b;
  b.height = ++height_;
  b.prev_hash = tip_;
  b.timestamp_us = now.time_since_epoch().count();
  b.txs = std::move(txs);
  tip_ = b.hash();
  return b;
}

Peer::Peer(identity::Credential credential, const identity::Registry& registry,
           const Channel& channel, chaincode::RideHailChaincode chaincode)
    : credential_(std::move(credential)),
      registry_(&registry),
      channel_(&channel),
      chaincode_(std::move(chaincode)) {}

Endorsement Peer::endorse(const Proposal& proposal) const {
  const chaincode::ChaincodeId& installed = chaincode_.config().id;
  if (proposal.chaincode != installed) {
    throw Error(ErrorCode::kVersionMismatch,
                "proposal targets " + proposal.chaincode.name + ":" +
                    proposal.chaincode.version + ", installed " + installed.name + ":" +
                    installed.version);
  }
  if (proposal.signature.signer != proposal.creator ||
      !verifies(*registry_, proposal.signature, proposal.signed_bytes())) {
    throw Error(ErrorCode::kBadSignature, "proposal " + proposal.tx_id);
  }

  ResponsePayload payload;
  payload.tx_id = proposal.tx_id;
  chaincode::Invocation inv{
      chaincode::Caller{proposal.creator.msp, proposal.creator.uid}, proposal.tx_id,
      proposal.function, proposal.args, proposal.timestamp};
  ledger::TxSimulator sim(ledger_.state());
  try {
    chaincode::InvokeResult r = chaincode_.invoke(inv, sim);
    payload.accepted = true;
    payload.rwset = sim.take_rwset();
    payload.response = std::move(r.response);
    payload.event = std::move(r.event);
  } catch (const Error& e) {
    payload.accepted = false;
    payload.error = std::string(rhsim::to_string(e.code()));
    payload.response = e.what();
  }

  Endorsement out;
  out.endorser = principal();
  out.signature = credential_.sign(payload.signing_bytes());
  out.payload = std::move(payload);
  return out;
}

std::optional<ledger::ReadWriteSet> Peer::precheck(const EndorsedTx& tx) const {
  const Proposal& p = tx.proposal;
  if (p.chaincode != chaincode_.config().id) return std::nullopt;
  if (p.signature.signer != p.creator || !verifies(*registry_, p.signature, p.signed_bytes())) {
    return std::nullopt;
  }
  if (tx.payload.tx_id != p.tx_id || !tx.payload.accepted) return std::nullopt;
  const Digest signed_digest = sha256(tx.payload.signing_bytes());
  std::set<identity::Principal> endorsers;
  for (const EndorserSignature& e : tx.endorsements) {
    if (channel_->find(e.endorser) == nullptr || e.signature.signer != e.endorser ||
        !verifies_digest(*registry_, e.signature, signed_digest)) {
      return std::nullopt;
    }
    endorsers.insert(e.endorser);
  }
  if (!channel_->policy.satisfied(endorsers, channel_->peers)) return std::nullopt;
  return tx.payload.rwset;
}

CommitReport Peer::commit(ledger::Block block) {
  CommitReport report;
  report.height = block.height;
  report.txs.resize(block.txs.size());
  // Decoded once; the ledger's precheck callback runs in tx order.
  auto check = [&](std::size_t i, std::string_view bytes) -> std::optional<ledger::ReadWriteSet> {
    std::optional<EndorsedTx> tx;
    try {
      tx = EndorsedTx::decode(bytes);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    CommittedTx& slot = report.txs[i];
    slot.tx_id = tx->proposal.tx_id;
    slot.event = tx->payload.event;
    if (!seen_tx_ids_.insert(slot.tx_id).second) return std::nullopt;  // replay
    return precheck(*tx);
  };
  std::vector<bool> flags = ledger_.commit_block(std::move(block), check);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    report.txs[i].valid = flags[i];
    if (!flags[i]) report.txs[i].event.reset();
  }
  return report;
}

void EventHub::subscribe(SubscriberId who, std::string_view event_name) {
  auto name = chaincode::event_from_string(event_name);
  if (!name) throw Error(ErrorCode::kUnknownEvent, std::string(event_name));
  subs_[*name].insert(who);
}

bool EventHub::subscribed(SubscriberId who, chaincode::EventName name) const {
  auto it = subs_.find(name);
  return it != subs_.end() && it->second.contains(who);
}

std::vector<EventHub::Delivery> EventHub::deliveries(const CommitReport& report) const {
  std::vector<Delivery> out;
  for (const CommittedTx& tx : report.txs) {
    if (!tx.valid || !tx.event) continue;
    auto it = subs_.find(tx.event->name);
    if (it == subs_.end()) continue;
    for (SubscriberId who : it->second) {
      out.push_back(Delivery{who, *tx.event, tx.tx_id, report.height});
    }
  }
  return out;
}

}  // namespace rhsim::txflow
