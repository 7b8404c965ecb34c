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

// Execute-order-validate building blocks, independent of simulated time:
// proposals and endorsements, endorsement policies, the client-side
// collect step, block cutting, and a committing peer with its event hub.
// network.h wires these onto netsim nodes.

#ifndef RHSIM_TXFLOW_H_
#define RHSIM_TXFLOW_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rhsim/chaincode.h"
#include "rhsim/identity.h"
#include "rhsim/ledger.h"
#include "rhsim/netsim.h"

namespace rhsim::txflow {

struct Proposal {
  std::string tx_id;
  identity::Principal creator;
  chaincode::ChaincodeId chaincode;
  std::string function;
  std::vector<std::string> args;
  // "M/D/YYYY HH:MM", supplied by the client; the chaincode never reads a
  // clock of its own.
  std::string timestamp;
  identity::Signature signature;

  // Canonical bytes covered by `signature` (everything but the signature).
  std::string signed_bytes() const;
  nlohmann::json to_json() const;
  static Proposal from_json(const nlohmann::json& j);
};

// Builds and signs a proposal. The tx id hashes the creator and `nonce`,
// which the caller keeps unique (client name plus a counter).
Proposal make_proposal(const identity::Credential& creator,
                       const chaincode::ChaincodeId& chaincode,
                       std::string function, std::vector<std::string> args,
                       std::string timestamp, std::string_view nonce);

// What an endorser signs: the simulation outcome of one proposal.
struct ResponsePayload {
  std::string tx_id;
  bool accepted = false;
  ledger::ReadWriteSet rwset;
  std::string response;
  std::optional<chaincode::RideEvent> event;
  // Error code name when rejected.
  std::string error;

  // Canonical bytes; two endorsers agree iff these are equal.
  std::string encode() const;
  // Bytes covered by the endorser signature: tx id, rwset digest and the
  // rest of the outcome.
  std::string signing_bytes() const;
  nlohmann::json to_json() const;
  static ResponsePayload from_json(const nlohmann::json& j);
};

struct Endorsement {
  identity::Principal endorser;
  ResponsePayload payload;
  identity::Signature signature;

  bool accepted() const noexcept { return payload.accepted; }
};

struct PeerInfo {
  identity::Principal principal;
  identity::MspId org;
};

class EndorsementPolicy {
 public:
  enum class Kind { kAllOrgPeers, kAnyOne, kCrossOrg };

  EndorsementPolicy() = default;
  static EndorsementPolicy all_org_peers() { return EndorsementPolicy(Kind::kAllOrgPeers, 0); }
  static EndorsementPolicy any_one() { return EndorsementPolicy(Kind::kAnyOne, 0); }
  // Endorsements must span at least k + 1 distinct organizations.
  static EndorsementPolicy cross_org(int k);

  // "ALL_ORG_PEERS" | "ANY_ONE" | "CROSS_ORG:k"; Error(kConfigError)
  // otherwise.
  static EndorsementPolicy parse(std::string_view text);
  std::string to_string() const;

  Kind kind() const noexcept { return kind_; }
  int k() const noexcept { return k_; }

  // Endorsers that are not channel peers are ignored.
  bool satisfied(const std::set<identity::Principal>& endorsers,
                 std::span<const PeerInfo> channel_peers) const;

  bool operator==(const EndorsementPolicy&) const = default;

 private:
  EndorsementPolicy(Kind kind, int k) : kind_(kind), k_(k) {}
  Kind kind_ = Kind::kAllOrgPeers;
  int k_ = 0;
};

// The single channel every peer joins.
struct Channel {
  std::vector<PeerInfo> peers;
  EndorsementPolicy policy;
  chaincode::ChaincodeId chaincode;

  const PeerInfo* find(const identity::Principal& p) const;
};

struct EndorserSignature {
  identity::Principal endorser;
  identity::Signature signature;
};

// The envelope sent to ordering and stored in blocks.
struct EndorsedTx {
  Proposal proposal;
  ResponsePayload payload;
  std::vector<EndorserSignature> endorsements;

  std::string encode() const;
  // Throws on malformed bytes.
  static EndorsedTx decode(std::string_view bytes);
};

struct CollectResult {
  enum class Kind { kEndorsed, kPolicyUnsatisfied, kDivergence };

  Kind kind = Kind::kPolicyUnsatisfied;
  std::optional<EndorsedTx> tx;
  // Chaincode error name when every endorser rejected the proposal.
  std::string chaincode_error;
  std::string detail;
};

std::string_view to_string(CollectResult::Kind k);

// Assembles an endorsed transaction. Endorsements whose signature does not
// verify, or which answer another tx id, are dropped first.
CollectResult collect(const Channel& channel, const identity::Registry& registry,
                      const Proposal& proposal,
                      std::span<const Endorsement> endorsements);

struct OrderingConfig {
  netsim::Duration batch_timeout = std::chrono::seconds(2);
  std::size_t max_message_count = 10;

  // Throws Error(kConfigError) unless both are positive.
  void validate() const;
};

// Block cutting by size or by age of the oldest pending message. Pure: the
// caller supplies arrival times and fires the timer.
template <typename T>
class BlockCutter {
 public:
  explicit BlockCutter(OrderingConfig config) : config_(config) { config_.validate(); }

  // Appends `item`; returns the batch if this arrival filled one.
  std::optional<std::vector<T>> ordered(T item, netsim::Time now) {
    if (pending_.empty()) first_arrival_ = now;
    pending_.push_back(std::move(item));
    if (pending_.size() >= config_.max_message_count) return cut();
    return std::nullopt;
  }

  // When the timer for the current batch should fire.
  std::optional<netsim::Time> deadline() const {
    if (pending_.empty()) return std::nullopt;
    return first_arrival_ + config_.batch_timeout;
  }

  // Cuts if `generation` still names the pending batch and it is due.
  std::optional<std::vector<T>> timer_fired(std::uint64_t generation, netsim::Time now) {
    if (generation != generation_ || pending_.empty() || now < *deadline()) {
      return std::nullopt;
    }
    return cut();
  }

  // Bumped on every cut; timers capture it to detect staleness.
  std::uint64_t generation() const noexcept { return generation_; }
  std::size_t pending() const noexcept { return pending_.size(); }
  const OrderingConfig& config() const noexcept { return config_; }

 private:
  std::vector<T> cut() {
    ++generation_;
    std::vector<T> out;
    out.swap(pending_);
    return out;
  }

  OrderingConfig config_;
  std::vector<T> pending_;
  netsim::Time first_arrival_{};
  std::uint64_t generation_ = 0;
};

// Chains ordered batches into blocks.
class BlockFactory {
 public:
  BlockFactory();
  ledger::Block next(std::vector<std::string> txs, netsim::Time now);
  std::uint64_t height() const noexcept { return height_; }

 private:
  std::uint64_t height_ = 0;
  Digest tip_{};
};

struct CommittedTx {
  std::string tx_id;  // empty when the envelope did not decode
  bool valid = false;
  std::optional<chaincode::RideEvent> event;
};

struct CommitReport {
  std::uint64_t height = 0;
  std::vector<CommittedTx> txs;
};

// An endorsing and committing peer with the chaincode installed.
class Peer {
 public:
  Peer(identity::Credential credential, const identity::Registry& registry,
       const Channel& channel, chaincode::RideHailChaincode chaincode);

  identity::Principal principal() const { return credential_.principal(); }
  const identity::MspId& org() const { return credential_.identity().msp; }

  // Simulates on the current snapshot. Chaincode errors give a rejected
  // endorsement; Error(kVersionMismatch) / Error(kBadSignature) are thrown.
  Endorsement endorse(const Proposal& proposal) const;

  // Re-checks every envelope (decoding, duplicate tx id, signatures,
  // policy), MVCC-validates and appends. Throws Error(kChainBreak).
  CommitReport commit(ledger::Block block);

  const ledger::PeerLedger& ledger() const noexcept { return ledger_; }

 private:
  std::optional<ledger::ReadWriteSet> precheck(const EndorsedTx& tx) const;

  identity::Credential credential_;
  const identity::Registry* registry_;
  const Channel* channel_;
  chaincode::RideHailChaincode chaincode_;
  ledger::PeerLedger ledger_;
  std::set<std::string> seen_tx_ids_;
};

// RideEvent subscriptions. Deliveries follow block height, then tx index.
class EventHub {
 public:
  using SubscriberId = std::uint64_t;

  struct Delivery {
    SubscriberId subscriber;
    chaincode::RideEvent event;
    std::string tx_id;
    std::uint64_t block_height;
  };

  // Throws Error(kUnknownEvent) for a name that no chaincode function emits.
  void subscribe(SubscriberId who, std::string_view event_name);
  bool subscribed(SubscriberId who, chaincode::EventName name) const;

  // Valid txs only; one delivery per (event, matching subscriber).
  std::vector<Delivery> deliveries(const CommitReport& report) const;

 private:
  std::map<chaincode::EventName, std::set<SubscriberId>> subs_;
};

}  // namespace rhsim::txflow

#endif  // RHSIM_TXFLOW_H_
