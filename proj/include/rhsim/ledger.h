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

// Versioned world state, read-write sets and the hash-chained block store
// kept by every peer.

#ifndef RHSIM_LEDGER_H_
#define RHSIM_LEDGER_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rhsim/crypto.h"

namespace rhsim::ledger {

enum class Namespace { kUser, kRideRequest, kRide };

std::string_view to_string(Namespace ns);

// A composite key: namespace tag followed by parts, joined with '~'.
class StateKey {
 public:
  // Throws Error(kInvalidKey) if any part is empty or contains '~'.
  static StateKey make(Namespace ns, std::vector<std::string> parts);
  static std::optional<StateKey> parse(std::string_view text);

  Namespace ns() const noexcept { return ns_; }
  // Parts after the namespace tag.
  const std::vector<std::string>& parts() const noexcept { return parts_; }
  const std::string& str() const noexcept { return text_; }

  bool operator==(const StateKey& o) const { return text_ == o.text_; }
  auto operator<=>(const StateKey& o) const { return text_ <=> o.text_; }

 private:
  Namespace ns_ = Namespace::kUser;
  std::vector<std::string> parts_;
  std::string text_;
};

// (block height, index within block) of the transaction that wrote a value.
struct Version {
  std::uint64_t block_height = 0;
  std::uint32_t tx_index = 0;

  auto operator<=>(const Version&) const = default;
};

struct VersionedValue {
  std::string bytes;
  Version version;

  bool operator==(const VersionedValue&) const = default;
};

// Reads and writes of one simulated transaction, each keyed and sorted
// lexicographically. A read of an absent key records nullopt; a write of
// nullopt is a delete.
struct ReadWriteSet {
  std::map<std::string, std::optional<Version>> reads;
  std::map<std::string, std::optional<std::string>> writes;
  // Diagnostic: the logic read a key after writing it.
  bool read_after_write = false;

  // Canonical bytes; equal rwsets encode identically.
  std::string encode() const;
  nlohmann::json to_json() const;
  // Throws nlohmann::json exceptions on malformed input.
  static ReadWriteSet from_json(const nlohmann::json& j);

  bool operator==(const ReadWriteSet&) const = default;
};

class WorldState {
 public:
  const VersionedValue* get(std::string_view key) const;
  std::optional<Version> version_of(std::string_view key) const;

  // Applies writes at `version`. Versions per key only move forward.
  void apply(const ReadWriteSet& rwset, Version version);

  const std::map<std::string, VersionedValue, std::less<>>& entries() const {
    return entries_;
  }
  std::size_t size() const noexcept { return entries_.size(); }

  // Canonical dump of the full state, for equality checks across peers.
  std::string dump() const;

 private:
  std::map<std::string, VersionedValue, std::less<>> entries_;
};

// Records reads against an immutable snapshot and buffers writes.
class TxSimulator {
 public:
  explicit TxSimulator(const WorldState& snapshot) : snapshot_(snapshot) {}

  // Pending writes are visible to later reads (and flag the rwset).
  std::optional<std::string> get(const StateKey& key);
  void put(const StateKey& key, std::string value);
  void del(const StateKey& key);

  const ReadWriteSet& rwset() const noexcept { return rwset_; }
  ReadWriteSet take_rwset() { return std::move(rwset_); }

 private:
  const WorldState& snapshot_;
  ReadWriteSet rwset_;
};

struct SimulationResult {
  ReadWriteSet rwset;
  std::string response;
};

using TxLogic = std::function<std::string(TxSimulator&)>;

// Runs `logic` against `snapshot` without mutating it. Exceptions thrown by
// the logic propagate to the caller.
SimulationResult simulate(const WorldState& snapshot, const TxLogic& logic);

// True iff every read version matches the committed version of that key.
bool mvcc_validate(const WorldState& committed, const ReadWriteSet& rwset);

struct Block {
  std::uint64_t height = 0;
  Digest prev_hash{};
  std::int64_t timestamp_us = 0;
  // Transaction envelopes exactly as the ordering service received them.
  std::vector<std::string> txs;
  // Set at commit; not covered by the block hash.
  std::vector<bool> validity;

  Digest data_hash() const;
  // Hash of the header (height, prev_hash, timestamp, data hash).
  Digest hash() const;
};

Block make_genesis();

// One JSON line per block, used by `rhsim dump` and `rhsim verify-chain`.
std::string to_dump_line(const Block& block);
// Throws nlohmann::json exceptions on malformed lines.
Block from_dump_line(std::string_view line);

// Checks heights and prev-hash links, then the last block against
// `tip_hash` when given. Returns the first bad height, or nullopt.
std::optional<std::uint64_t> verify_chain(std::span<const Block> blocks,
                                          const std::optional<Digest>& tip_hash);

// Result of checking a dump file: each line parses, its recorded "hash"
// matches the recomputed header hash, and the links hold.
struct DumpCheck {
  bool ok = false;
  std::size_t blocks = 0;
  // 0-based line of the first problem.
  std::optional<std::size_t> bad_line;
  std::string error;
};
DumpCheck verify_dump(std::string_view text);

// Decides whether a block transaction passes the pre-MVCC checks and
// yields its rwset. Called once per transaction, in block order.
using TxPrecheck = std::function<std::optional<ReadWriteSet>(
    std::size_t tx_index, std::string_view tx_bytes)>;

// A peer's ledger: genesis-initialised block store plus world state.
class PeerLedger {
 public:
  PeerLedger();

  std::uint64_t height() const noexcept { return blocks_.back().height; }
  const WorldState& state() const noexcept { return state_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  const Digest& tip_hash() const noexcept { return tip_hash_; }

  // Validates and appends `block`. Throws Error(kChainBreak) when the height
  // or prev_hash does not extend the current tip. Returns validity flags.
  std::vector<bool> commit_block(Block block, const TxPrecheck& precheck);

 private:
  std::vector<Block> blocks_;
  WorldState state_;
  Digest tip_hash_{};
};

}  // namespace rhsim::ledger

#endif  // RHSIM_LEDGER_H_
