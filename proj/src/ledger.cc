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

#include "rhsim/ledger.h"

#include <cassert>

#include "rhsim/error.h"
#include "rhsim/identity.h"

namespace rhsim::ledger {

using nlohmann::json;

namespace {

constexpr Namespace kNamespaces[] = {Namespace::kUser, Namespace::kRideRequest,
                                     Namespace::kRide};

json version_to_json(const std::optional<Version>& v) {
  if (!v) return nullptr;
  return json::array({v->block_height, v->tx_index});
}

std::optional<Version> version_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Version{j.at(0).get<std::uint64_t>(), j.at(1).get<std::uint32_t>()};
}

}  // namespace

std::string_view to_string(Namespace ns) {
  switch (ns) {
    case Namespace::kUser: return "User";
    case Namespace::kRideRequest: return "RideRequest";
    case Namespace::kRide: return "Ride";
  }
  return "";
}

StateKey StateKey::make(Namespace ns, std::vector<std::string> parts) {
  if (parts.empty()) throw Error(ErrorCode::kInvalidKey, "no key parts");
  StateKey key;
  key.ns_ = ns;
  key.text_ = std::string(to_string(ns));
  for (const std::string& p : parts) {
    if (p.empty() || p.find(identity::kKeySeparator) != std::string::npos) {
      throw Error(ErrorCode::kInvalidKey, "bad key part '" + p + "'");
    }
    key.text_ += identity::kKeySeparator;
    key.text_ += p;
  }
  key.parts_ = std::move(parts);
  return key;
}

std::optional<StateKey> StateKey::parse(std::string_view text) {
  std::vector<std::string> pieces;
  std::size_t start = 0;
  while (true) {
    std::size_t sep = text.find(identity::kKeySeparator, start);
    pieces.emplace_back(text.substr(start, sep - start));
    if (sep == std::string_view::npos) break;
    start = sep + 1;
  }
  if (pieces.size() < 2) return std::nullopt;
  for (Namespace ns : kNamespaces) {
    if (pieces.front() != to_string(ns)) continue;
    pieces.erase(pieces.begin());
    for (const std::string& p : pieces) {
      if (p.empty()) return std::nullopt;
    }
    return make(ns, std::move(pieces));
  }
  return std::nullopt;
}

json ReadWriteSet::to_json() const {
  json r = json::array();
  for (const auto& [key, ver] : reads) r.push_back({key, version_to_json(ver)});
  json w = json::array();
  for (const auto& [key, value] : writes) {
    w.push_back({key, value ? json(*value) : json(nullptr)});
  }
  return json{{"reads", std::move(r)},
              {"writes", std::move(w)},
              {"read_after_write", read_after_write}};
}

std::string ReadWriteSet::encode() const { return to_json().dump(); }

ReadWriteSet ReadWriteSet::from_json(const json& j) {
  ReadWriteSet rw;
  for (const json& e : j.at("reads")) {
    rw.reads.emplace(e.at(0).get<std::string>(), version_from_json(e.at(1)));
  }
  for (const json& e : j.at("writes")) {
    std::optional<std::string> value;
    if (!e.at(1).is_null()) value = e.at(1).get<std::string>();
    rw.writes.emplace(e.at(0).get<std::string>(), std::move(value));
  }
  rw.read_after_write = j.at("read_after_write").get<bool>();
  return rw;
}

const VersionedValue* WorldState::get(std::string_view key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<Version> WorldState::version_of(std::string_view key) const {
  const VersionedValue* v = get(key);
  if (v == nullptr) return std::nullopt;
  return v->version;
}

void WorldState::apply(const ReadWriteSet& rwset, Version version) {
  for (const auto& [key, value] : rwset.writes) {
    auto it = entries_.find(key);
    assert(it == entries_.end() || it->second.version < version);
    if (!value) {
      if (it != entries_.end()) entries_.erase(it);
    } else if (it != entries_.end()) {
      it->second = VersionedValue{*value, version};
    } else {
      entries_.emplace(key, VersionedValue{*value, version});
    }
  }
}

std::string WorldState::dump() const {
  json out = json::object();
  for (const auto& [key, v] : entries_) {
    out[key] = json{{"value", v.bytes}, {"version", version_to_json(v.version)}};
  }
  return out.dump();
}

std::optional<std::string> TxSimulator::get(const StateKey& key) {
  if (auto pending = rwset_.writes.find(key.str());
      pending != rwset_.writes.end()) {
    rwset_.read_after_write = true;
    return pending->second;
  }
  const VersionedValue* v = snapshot_.get(key.str());
  rwset_.reads.try_emplace(key.str(),
                           v ? std::optional<Version>(v->version) : std::nullopt);
  if (v == nullptr) return std::nullopt;
  return v->bytes;
}

void TxSimulator::put(const StateKey& key, std::string value) {
  rwset_.writes.insert_or_assign(key.str(), std::move(value));
}

void TxSimulator::del(const StateKey& key) {
  rwset_.writes.insert_or_assign(key.str(), std::nullopt);
}

SimulationResult simulate(const WorldState& snapshot, const TxLogic& logic) {
  TxSimulator sim(snapshot);
  std::string response = logic(sim);
  return SimulationResult{sim.take_rwset(), std::move(response)};
}

bool mvcc_validate(const WorldState& committed, const ReadWriteSet& rwset) {
  for (const auto& [key, ver] : rwset.reads) {
    if (committed.version_of(key) != ver) return false;
  }
  return true;
}

Digest Block::data_hash() const {
  std::string buf;
  for (const std::string& tx : txs) {
    std::uint64_t n = tx.size();
    for (int shift = 56; shift >= 0; shift -= 8) {
      buf.push_back(static_cast<char>((n >> shift) & 0xff));
    }
    buf += tx;
  }
  return sha256(buf);
}

Digest Block::hash() const {
  json header{{"data_hash", to_hex(data_hash())},
              {"height", height},
              {"prev_hash", to_hex(prev_hash)},
              {"timestamp_us", timestamp_us}};
  return sha256(header.dump());
}

Block make_genesis() { return Block{}; }

std::string to_dump_line(const Block& block) {
  json txs = json::array();
  for (const std::string& tx : block.txs) {
    json parsed = json::parse(tx, nullptr, /*allow_exceptions=*/false);
    // Non-JSON payloads are kept as strings so the bytes survive a reload.
    if (parsed.is_discarded() || parsed.dump() != tx) {
      txs.push_back(json{{"raw", tx}});
    } else {
      txs.push_back(std::move(parsed));
    }
  }
  json valid = json::array();
  for (bool v : block.validity) valid.push_back(v);
  json line{{"hash", to_hex(block.hash())},
            {"height", block.height},
            {"prev_hash", to_hex(block.prev_hash)},
            {"timestamp_us", block.timestamp_us},
            {"txs", std::move(txs)},
            {"valid", std::move(valid)}};
  return line.dump();
}

Block from_dump_line(std::string_view line) {
  json j = json::parse(line);
  Block b;
  b.height = j.at("height").get<std::uint64_t>();
  auto prev = digest_from_hex(j.at("prev_hash").get<std::string>());
  if (!prev) throw Error(ErrorCode::kInvalidArgument, "bad prev_hash");
  b.prev_hash = *prev;
  b.timestamp_us = j.at("timestamp_us").get<std::int64_t>();
  for (const json& tx : j.at("txs")) {
    if (tx.is_object() && tx.size() == 1 && tx.contains("raw")) {
      b.txs.push_back(tx.at("raw").get<std::string>());
    } else {
      b.txs.push_back(tx.dump());
    }
  }
  for (const json& v : j.at("valid")) b.validity.push_back(v.get<bool>());
  return b;
}

std::optional<std::uint64_t> verify_chain(std::span<const Block> blocks,
                                          const std::optional<Digest>& tip_hash) {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].height != i) return i;
    if (i > 0 && blocks[i].prev_hash != blocks[i - 1].hash()) return i;
  }
  if (!blocks.empty() && tip_hash && blocks.back().hash() != *tip_hash) {
    return blocks.size() - 1;
  }
  return std::nullopt;
}

DumpCheck verify_dump(std::string_view text) {
  DumpCheck out;
  std::vector<Block> blocks;
  std::size_t line_no = 0;
  auto fail = [&](std::string why) {
    out.bad_line = line_no;
    out.error = std::move(why);
    return out;
  };
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) {
      if (!text.empty()) return fail("empty line");
      break;
    }
    try {
      const json j = json::parse(line);
      Block b = from_dump_line(line);
      if (to_dump_line(b) != line) return fail("non-canonical line");
      if (j.at("hash").get<std::string>() != to_hex(b.hash())) return fail("hash mismatch");
      blocks.push_back(std::move(b));
    } catch (const std::exception& e) {
      return fail(std::string("unparseable: ") + e.what());
    }
    ++line_no;
  }
  if (auto bad = verify_chain(blocks, std::nullopt)) {
    line_no = static_cast<std::size_t>(*bad);
    return fail("broken link at height " + std::to_string(*bad));
  }
  out.ok = true;
  out.blocks = blocks.size();
  return out;
}

PeerLedger::PeerLedger() {
  blocks_.push_back(make_genesis());
  tip_hash_ = blocks_.back().hash();
}

std::vector<bool> PeerLedger::commit_block(Block block,
                                           const TxPrecheck& precheck) {
  if (block.height != height() + 1 || block.prev_hash != tip_hash_) {
    throw Error(ErrorCode::kChainBreak,
                "block " + std::to_string(block.height) + " does not extend tip " +
                    std::to_string(height()));
  }
  std::vector<bool> flags(block.txs.size(), false);
  for (std::size_t i = 0; i < block.txs.size(); ++i) {
    std::optional<ReadWriteSet> rw = precheck(i, block.txs[i]);
    if (!rw || !mvcc_validate(state_, *rw)) continue;
    state_.apply(*rw, Version{block.height, static_cast<std::uint32_t>(i)});
    flags[i] = true;
  }
  block.validity = flags;
  tip_hash_ = block.hash();
  blocks_.push_back(std::move(block));
  return flags;
}

}  // namespace rhsim::ledger
