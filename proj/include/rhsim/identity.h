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

// Organizations, membership service providers and the signing material of
// every enrolled participant.
//
// Signatures are HMAC-SHA256 tags under a per-identity secret that only the
// holder's Credential and the network Registry know. The Registry plays the
// part of the collected MSP directories: it is the single verifier.

#ifndef RHSIM_IDENTITY_H_
#define RHSIM_IDENTITY_H_

#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rhsim/crypto.h"

namespace rhsim::identity {

// Reserved network-wide; composite ledger keys are joined with it.
inline constexpr char kKeySeparator = '~';

// Length of a derived uid, in base64url characters.
inline constexpr std::size_t kUidLength = 6;

class MspId {
 public:
  MspId() = default;
  // Throws Error(kInvalidArgument) on an empty name or one containing '~'.
  explicit MspId(std::string name);

  const std::string& str() const noexcept { return name_; }
  auto operator<=>(const MspId&) const = default;

 private:
  std::string name_;
};

enum class Role { kRider, kDriver, kPeer, kOrderer, kAdmin };

std::string_view to_string(Role role);
std::optional<Role> role_from_string(std::string_view name);

// (msp, uid): how a signer or record owner is named on the wire.
struct Principal {
  MspId msp;
  std::string uid;

  auto operator<=>(const Principal&) const = default;
};

struct Identity {
  MspId msp;
  std::string uid;
  Role role = Role::kRider;
  Digest public_material{};

  Principal principal() const { return {msp, uid}; }
};

struct Signature {
  Principal signer;
  std::string bytes;  // 32-byte tag
  Digest payload_digest{};
};

// An identity together with its signing secret.
class Credential {
 public:
  const Identity& identity() const noexcept { return identity_; }
  Principal principal() const { return identity_.principal(); }

  Signature sign(std::string_view payload) const;

 private:
  friend class Registry;
  Credential(Identity identity, std::string secret)
      : identity_(std::move(identity)), secret_(std::move(secret)) {}

  Identity identity_;
  std::string secret_;
};

struct CaRecord {
  MspId msp;
  Digest public_material{};
};

struct Org {
  std::string name;
  MspId msp;
  std::vector<Credential> peers;
  std::vector<Credential> orderers;
  CaRecord root_ca;
};

// Conventional MSP id for an organization: "<name>MSP".
MspId msp_for_org(std::string_view org_name);

// The uid a given public material maps to.
std::string derive_uid(const Digest& public_material);

class Registry {
 public:
  Registry() = default;
  explicit Registry(std::uint64_t network_seed) : network_seed_(network_seed) {}

  // Creates an organization with its MSP, root CA record and node
  // identities. Errors: kDuplicateOrg, kZeroPeers, kInvalidArgument.
  const Org& provision_org(const std::string& name, int peer_count,
                           int orderer_count);

  // Issues a client certificate whose uid is derived from the key material.
  // Errors: kUnknownOrg, kUidCollision, kInvalidArgument (node roles).
  Credential enroll_identity(const MspId& msp, Role role, std::uint64_t seed);

  // Registers a pre-issued certificate with a fixed uid (fixture replays).
  Credential import_identity(const MspId& msp, Role role, std::string uid,
                             std::uint64_t seed);

  // True iff `sig` is the registered signer's tag over `payload`.
  // Throws Error(kUnknownSigner) when the signer is not enrolled.
  bool verify(const Signature& sig, std::string_view payload) const;
  // As verify, with sha256(payload) already computed by the caller.
  bool verify_digest(const Signature& sig, const Digest& payload_digest) const;

  // Checks `sig` against an explicit public verification material.
  bool verify_with(const Signature& sig, std::string_view payload,
                   const Digest& public_material) const;

  // Rider -> Driver; msp and uid are kept. Any other transition throws
  // Error(kInvalidRoleTransition).
  void upgrade_to_driver(const Principal& who);

  const Identity* find(const Principal& who) const;
  const Org* find_org(const MspId& msp) const;
  const std::deque<Org>& orgs() const noexcept { return orgs_; }
  std::size_t identity_count() const noexcept { return entries_.size(); }

 private:
  struct Entry {
    Identity identity;
    std::string secret;
  };

  Credential add(const MspId& msp, Role role, std::optional<std::string> uid,
                 std::string_view entropy);

  std::uint64_t network_seed_ = 0;
  std::deque<Org> orgs_;
  std::map<Principal, Entry> entries_;
  std::map<Digest, Principal> by_material_;
};

}  // namespace rhsim::identity

#endif  // RHSIM_IDENTITY_H_
