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

#include "rhsim/identity.h"

#include <algorithm>

#include "rhsim/error.h"

namespace rhsim::identity {
namespace {

std::string make_secret(const MspId& msp, std::string_view entropy) {
  std::string material = "rhsim/key/v1|";
  material += msp.str();
  material += '|';
  material += entropy;
  return digest_bytes(sha256(material));
}

Digest public_material_for(std::string_view secret) {
  std::string material = "rhsim/pub/v1|";
  material += secret;
  return sha256(material);
}

bool is_client_role(Role role) {
  return role == Role::kRider || role == Role::kDriver || role == Role::kAdmin;
}

}  // namespace

MspId::MspId(std::string name) : name_(std::move(name)) {
  if (name_.empty() ||
      name_.find(kKeySeparator) != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "bad MSP id '" + name_ + "'");
  }
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kRider: return "Rider";
    case Role::kDriver: return "Driver";
    case Role::kPeer: return "Peer";
    case Role::kOrderer: return "Orderer";
    case Role::kAdmin: return "Admin";
  }
  return "Unknown";
}

std::optional<Role> role_from_string(std::string_view name) {
  for (Role r : {Role::kRider, Role::kDriver, Role::kPeer, Role::kOrderer,
                 Role::kAdmin}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

Signature Credential::sign(std::string_view payload) const {
  Signature sig;
  sig.signer = principal();
  sig.payload_digest = sha256(payload);
  sig.bytes = digest_bytes(hmac_sha256(secret_, digest_bytes(sig.payload_digest)));
  return sig;
}

MspId msp_for_org(std::string_view org_name) {
  return MspId(std::string(org_name) + "MSP");
}

std::string derive_uid(const Digest& public_material) {
  return base64url_prefix(sha256(digest_bytes(public_material)), kUidLength);
}

const Org& Registry::provision_org(const std::string& name, int peer_count,
                                   int orderer_count) {
  if (peer_count < 1) throw Error(ErrorCode::kZeroPeers, name);
  if (orderer_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, name + ": orderer_count < 1");
  }
  MspId msp = msp_for_org(name);
  for (const Org& org : orgs_) {
    if (org.name == name || org.msp == msp) {
      throw Error(ErrorCode::kDuplicateOrg, name);
    }
  }

  Org org;
  org.name = name;
  org.msp = msp;
  const std::string seed = std::to_string(network_seed_);
  std::string ca_secret = make_secret(msp, "ca|" + seed);
  org.root_ca = CaRecord{msp, public_material_for(ca_secret)};
  // Node credentials are registered before the org becomes visible, so a
  // failure part-way leaves no half-provisioned org behind.
  std::vector<Credential> peers, orderers;
  for (int i = 0; i < peer_count; ++i) {
    peers.push_back(add(msp, Role::kPeer, std::nullopt,
                        "node|peer" + std::to_string(i) + "|" + seed));
  }
  for (int i = 0; i < orderer_count; ++i) {
    orderers.push_back(add(msp, Role::kOrderer, std::nullopt,
                           "node|orderer" + std::to_string(i) + "|" + seed));
  }
  org.peers = std::move(peers);
  org.orderers = std::move(orderers);
  orgs_.push_back(std::move(org));
  return orgs_.back();
}

Credential Registry::enroll_identity(const MspId& msp, Role role,
                                     std::uint64_t seed) {
  if (find_org(msp) == nullptr) throw Error(ErrorCode::kUnknownOrg, msp.str());
  if (!is_client_role(role)) {
    throw Error(ErrorCode::kInvalidArgument,
                "node roles are issued by provision_org");
  }
  return add(msp, role, std::nullopt, "client|" + std::to_string(seed));
}

Credential Registry::import_identity(const MspId& msp, Role role,
                                     std::string uid, std::uint64_t seed) {
  if (find_org(msp) == nullptr) throw Error(ErrorCode::kUnknownOrg, msp.str());
  if (!is_client_role(role)) {
    throw Error(ErrorCode::kInvalidArgument,
                "node roles are issued by provision_org");
  }
  if (uid.empty() || uid.size() > 16 || !is_base64url(uid)) {
    throw Error(ErrorCode::kInvalidArgument, "bad uid '" + uid + "'");
  }
  std::string entropy = "import|" + uid + "|" + std::to_string(seed);
  return add(msp, role, std::move(uid), entropy);
}

Credential Registry::add(const MspId& msp, Role role,
                         std::optional<std::string> uid,
                         std::string_view entropy) {
  std::string secret = make_secret(msp, entropy);
  Digest material = public_material_for(secret);
  Identity id{msp, uid ? *uid : derive_uid(material), role, material};
  Principal who = id.principal();
  if (entries_.contains(who) || by_material_.contains(material)) {
    throw Error(ErrorCode::kUidCollision, msp.str() + "/" + id.uid);
  }
  entries_.emplace(who, Entry{id, secret});
  by_material_.emplace(material, who);
  return Credential(std::move(id), std::move(secret));
}

bool Registry::verify(const Signature& sig, std::string_view payload) const {
  return verify_digest(sig, sha256(payload));
}

bool Registry::verify_digest(const Signature& sig, const Digest& digest) const {
  auto it = entries_.find(sig.signer);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kUnknownSigner,
                sig.signer.msp.str() + "/" + sig.signer.uid);
  }
  if (digest != sig.payload_digest) return false;
  return equal_bytes(digest_bytes(hmac_sha256(it->second.secret, digest_bytes(digest))),
                     sig.bytes);
}

bool Registry::verify_with(const Signature& sig, std::string_view payload,
                           const Digest& public_material) const {
  auto owner = by_material_.find(public_material);
  if (owner == by_material_.end()) return false;
  const Entry& entry = entries_.at(owner->second);
  Digest digest = sha256(payload);
  if (digest != sig.payload_digest) return false;
  return equal_bytes(digest_bytes(hmac_sha256(entry.secret, digest_bytes(digest))),
                     sig.bytes);
}

void Registry::upgrade_to_driver(const Principal& who) {
  auto it = entries_.find(who);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kUnknownSigner, who.msp.str() + "/" + who.uid);
  }
  if (it->second.identity.role != Role::kRider) {
    throw Error(ErrorCode::kInvalidRoleTransition,
                std::string(to_string(it->second.identity.role)) + " -> Driver");
  }
  it->second.identity.role = Role::kDriver;
}

const Identity* Registry::find(const Principal& who) const {
  auto it = entries_.find(who);
  return it == entries_.end() ? nullptr : &it->second.identity;
}

const Org* Registry::find_org(const MspId& msp) const {
  auto it = std::find_if(orgs_.begin(), orgs_.end(),
                         [&](const Org& o) { return o.msp == msp; });
  return it == orgs_.end() ? nullptr : &*it;
}

}  // namespace rhsim::identity
