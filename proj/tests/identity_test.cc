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

#include <gtest/gtest.h>

#include <regex>
#include <set>

#include "rhsim/crypto.h"
#include "rhsim/error.h"
#include "rhsim/identity.h"

namespace rhsim {
namespace {

using identity::MspId;
using identity::Registry;
using identity::Role;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kScenarioError;
}

// Reference values computed with Python's hashlib / hmac.
TEST(Crypto, Sha256KnownVector) {
  EXPECT_EQ(to_hex(sha256("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Crypto, HmacRfc4231Case1) {
  EXPECT_EQ(to_hex(hmac_sha256(std::string(20, '\x0b'), "Hi There")),
            "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
}

TEST(Crypto, HmacKeyLongerThanBlock) {
  EXPECT_EQ(to_hex(hmac_sha256(std::string(131, '\xaa'),
                               "Test Using Larger Than Block-Size Key - Hash Key First")),
            "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54");
}

TEST(Crypto, HexRoundTrip) {
  const Digest d = sha256("round trip");
  auto back = digest_from_hex(to_hex(d));
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(*back, d);
  EXPECT_FALSE(digest_from_hex("zz").has_value());
}

TEST(Identity, UidDerivationMatchesReference) {
  Digest material{};
  for (std::size_t i = 0; i < material.size(); ++i) material[i] = static_cast<std::uint8_t>(i);
  EXPECT_EQ(identity::derive_uid(material), "Yw3NKW");
}

TEST(Identity, MspIdRejectsSeparatorAndEmpty) {
  EXPECT_EQ(code_of([] { MspId("Org~1"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { MspId(""); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(identity::msp_for_org("Org2PeerOrg").str(), "Org2PeerOrgMSP");
}

TEST(Identity, ProvisionOrgTwoPeersOneOrderer) {
  Registry reg(42);
  const identity::Org& org = reg.provision_org("Org1PeerOrg", 2, 1);
  EXPECT_EQ(org.msp.str(), "Org1PeerOrgMSP");
  ASSERT_EQ(org.peers.size(), 2u);
  EXPECT_EQ(org.orderers.size(), 1u);
  for (const auto& p : org.peers) {
    EXPECT_EQ(p.identity().role, Role::kPeer);
    const identity::Signature sig = p.sign("hello");
    EXPECT_TRUE(reg.verify(sig, "hello"));
  }
  EXPECT_NE(org.peers[0].principal(), org.peers[1].principal());
}

TEST(Identity, ProvisionMinimalOrg) {
  Registry reg(1);
  const identity::Org& org = reg.provision_org("Solo", 1, 1);
  EXPECT_EQ(org.peers.size(), 1u);
}

TEST(Identity, ProvisionErrors) {
  Registry reg(1);
  reg.provision_org("Org1PeerOrg", 2, 1);
  EXPECT_EQ(code_of([&] { reg.provision_org("Org1PeerOrg", 2, 1); }), ErrorCode::kDuplicateOrg);
  EXPECT_EQ(code_of([&] { reg.provision_org("Empty", 0, 1); }), ErrorCode::kZeroPeers);
  EXPECT_EQ(reg.orgs().size(), 1u);
}

TEST(Identity, EnrollProducesSixCharBase64UrlUid) {
  Registry reg(7);
  const MspId msp = reg.provision_org("Org2PeerOrg", 2, 1).msp;
  const std::regex shape("^[A-Za-z0-9_-]{6}$");
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto cred = reg.enroll_identity(msp, Role::kRider, s);
    EXPECT_TRUE(std::regex_match(cred.identity().uid, shape)) << cred.identity().uid;
    EXPECT_EQ(cred.identity().uid, identity::derive_uid(cred.identity().public_material));
  }
}

TEST(Identity, EnrollIsDeterministic) {
  Registry a(7), b(7);
  const MspId msp = a.provision_org("Org2PeerOrg", 2, 1).msp;
  b.provision_org("Org2PeerOrg", 2, 1);
  EXPECT_EQ(a.enroll_identity(msp, Role::kRider, 99).identity().uid,
            b.enroll_identity(msp, Role::kRider, 99).identity().uid);
}

TEST(Identity, EnrollUnknownOrg) {
  Registry reg(7);
  EXPECT_EQ(code_of([&] { reg.enroll_identity(MspId("NoSuchOrgMSP"), Role::kRider, 1); }),
            ErrorCode::kUnknownOrg);
}

TEST(Identity, EnrollRejectsNodeRoles) {
  Registry reg(7);
  const MspId msp = reg.provision_org("Org1PeerOrg", 1, 1).msp;
  EXPECT_EQ(code_of([&] { reg.enroll_identity(msp, Role::kPeer, 1); }),
            ErrorCode::kInvalidArgument);
}

TEST(Identity, ImportPinsUidIncludingSevenChars) {
  Registry reg(7);
  const MspId msp = reg.provision_org("Org2PeerOrg", 2, 1).msp;
  auto d = reg.import_identity(msp, Role::kDriver, "06Q049V", 1);
  EXPECT_EQ(d.identity().uid, "06Q049V");
  EXPECT_TRUE(reg.verify(d.sign("m"), "m"));
  EXPECT_EQ(code_of([&] { reg.import_identity(msp, Role::kRider, "06Q049V", 2); }),
            ErrorCode::kUidCollision);
  EXPECT_EQ(code_of([&] { reg.import_identity(msp, Role::kRider, "bad~uid", 3); }),
            ErrorCode::kInvalidArgument);
}

TEST(Identity, SignVerifyRoundTripAndTamper) {
  Registry reg(3);
  const MspId msp = reg.provision_org("Org1PeerOrg", 1, 1).msp;
  auto alice = reg.enroll_identity(msp, Role::kRider, 1);
  const std::string msg = "payload bytes";
  identity::Signature sig = alice.sign(msg);
  EXPECT_TRUE(reg.verify(sig, msg));
  std::string flipped = msg;
  flipped[3] ^= 0x01;
  EXPECT_FALSE(reg.verify(sig, flipped));
  identity::Signature forged = sig;
  forged.bytes[0] ^= 0x01;
  EXPECT_FALSE(reg.verify(forged, msg));
}

TEST(Identity, VerifyUnknownSigner) {
  Registry reg(3), other(4);
  const MspId msp = reg.provision_org("Org1PeerOrg", 1, 1).msp;
  other.provision_org("Org9PeerOrg", 1, 1);
  auto stranger = other.enroll_identity(identity::msp_for_org("Org9PeerOrg"), Role::kRider, 1);
  EXPECT_EQ(code_of([&] { reg.verify(stranger.sign("x"), "x"); }), ErrorCode::kUnknownSigner);
  (void)msp;
}

// Exhaustive over a 3-identity fixture: a signature verifies only against
// its own signer's public material.
TEST(Identity, CrossIdentityVerificationAlwaysFails) {
  Registry reg(5);
  const MspId msp = reg.provision_org("Org1PeerOrg", 1, 1).msp;
  std::vector<identity::Credential> ids;
  for (std::uint64_t s = 1; s <= 3; ++s) ids.push_back(reg.enroll_identity(msp, Role::kRider, s));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const identity::Signature sig = ids[i].sign("m");
    for (std::size_t j = 0; j < ids.size(); ++j) {
      EXPECT_EQ(reg.verify_with(sig, "m", ids[j].identity().public_material), i == j)
          << i << " vs " << j;
    }
    // Claiming another signer does not help either.
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (i == j) continue;
      identity::Signature claimed = sig;
      claimed.signer = ids[j].principal();
      EXPECT_FALSE(reg.verify(claimed, "m"));
    }
  }
}

TEST(Identity, NoUidCollisionsOverThousandIdentities) {
  Registry reg(11);
  const MspId msp = reg.provision_org("Org1PeerOrg", 1, 1).msp;
  std::set<std::string> uids;
  for (std::uint64_t s = 0; s < 1500; ++s) {
    uids.insert(reg.enroll_identity(msp, Role::kRider, s).identity().uid);
  }
  EXPECT_EQ(uids.size(), 1500u);
}

TEST(Identity, UpgradeToDriverKeepsMspAndUid) {
  Registry reg(3);
  const MspId msp = reg.provision_org("Org1PeerOrg", 1, 1).msp;
  auto r = reg.enroll_identity(msp, Role::kRider, 1);
  reg.upgrade_to_driver(r.principal());
  const identity::Identity* after = reg.find(r.principal());
  ASSERT_NE(after, nullptr);
  EXPECT_EQ(after->role, Role::kDriver);
  EXPECT_EQ(after->msp, r.identity().msp);
  EXPECT_EQ(after->uid, r.identity().uid);
  EXPECT_EQ(code_of([&] { reg.upgrade_to_driver(r.principal()); }),
            ErrorCode::kInvalidRoleTransition);
}

}  // namespace
}  // namespace rhsim
