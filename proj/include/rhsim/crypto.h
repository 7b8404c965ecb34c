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

#ifndef RHSIM_CRYPTO_H_
#define RHSIM_CRYPTO_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rhsim {

// SHA-256 everywhere: block hashes, rwset digests, uid derivation and
// password hashing. Reports echo this name.
inline constexpr std::string_view kHashAlgorithm = "SHA-256";

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::string_view data);
Digest hmac_sha256(std::string_view key, std::string_view data);

std::string to_hex(const Digest& digest);
std::string to_hex(std::string_view bytes);
std::optional<Digest> digest_from_hex(std::string_view hex);

// Raw digest bytes as a string, for feeding one digest into another.
inline std::string digest_bytes(const Digest& d) {
  return std::string(reinterpret_cast<const char*>(d.data()), d.size());
}

// base64url (RFC 4648 section 5) encoding of the leading `chars * 6` bits.
std::string base64url_prefix(const Digest& digest, std::size_t chars);

bool is_base64url(std::string_view s);

// Constant-time comparison; signatures are compared with this.
bool equal_bytes(std::string_view a, std::string_view b);

}  // namespace rhsim

#endif  // RHSIM_CRYPTO_H_
