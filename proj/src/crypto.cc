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

#include "rhsim/crypto.h"

#include <openssl/evp.h>
#include <openssl/crypto.h>

#include <algorithm>
#include <array>
#include <initializer_list>
#include <stdexcept>

namespace rhsim {
namespace {

constexpr char kHexDigits[] = "0123456789abcdef";
constexpr char kBase64Url[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

const EVP_MD* sha256_md() {
  static EVP_MD* md = EVP_MD_fetch(nullptr, "SHA256", nullptr);
  if (md == nullptr) throw std::runtime_error("SHA256 unavailable");
  return md;
}

void digest_into(EVP_MD_CTX* ctx, std::initializer_list<std::string_view> parts, Digest& out) {
  unsigned int len = 0;
  bool ok = ctx != nullptr && EVP_DigestInit_ex2(ctx, sha256_md(), nullptr) == 1;
  for (std::string_view p : parts) ok = ok && EVP_DigestUpdate(ctx, p.data(), p.size()) == 1;
  ok = ok && EVP_DigestFinal_ex(ctx, out.data(), &len) == 1 && len == out.size();
  if (!ok) throw std::runtime_error("sha256 failed");
}

}  // namespace

Digest sha256(std::string_view data) {
  Digest out{};
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  digest_into(ctx, {data}, out);
  EVP_MD_CTX_free(ctx);
  return out;
}

// RFC 2104 over the fetched digest; HMAC() re-fetches SHA-256 on every call.
Digest hmac_sha256(std::string_view key, std::string_view data) {
  constexpr std::size_t kBlock = 64;
  std::array<unsigned char, kBlock> k{};
  if (key.size() > kBlock) {
    const Digest kd = sha256(key);
    std::copy(kd.begin(), kd.end(), k.begin());
  } else {
    std::copy(key.begin(), key.end(), k.begin());
  }
  std::array<char, kBlock> ipad{}, opad{};
  for (std::size_t i = 0; i < kBlock; ++i) {
    ipad[i] = static_cast<char>(k[i] ^ 0x36);
    opad[i] = static_cast<char>(k[i] ^ 0x5c);
  }
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  Digest inner{};
  digest_into(ctx, {std::string_view(ipad.data(), kBlock), data}, inner);
  Digest out{};
  digest_into(ctx,
              {std::string_view(opad.data(), kBlock),
               std::string_view(reinterpret_cast<const char*>(inner.data()), inner.size())},
              out);
  EVP_MD_CTX_free(ctx);
  OPENSSL_cleanse(k.data(), k.size());
  return out;
}

std::string to_hex(const Digest& digest) {
  return to_hex(std::string_view(reinterpret_cast<const char*>(digest.data()),
                                 digest.size()));
}

std::string to_hex(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(kHexDigits[c >> 4]);
    out.push_back(kHexDigits[c & 0xf]);
  }
  return out;
}

std::optional<Digest> digest_from_hex(std::string_view hex) {
  Digest out{};
  if (hex.size() != out.size() * 2) return std::nullopt;
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

std::string base64url_prefix(const Digest& digest, std::size_t chars) {
  if (chars * 6 > digest.size() * 8) {
    throw std::invalid_argument("base64url_prefix: not enough digest bits");
  }
  std::string out;
  out.reserve(chars);
  for (std::size_t i = 0; i < chars; ++i) {
    std::size_t bit = i * 6;
    unsigned value = 0;
    for (std::size_t b = 0; b < 6; ++b, ++bit) {
      unsigned byte = digest[bit / 8];
      value = value << 1 | ((byte >> (7 - bit % 8)) & 1u);
    }
    out.push_back(kBase64Url[value]);
  }
  return out;
}

bool is_base64url(std::string_view s) {
  for (char c : s) {
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
              (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

bool equal_bytes(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  unsigned char diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff |= static_cast<unsigned char>(a[i] ^ b[i]);
  }
  return diff == 0;
}

}  // namespace rhsim
