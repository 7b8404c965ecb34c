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

#include "rhsim/geo.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rhsim::geo {
namespace {

constexpr std::int64_t kMaxLat = 90 * GeoPoint::kScale;
constexpr std::int64_t kMaxLon = 180 * GeoPoint::kScale;

// Strict decimal: [-]digits[.digits], at most kDecimals fractional digits.
std::optional<std::int64_t> parse_fixed(std::string_view s) {
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;
  std::int64_t whole = 0;
  std::size_t i = 0;
  for (; i < s.size() && s[i] != '.'; ++i) {
    if (s[i] < '0' || s[i] > '9' || i >= 3) return std::nullopt;
    whole = whole * 10 + (s[i] - '0');
  }
  if (i == 0) return std::nullopt;
  std::int64_t frac = 0;
  int digits = 0;
  if (i < s.size()) {
    ++i;  // '.'
    if (i == s.size()) return std::nullopt;
    for (; i < s.size(); ++i, ++digits) {
      if (s[i] < '0' || s[i] > '9' || digits >= GeoPoint::kDecimals) {
        return std::nullopt;
      }
      frac = frac * 10 + (s[i] - '0');
    }
  }
  for (; digits < GeoPoint::kDecimals; ++digits) frac *= 10;
  std::int64_t v = whole * GeoPoint::kScale + frac;
  return negative ? -v : v;
}

std::string format_fixed(std::int64_t v) {
  std::string out;
  if (v < 0) {
    out.push_back('-');
    v = -v;
  }
  out += std::to_string(v / GeoPoint::kScale);
  std::string frac = std::to_string(v % GeoPoint::kScale);
  frac.insert(0, GeoPoint::kDecimals - frac.size(), '0');
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  if (!frac.empty()) {
    out.push_back('.');
    out += frac;
  }
  return out;
}

}  // namespace

std::optional<GeoPoint> GeoPoint::from_e5(std::int64_t lat_e5,
                                          std::int64_t lon_e5) {
  if (lat_e5 < -kMaxLat || lat_e5 > kMaxLat || lon_e5 < -kMaxLon ||
      lon_e5 > kMaxLon) {
    return std::nullopt;
  }
  return GeoPoint(lat_e5, lon_e5);
}

std::optional<GeoPoint> GeoPoint::from_degrees(double lat, double lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon)) return std::nullopt;
  return from_e5(std::llround(lat * kScale), std::llround(lon * kScale));
}

std::optional<GeoPoint> GeoPoint::parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto lat = parse_fixed(text.substr(0, slash));
  auto lon = parse_fixed(text.substr(slash + 1));
  if (!lat || !lon) return std::nullopt;
  return from_e5(*lat, *lon);
}

std::string GeoPoint::to_string() const {
  return format_fixed(lat_e5_) + "/" + format_fixed(lon_e5_);
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double phi1 = a.lat() * kRad;
  const double phi2 = b.lat() * kRad;
  const double dphi = (b.lat() - a.lat()) * kRad;
  const double dlambda = (b.lon() - a.lon()) * kRad;
  const double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) *
                       std::sin(dlambda / 2);
  return 2 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace rhsim::geo
