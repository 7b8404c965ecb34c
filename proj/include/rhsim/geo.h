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

#ifndef RHSIM_GEO_H_
#define RHSIM_GEO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rhsim::geo {

// Latitude/longitude held as integer 1e-5 degree units, so the ledger text
// form ("36.1452/-85.4969") round-trips exactly.
class GeoPoint {
 public:
  static constexpr int kDecimals = 5;
  static constexpr std::int64_t kScale = 100000;

  GeoPoint() = default;

  // Nullopt when out of range ([-90, 90] x [-180, 180]).
  static std::optional<GeoPoint> from_e5(std::int64_t lat_e5,
                                         std::int64_t lon_e5);
  // Rounds to the nearest 1e-5 degree.
  static std::optional<GeoPoint> from_degrees(double lat, double lon);
  // Parses "lat/lon" with at most five fractional digits per component.
  static std::optional<GeoPoint> parse(std::string_view text);

  std::int64_t lat_e5() const noexcept { return lat_e5_; }
  std::int64_t lon_e5() const noexcept { return lon_e5_; }
  double lat() const noexcept { return double(lat_e5_) / kScale; }
  double lon() const noexcept { return double(lon_e5_) / kScale; }

  // Five-decimal fixed point with trailing zeros trimmed.
  std::string to_string() const;

  bool operator==(const GeoPoint&) const = default;

 private:
  GeoPoint(std::int64_t lat, std::int64_t lon) : lat_e5_(lat), lon_e5_(lon) {}

  std::int64_t lat_e5_ = 0;
  std::int64_t lon_e5_ = 0;
};

inline constexpr double kEarthRadiusM = 6371008.8;

// Great-circle distance in metres.
double haversine_m(const GeoPoint& a, const GeoPoint& b);

}  // namespace rhsim::geo

#endif  // RHSIM_GEO_H_
