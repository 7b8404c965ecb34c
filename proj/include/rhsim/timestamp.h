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

#ifndef RHSIM_TIMESTAMP_H_
#define RHSIM_TIMESTAMP_H_

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace rhsim {

// Client-supplied ride time in the ledger's "M/D/YYYY HH:MM" form. The text
// is kept verbatim; ordering uses the parsed minute.
class RideTime {
 public:
  using Minutes = std::chrono::sys_time<std::chrono::minutes>;

  static std::optional<RideTime> parse(std::string_view text);
  static RideTime from_minutes(Minutes t);

  const std::string& text() const noexcept { return text_; }
  Minutes minutes() const noexcept { return minutes_; }

  RideTime plus(std::chrono::minutes d) const {
    return from_minutes(minutes_ + d);
  }

  std::strong_ordering operator<=>(const RideTime& o) const {
    return minutes_ <=> o.minutes_;
  }
  bool operator==(const RideTime& o) const { return minutes_ == o.minutes_; }

 private:
  Minutes minutes_{};
  std::string text_;
};

}  // namespace rhsim

#endif  // RHSIM_TIMESTAMP_H_
