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

#include "rhsim/timestamp.h"

#include <cstdio>

namespace rhsim {
namespace {

// Reads [min_len, max_len] digits from `s` at `pos`.
std::optional<int> read_number(std::string_view s, std::size_t& pos,
                               std::size_t min_len, std::size_t max_len) {
  std::size_t start = pos;
  int v = 0;
  while (pos < s.size() && pos - start < max_len && s[pos] >= '0' &&
         s[pos] <= '9') {
    v = v * 10 + (s[pos] - '0');
    ++pos;
  }
  if (pos - start < min_len) return std::nullopt;
  return v;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos >= s.size() || s[pos] != c) return false;
  ++pos;
  return true;
}

}  // namespace

std::optional<RideTime> RideTime::parse(std::string_view text) {
  using namespace std::chrono;
  std::size_t pos = 0;
  auto mon = read_number(text, pos, 1, 2);
  if (!mon || !expect(text, pos, '/')) return std::nullopt;
  auto day = read_number(text, pos, 1, 2);
  if (!day || !expect(text, pos, '/')) return std::nullopt;
  auto yr = read_number(text, pos, 4, 4);
  if (!yr || !expect(text, pos, ' ')) return std::nullopt;
  auto hh = read_number(text, pos, 2, 2);
  if (!hh || !expect(text, pos, ':')) return std::nullopt;
  auto mm = read_number(text, pos, 2, 2);
  if (!mm || pos != text.size()) return std::nullopt;
  if (*hh > 23 || *mm > 59) return std::nullopt;
  year_month_day ymd{year{*yr}, month{unsigned(*mon)}, std::chrono::day{unsigned(*day)}};
  if (!ymd.ok()) return std::nullopt;
  RideTime t;
  t.minutes_ = sys_days{ymd} + std::chrono::hours{*hh} + std::chrono::minutes{*mm};
  t.text_ = std::string(text);
  return t;
}

RideTime RideTime::from_minutes(Minutes t) {
  using namespace std::chrono;
  auto days = floor<std::chrono::days>(t);
  year_month_day ymd{days};
  hh_mm_ss hms{t - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%u/%u/%d %02d:%02d",
                unsigned(ymd.month()), unsigned(ymd.day()), int(ymd.year()),
                int(hms.hours().count()), int(hms.minutes().count()));
  RideTime out;
  out.minutes_ = t;
  out.text_ = buf;
  return out;
}

}  // namespace rhsim
