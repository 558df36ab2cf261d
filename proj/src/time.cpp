// Copyright 2026 The Mirrorplane Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mirrorplane/time.hpp"

#include <charconv>
#include <limits>

namespace mirrorplane {

Result<Duration> parse_duration(std::string_view text) {
  if (text.empty()) return make_error(Errc::InvalidArgument, "empty duration");
  std::int64_t unit = 1;
  std::string_view digits = text;
  switch (text.back()) {
    case 'm':
      unit = 1;
      digits.remove_suffix(1);
      break;
    case 'h':
      unit = 60;
      digits.remove_suffix(1);
      break;
    case 'd':
      unit = 24 * 60;
      digits.remove_suffix(1);
      break;
    default: break;
  }
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || value < 0) {
    return make_error(Errc::InvalidArgument, "bad duration '" + std::string(text) + "'");
  }
  if (value > std::numeric_limits<std::int64_t>::max() / unit) {
    return make_error(Errc::InvalidArgument, "duration overflow");
  }
  return Duration{value * unit};
}

std::string format_duration(Duration d) {
  constexpr std::int64_t kDay = 24 * 60;
  if (d.minutes != 0 && d.minutes % kDay == 0) return std::to_string(d.minutes / kDay) + "d";
  if (d.minutes != 0 && d.minutes % 60 == 0) return std::to_string(d.minutes / 60) + "h";
  return std::to_string(d.minutes) + "m";
}

Status LogicalClock::advance(Duration d) {
  if (d.minutes < 0) return make_error(Errc::InvalidArgument, "clock cannot move backwards");
  now_ = now_ + d;
  return {};
}

}  // namespace mirrorplane
