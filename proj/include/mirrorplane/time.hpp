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

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "mirrorplane/result.hpp"

namespace mirrorplane {

/// Span of logical time. One unit is one simulated minute.
struct Duration {
  std::int64_t minutes = 0;

  static constexpr Duration of_minutes(std::int64_t m) { return Duration{m}; }
  static constexpr Duration of_hours(std::int64_t h) { return Duration{h * 60}; }
  static constexpr Duration of_days(std::int64_t d) { return Duration{d * 24 * 60}; }

  friend constexpr auto operator<=>(Duration, Duration) = default;
  friend constexpr Duration operator+(Duration a, Duration b) {
    return Duration{a.minutes + b.minutes};
  }
  friend constexpr Duration operator*(Duration a, std::int64_t k) {
    return Duration{a.minutes * k};
  }
};

/// A point on the logical clock. Starts at zero for a fresh world.
struct LogicalTime {
  std::int64_t minutes = 0;

  friend constexpr auto operator<=>(LogicalTime, LogicalTime) = default;
  friend constexpr LogicalTime operator+(LogicalTime t, Duration d) {
    return LogicalTime{t.minutes + d.minutes};
  }
  friend constexpr Duration operator-(LogicalTime a, LogicalTime b) {
    return Duration{a.minutes - b.minutes};
  }
};

/// Parses "90", "15m", "36h", "7d". A bare number is minutes.
Result<Duration> parse_duration(std::string_view text);

/// Inverse of parse_duration using the largest exact unit ("7d", "90m").
std::string format_duration(Duration d);

/// Monotone simulated clock; never moves backwards.
class LogicalClock {
 public:
  LogicalClock() = default;
  explicit LogicalClock(LogicalTime start) : now_(start) {}

  LogicalTime now() const { return now_; }
  Status advance(Duration d);

 private:
  LogicalTime now_{};
};

}  // namespace mirrorplane
