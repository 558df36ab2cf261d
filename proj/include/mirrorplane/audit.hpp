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

// Append-only audit sink shared by every module.
//
// Invariants:
//   - seq starts at 1 and is gapless; append assigns it under a lock.
//   - events are never mutated or removed once appended.

#include <cstdint>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorplane/result.hpp"
#include "mirrorplane/time.hpp"

namespace mirrorplane {

inline constexpr std::string_view kControlPlaneActor = "control-plane";

enum class Outcome { Success, Failure };

std::string_view to_string(Outcome outcome);

struct AuditEvent {
  std::uint64_t seq = 0;
  std::optional<std::uint64_t> tick_id;
  std::optional<std::string> job_id;
  std::string actor;
  std::string action;
  std::string target;
  Outcome outcome = Outcome::Success;
  LogicalTime at;
  std::string detail;

  friend bool operator==(const AuditEvent&, const AuditEvent&) = default;
};

nlohmann::json to_json(const AuditEvent& event);
Result<AuditEvent> audit_event_from_json(const nlohmann::json& j, const std::string& pointer);

struct AuditFilter {
  std::optional<std::string> actor;
  std::optional<std::string> action;  // exact match, or prefix when it ends in '*'
  std::optional<std::string> target;
  std::optional<std::uint64_t> tick_id;
  std::optional<std::string> job_id;
  std::optional<std::uint64_t> from_seq;
  std::optional<std::uint64_t> to_seq;

  bool matches(const AuditEvent& event) const;
};

class AuditLog {
 public:
  AuditLog() = default;
  AuditLog(const AuditLog& other);
  AuditLog& operator=(const AuditLog& other);

  /// Assigns the next seq and stores the event. Returns the assigned seq.
  std::uint64_t append(AuditEvent event);

  std::vector<AuditEvent> query(const AuditFilter& filter) const;
  std::vector<AuditEvent> tail(std::size_t n) const;
  std::vector<AuditEvent> events() const;
  std::size_t size() const;

  /// Restores a log from persisted events. Rejects gaps and reordering.
  static Result<AuditLog> from_events(std::vector<AuditEvent> events);

 private:
  mutable std::mutex mu_;
  std::vector<AuditEvent> events_;
};

/// Carries the context every audited mutation needs: where to write, the
/// logical time, and the tick or job the mutation belongs to.
class AuditScope {
 public:
  AuditScope(AuditLog& log, LogicalTime at) : log_(&log), at_(at) {}

  AuditScope with_tick(std::uint64_t tick_id) const;
  AuditScope with_job(std::string job_id) const;

  LogicalTime now() const { return at_; }
  std::optional<std::uint64_t> tick_id() const { return tick_id_; }

  std::uint64_t emit(std::string_view actor, std::string_view action, std::string_view target,
                     Outcome outcome = Outcome::Success, std::string detail = {}) const;

 private:
  AuditLog* log_;
  LogicalTime at_;
  std::optional<std::uint64_t> tick_id_;
  std::optional<std::string> job_id_;
};

}  // namespace mirrorplane
