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

#include "mirrorplane/audit.hpp"

#include "json_util.hpp"

namespace mirrorplane {

using detail::child;
using nlohmann::json;

std::string_view to_string(Outcome outcome) {
  return outcome == Outcome::Success ? "Success" : "Failure";
}

json to_json(const AuditEvent& event) {
  return json{{"seq", event.seq},
              {"tick_id", detail::optional_to_json(event.tick_id)},
              {"job_id", detail::optional_to_json(event.job_id)},
              {"actor", event.actor},
              {"action", event.action},
              {"target", event.target},
              {"outcome", to_string(event.outcome)},
              {"at", event.at.minutes},
              {"detail", event.detail}};
}

Result<AuditEvent> audit_event_from_json(const json& j, const std::string& pointer) {
  AuditEvent e;
  MP_TRY_ASSIGN(seq, detail::get_int(j, "seq", pointer));
  MP_TRY_ASSIGN(tick, detail::get_optional_int(j, "tick_id", pointer));
  MP_TRY_ASSIGN(job, detail::get_optional_string(j, "job_id", pointer));
  MP_TRY_ASSIGN(actor, detail::get_string(j, "actor", pointer));
  MP_TRY_ASSIGN(action, detail::get_string(j, "action", pointer));
  MP_TRY_ASSIGN(target, detail::get_string(j, "target", pointer));
  MP_TRY_ASSIGN(outcome, detail::get_string(j, "outcome", pointer));
  MP_TRY_ASSIGN(at, detail::get_int(j, "at", pointer));
  MP_TRY_ASSIGN(text, detail::get_string(j, "detail", pointer));
  if (seq < 1) return detail::schema_error(child(pointer, "seq"), "must be >= 1");
  if (outcome != "Success" && outcome != "Failure") {
    return detail::schema_error(child(pointer, "outcome"), "unknown outcome");
  }
  e.seq = static_cast<std::uint64_t>(seq);
  if (tick) e.tick_id = static_cast<std::uint64_t>(*tick);
  e.job_id = job;
  e.actor = std::move(actor);
  e.action = std::move(action);
  e.target = std::move(target);
  e.outcome = outcome == "Success" ? Outcome::Success : Outcome::Failure;
  e.at = LogicalTime{at};
  e.detail = std::move(text);
  return e;
}

bool AuditFilter::matches(const AuditEvent& event) const {
  if (actor && event.actor != *actor) return false;
  if (action) {
    if (!action->empty() && action->back() == '*') {
      std::string_view prefix(action->data(), action->size() - 1);
      if (event.action.compare(0, prefix.size(), prefix) != 0) return false;
    } else if (event.action != *action) {
      return false;
    }
  }
  if (target && event.target != *target) return false;
  if (tick_id && event.tick_id != tick_id) return false;
  if (job_id && event.job_id != job_id) return false;
  if (from_seq && event.seq < *from_seq) return false;
  if (to_seq && event.seq > *to_seq) return false;
  return true;
}

AuditLog::AuditLog(const AuditLog& other) {
  std::lock_guard lock(other.mu_);
  events_ = other.events_;
}

AuditLog& AuditLog::operator=(const AuditLog& other) {
  if (this == &other) return *this;
  std::vector<AuditEvent> copy = other.events();
  std::lock_guard lock(mu_);
  events_ = std::move(copy);
  return *this;
}

std::uint64_t AuditLog::append(AuditEvent event) {
  std::lock_guard lock(mu_);
  event.seq = events_.size() + 1;
  events_.push_back(std::move(event));
  return events_.back().seq;
}

std::vector<AuditEvent> AuditLog::query(const AuditFilter& filter) const {
  std::lock_guard lock(mu_);
  std::vector<AuditEvent> out;
  for (const auto& e : events_) {
    if (filter.matches(e)) out.push_back(e);
  }
  return out;
}

std::vector<AuditEvent> AuditLog::tail(std::size_t n) const {
  std::lock_guard lock(mu_);
  auto start = events_.size() > n ? events_.size() - n : 0;
  return {events_.begin() + static_cast<std::ptrdiff_t>(start), events_.end()};
}

std::vector<AuditEvent> AuditLog::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::size_t AuditLog::size() const {
  std::lock_guard lock(mu_);
  return events_.size();
}

Result<AuditLog> AuditLog::from_events(std::vector<AuditEvent> events) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].seq != i + 1) {
      return make_error(Errc::SchemaError, "/audit/" + std::to_string(i) + "/seq: gap or reorder");
    }
  }
  AuditLog log;
  log.events_ = std::move(events);
  return log;
}

AuditScope AuditScope::with_tick(std::uint64_t tick_id) const {
  AuditScope copy = *this;
  copy.tick_id_ = tick_id;
  return copy;
}

AuditScope AuditScope::with_job(std::string job_id) const {
  AuditScope copy = *this;
  copy.job_id_ = std::move(job_id);
  return copy;
}

std::uint64_t AuditScope::emit(std::string_view actor, std::string_view action,
                               std::string_view target, Outcome outcome, std::string detail) const {
  AuditEvent e;
  e.tick_id = tick_id_;
  e.job_id = job_id_;
  e.actor = std::string(actor);
  e.action = std::string(action);
  e.target = std::string(target);
  e.outcome = outcome;
  e.at = at_;
  e.detail = std::move(detail);
  return log_->append(std::move(e));
}

}  // namespace mirrorplane
