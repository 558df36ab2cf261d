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

// Data-plane simulation: mirror identities authenticate with their vault
// key (or are impersonated through ActAs), then bucket access is decided
// from ownership and reader-group membership. Every decision is audited
// with the mirror identity as the actor.

#include <cstdint>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorplane/audit.hpp"
#include "mirrorplane/cloud.hpp"
#include "mirrorplane/result.hpp"
#include "mirrorplane/vault.hpp"

namespace mirrorplane {

struct Token {
  std::string token_id;
  std::string subject;                     // mirror account email
  std::optional<std::string> minted_from;  // key id; unset for ActAs tokens
  LogicalTime issued_at;
  std::optional<std::string> via_actas;  // workspace identity

  friend bool operator==(const Token&, const Token&) = default;
};

enum class Decision { Allow, Deny };
enum class DecisionReason { Owner, ReaderGroup, NotAuthorized, InvalidToken, DisabledAccount };
enum class Action { Read, Write };

std::string_view to_string(Decision d);
std::string_view to_string(DecisionReason r);
std::string_view to_string(Action a);
Result<Action> parse_action(std::string_view text);

struct AccessDecision {
  Decision decision = Decision::Deny;
  DecisionReason reason = DecisionReason::NotAuthorized;

  bool allowed() const { return decision == Decision::Allow; }
  std::string to_string() const;  // "Allow(Owner)"
  friend bool operator==(const AccessDecision&, const AccessDecision&) = default;
};

/// Issued tokens and id counters. Minting is safe from concurrent readers.
class AuthzState {
 public:
  AuthzState() = default;
  AuthzState(const AuthzState& other);
  AuthzState& operator=(const AuthzState& other);

  Token mint(std::string subject, std::optional<std::string> minted_from, LogicalTime at,
             std::optional<std::string> via_actas);
  std::string next_job_id();
  std::optional<Token> token(std::string_view token_id) const;
  std::vector<Token> tokens() const;

  nlohmann::json to_json() const;
  static Result<AuthzState> from_json(const nlohmann::json& j, const std::string& pointer);

 private:
  mutable std::mutex mu_;
  std::map<std::string, Token, std::less<>> tokens_;
  std::uint64_t next_token_seq_ = 1;
  std::uint64_t next_job_seq_ = 1;
};

/// Read-only view of control-plane state used by access decisions.
struct AccessView {
  const Cloud& cloud;
  const Vault& vault;
};

/// Reads the caller's own key from the vault (owner gate applies) and mints
/// a token bound to that key version.
Result<Token> authenticate(std::string_view caller, std::string_view account_email, AccessView view,
                           AuthzState& state, const AuditScope& audit);

/// Mints a token for a workspace identity holding ActAs on the account.
Result<Token> impersonate(std::string_view workspace_identity, std::string_view account_email,
                          AccessView view, AuthzState& state, const AuditScope& audit);

/// Deny reason when the token can no longer be used, nullopt when valid.
/// Key-bound tokens live while their key is Active or Retiring; ActAs tokens
/// while the ActAs binding remains. Both die with the account.
std::optional<DecisionReason> token_problem(const Token& token, AccessView view);

Result<AccessDecision> authorize(const Token& token, std::string_view bucket, Action action,
                                 AccessView view, const AuditScope& audit);

struct JobStep {
  std::string path;  // "gs://<bucket>/<object path>" or a bare bucket id
  Action action = Action::Read;
};

struct JobRequest {
  /// A directory principal authenticates with its key; "user:<name>"
  /// impersonates through ActAs.
  std::string caller;
  std::string account_email;
  std::vector<JobStep> steps;
};

struct JobStepResult {
  JobStep step;
  std::string bucket;
  std::optional<AccessDecision> decision;
  std::optional<Error> error;
};

struct JobResult {
  std::string job_id;
  Token token;
  std::vector<JobStepResult> steps;
};

/// Authenticates once, then authorizes every step with that token. A failed
/// step does not stop the remaining ones; an authentication failure stops
/// the job before any authorization.
Result<JobResult> submit_job(const JobRequest& request, AccessView view, AuthzState& state,
                             const AuditScope& audit);

/// Bucket id of a job path: "gs://user.a.dp.domain/x/y" -> "user.a.dp.domain".
/// HDFS paths under a user home map to that user's bucket first.
std::string bucket_of_path(std::string_view path);

}  // namespace mirrorplane
