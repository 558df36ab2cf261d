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

#include "mirrorplane/authz.hpp"

#include "json_util.hpp"
#include "mirrorplane/onboarder.hpp"

namespace mirrorplane {

using detail::child;
using nlohmann::json;

std::string_view to_string(Decision d) { return d == Decision::Allow ? "Allow" : "Deny"; }

std::string_view to_string(DecisionReason r) {
  switch (r) {
    case DecisionReason::Owner: return "Owner";
    case DecisionReason::ReaderGroup: return "ReaderGroup";
    case DecisionReason::NotAuthorized: return "NotAuthorized";
    case DecisionReason::InvalidToken: return "InvalidToken";
    case DecisionReason::DisabledAccount: return "DisabledAccount";
  }
  return "NotAuthorized";
}

std::string_view to_string(Action a) { return a == Action::Read ? "read" : "write"; }

Result<Action> parse_action(std::string_view text) {
  if (text == "read" || text == "Read") return Action::Read;
  if (text == "write" || text == "Write") return Action::Write;
  return make_error(Errc::InvalidArgument, "action must be read or write: " + std::string(text));
}

std::string AccessDecision::to_string() const {
  return std::string(mirrorplane::to_string(decision)) + "(" +
         std::string(mirrorplane::to_string(reason)) + ")";
}

// ---------------------------------------------------------------------------

AuthzState::AuthzState(const AuthzState& other) {
  std::lock_guard lock(other.mu_);
  tokens_ = other.tokens_;
  next_token_seq_ = other.next_token_seq_;
  next_job_seq_ = other.next_job_seq_;
}

AuthzState& AuthzState::operator=(const AuthzState& other) {
  if (this == &other) return *this;
  AuthzState copy(other);
  std::lock_guard lock(mu_);
  tokens_ = std::move(copy.tokens_);
  next_token_seq_ = copy.next_token_seq_;
  next_job_seq_ = copy.next_job_seq_;
  return *this;
}

Token AuthzState::mint(std::string subject, std::optional<std::string> minted_from, LogicalTime at,
                       std::optional<std::string> via_actas) {
  std::lock_guard lock(mu_);
  Token t{"tok-" + std::to_string(next_token_seq_++), std::move(subject), std::move(minted_from),
          at, std::move(via_actas)};
  tokens_.emplace(t.token_id, t);
  return t;
}

std::string AuthzState::next_job_id() {
  std::lock_guard lock(mu_);
  return "job-" + std::to_string(next_job_seq_++);
}

std::optional<Token> AuthzState::token(std::string_view token_id) const {
  std::lock_guard lock(mu_);
  auto it = tokens_.find(token_id);
  if (it == tokens_.end()) return std::nullopt;
  return it->second;
}

std::vector<Token> AuthzState::tokens() const {
  std::lock_guard lock(mu_);
  std::vector<Token> out;
  for (const auto& [id, t] : tokens_) out.push_back(t);
  return out;
}

json AuthzState::to_json() const {
  std::lock_guard lock(mu_);
  json tokens = json::object();
  for (const auto& [id, t] : tokens_) {
    tokens[id] = json{{"subject", t.subject},
                      {"minted_from", detail::optional_to_json(t.minted_from)},
                      {"issued_at", t.issued_at.minutes},
                      {"via_actas", detail::optional_to_json(t.via_actas)}};
  }
  return json{
      {"tokens", tokens}, {"next_token_seq", next_token_seq_}, {"next_job_seq", next_job_seq_}};
}

Result<AuthzState> AuthzState::from_json(const json& j, const std::string& pointer) {
  AuthzState state;
  MP_TRY_ASSIGN(next_token, detail::get_int(j, "next_token_seq", pointer));
  MP_TRY_ASSIGN(next_job, detail::get_int(j, "next_job_seq", pointer));
  state.next_token_seq_ = static_cast<std::uint64_t>(next_token);
  state.next_job_seq_ = static_cast<std::uint64_t>(next_job);
  MP_TRY_ASSIGN(tokens, detail::get_object(j, "tokens", pointer));
  for (const auto& [id, value] : tokens->items()) {
    const auto ptr = child(child(pointer, "tokens"), id);
    MP_TRY_ASSIGN(subject, detail::get_string(value, "subject", ptr));
    MP_TRY_ASSIGN(minted_from, detail::get_optional_string(value, "minted_from", ptr));
    MP_TRY_ASSIGN(issued, detail::get_int(value, "issued_at", ptr));
    MP_TRY_ASSIGN(via, detail::get_optional_string(value, "via_actas", ptr));
    state.tokens_.emplace(id, Token{id, subject, minted_from, LogicalTime{issued}, via});
  }
  return state;
}

// ---------------------------------------------------------------------------

Result<Token> authenticate(std::string_view caller, std::string_view account_email, AccessView view,
                           AuthzState& state, const AuditScope& audit) {
  auto key = view.vault.read_key(account_email, caller, audit);
  if (!key) {
    if (key.code() == Errc::PermissionDenied) return key.error();
    return make_error(Errc::AuthFailure, key.error().message());
  }
  const auto* account = view.cloud.account(account_email);
  if (account == nullptr || !account->active()) {
    audit.emit(caller, "authz.authenticate", account_email, Outcome::Failure, "AuthFailure");
    return make_error(Errc::AuthFailure, std::string(account_email) + " is not active");
  }
  auto token = state.mint(account->email, key->key_id, audit.now(), std::nullopt);
  audit.emit(account->email, "authz.authenticate", account->email, Outcome::Success,
             token.token_id + " key=" + key->key_id + " caller=" + std::string(caller));
  return token;
}

Result<Token> impersonate(std::string_view workspace_identity, std::string_view account_email,
                          AccessView view, AuthzState& state, const AuditScope& audit) {
  const auto actor = CloudPrincipal::user(std::string(workspace_identity));
  const auto* account = view.cloud.account(account_email);
  if (account != nullptr && !account->active()) {
    audit.emit(actor.to_string(), "authz.impersonate", account_email, Outcome::Failure,
               "AuthFailure");
    return make_error(Errc::AuthFailure, std::string(account_email) + " is disabled");
  }
  const auto* node = view.cloud.node(account_email);
  if (account == nullptr || node == nullptr || !node->has_binding(Role::ActAs, actor)) {
    audit.emit(actor.to_string(), "authz.impersonate", account_email, Outcome::Failure,
               "PermissionDenied");
    return make_error(Errc::PermissionDenied,
                      actor.to_string() + " may not act as " + std::string(account_email));
  }
  auto token =
      state.mint(account->email, std::nullopt, audit.now(), std::string(workspace_identity));
  audit.emit(account->email, "authz.impersonate", account->email, Outcome::Success,
             token.token_id + " via_actas=" + std::string(workspace_identity));
  return token;
}

std::optional<DecisionReason> token_problem(const Token& token, AccessView view) {
  const auto* account = view.cloud.account(token.subject);
  if (account == nullptr || !account->active()) return DecisionReason::DisabledAccount;
  if (token.minted_from) {
    const auto* key = view.vault.key(*token.minted_from);
    if (key == nullptr || !key->usable() || key->account_email != token.subject) {
      return DecisionReason::InvalidToken;
    }
    return std::nullopt;
  }
  if (!token.via_actas) return DecisionReason::InvalidToken;
  const auto* node = view.cloud.node(token.subject);
  if (node == nullptr || !node->has_binding(Role::ActAs, CloudPrincipal::user(*token.via_actas))) {
    return DecisionReason::InvalidToken;
  }
  return std::nullopt;
}

namespace {

AccessDecision decide(const Token& token, const ResourceNode& bucket, Action action,
                      AccessView view) {
  if (auto problem = token_problem(token, view)) return {Decision::Deny, *problem};
  const auto subject = CloudPrincipal::service_account(token.subject);
  if (bucket.has_binding(Role::BucketOwner, subject))
    return {Decision::Allow, DecisionReason::Owner};
  if (action == Action::Read) {
    for (const auto& b : bucket.bindings) {
      if (b.role != Role::BucketReader || b.principal.kind != CloudPrincipal::Kind::Group) continue;
      const auto* group = view.cloud.node(b.principal.id);
      if (group != nullptr && group->kind == NodeKind::CloudGroup &&
          group->has_binding(Role::GroupMember, subject)) {
        return {Decision::Allow, DecisionReason::ReaderGroup};
      }
    }
  }
  return {Decision::Deny, DecisionReason::NotAuthorized};
}

}  // namespace

Result<AccessDecision> authorize(const Token& token, std::string_view bucket, Action action,
                                 AccessView view, const AuditScope& audit) {
  const auto id = strip_bucket_scheme(bucket);
  const auto* node = view.cloud.node(id);
  if (node == nullptr || node->kind != NodeKind::Bucket) {
    return make_error(Errc::UnknownBucket, std::string(bucket));
  }
  auto decision = decide(token, *node, action, view);
  audit.emit(token.subject, "authz.authorize." + std::string(to_string(action)), id,
             decision.allowed() ? Outcome::Success : Outcome::Failure,
             decision.to_string() + " " + token.token_id);
  return decision;
}

std::string bucket_of_path(std::string_view path) {
  if (path.starts_with('/')) {
    auto mapped = map_hdfs_path(path);
    if (!mapped) return std::string(path);
    return bucket_of_path(*mapped);
  }
  if (path.starts_with(kBucketScheme)) path.remove_prefix(kBucketScheme.size());
  auto slash = path.find('/');
  return std::string(path.substr(0, slash));
}

Result<JobResult> submit_job(const JobRequest& request, AccessView view, AuthzState& state,
                             const AuditScope& audit) {
  if (request.steps.empty()) return make_error(Errc::InvalidArgument, "job has no steps");
  JobResult result;
  result.job_id = state.next_job_id();
  const auto job_audit = audit.with_job(result.job_id);

  constexpr std::string_view kWorkspacePrefix = "user:";
  Result<Token> token =
      std::string_view(request.caller).starts_with(kWorkspacePrefix)
          ? impersonate(request.caller.substr(kWorkspacePrefix.size()), request.account_email, view,
                        state, job_audit)
          : authenticate(request.caller, request.account_email, view, state, job_audit);
  if (!token) return token.error();
  result.token = *token;

  for (const auto& step : request.steps) {
    JobStepResult out{step, bucket_of_path(step.path), std::nullopt, std::nullopt};
    auto decision = authorize(result.token, out.bucket, step.action, view, job_audit);
    if (decision) {
      out.decision = *decision;
    } else {
      out.error = decision.error();
    }
    result.steps.push_back(std::move(out));
  }
  return result;
}

}  // namespace mirrorplane
