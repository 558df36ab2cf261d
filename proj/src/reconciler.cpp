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

#include "mirrorplane/reconciler.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "json_util.hpp"

namespace mirrorplane {

using detail::child;
using nlohmann::json;

std::string_view to_string(ShardingMode mode) {
  return mode == ShardingMode::SingleProject ? "SingleProject" : "PerOrgUnit";
}

Result<ShardingMode> parse_sharding_mode(std::string_view text) {
  if (text == "SingleProject") return ShardingMode::SingleProject;
  if (text == "PerOrgUnit") return ShardingMode::PerOrgUnit;
  return make_error(Errc::InvalidConfig, "unknown sharding_mode: " + std::string(text));
}

// ---------------------------------------------------------------------------
// Config

Status ReconcileConfig::validate() const {
  if (tick_interval.minutes <= 0)
    return make_error(Errc::InvalidConfig, "tick_interval must be > 0");
  if (!(rotation_age > tick_interval)) {
    return make_error(Errc::InvalidConfig, "rotation_age must exceed tick_interval");
  }
  if (retiring_grace.minutes <= 0)
    return make_error(Errc::InvalidConfig, "retiring_grace must be > 0");
  if (quota_default < 1) return make_error(Errc::InvalidConfig, "quota_default must be >= 1");
  if (!is_valid_resource_id(base_project)) {
    return make_error(Errc::InvalidConfig, "bad base_project: " + base_project);
  }
  return {};
}

json ReconcileConfig::to_json() const {
  return json{{"tick_interval", tick_interval.minutes},
              {"rotation_age", rotation_age.minutes},
              {"retiring_grace", retiring_grace.minutes},
              {"sharding_mode", to_string(sharding_mode)},
              {"base_project", base_project},
              {"quota_default", quota_default}};
}

Status ReconcileConfig::set(std::string_view key, std::string_view value) {
  auto set_duration = [&](Duration& target) -> Status {
    auto d = parse_duration(value);
    if (!d) return make_error(Errc::InvalidConfig, d.error().detail);
    target = *d;
    return {};
  };
  if (key == "tick_interval") return set_duration(tick_interval);
  if (key == "rotation_age") return set_duration(rotation_age);
  if (key == "retiring_grace") return set_duration(retiring_grace);
  if (key == "sharding_mode") {
    auto mode = parse_sharding_mode(value);
    if (!mode) return mode.error();
    sharding_mode = *mode;
    return {};
  }
  if (key == "base_project") {
    base_project = std::string(value);
    return {};
  }
  if (key == "quota_default") {
    try {
      std::size_t used = 0;
      quota_default = std::stoll(std::string(value), &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      return make_error(Errc::InvalidConfig, "quota_default must be an integer");
    }
    return {};
  }
  return make_error(Errc::InvalidConfig, "unknown config key: " + std::string(key));
}

Status ReconcileConfig::merge_json(const json& j, const std::string& pointer) {
  if (!j.is_object()) return detail::schema_error(pointer, "expected object");
  for (const auto& [key, value] : j.items()) {
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number_integer()) {
      text = std::to_string(value.get<std::int64_t>());
    } else {
      return detail::schema_error(child(pointer, key), "wrong type");
    }
    auto st = set(key, text);
    if (!st) return detail::schema_error(child(pointer, key), st.error().detail);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Naming and placement

Result<std::string> derive_mirror_name(std::string_view principal, std::string_view project) {
  if (principal.find('_') != std::string_view::npos) {
    return make_error(Errc::UnderscoreNotSupported, std::string(principal));
  }
  if (!is_valid_principal_name(principal)) {
    return make_error(Errc::InvalidName, std::string(principal));
  }
  return service_account_email(std::string(principal) + "-mirror", project);
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::string mirror_account_name(std::string_view principal) {
  return std::string(principal) + "-mirror";
}

}  // namespace

Placement select_project(const PrincipalRecord& principal, const ReconcileConfig& config,
                         const Cloud& cloud) {
  if (config.sharding_mode == ShardingMode::SingleProject) {
    return Placement{config.base_project, std::string(kIamStoreFolder)};
  }
  const std::string folder = upper(principal.org_unit) + "IAM";
  const std::string base = principal.org_unit + "-service-accounts-project";
  for (int n = 1;; ++n) {
    std::string candidate = n == 1 ? base : base + "-" + std::to_string(n);
    auto q = cloud.quota(candidate);
    if (!q || q->current_count < q->max_service_accounts) return Placement{candidate, folder};
  }
}

// ---------------------------------------------------------------------------
// Report

bool ReconcileReport::changed() const {
  return !created.empty() || !rotated.empty() || !actas_granted.empty() ||
         !decommissioned.empty() || !expired.empty();
}

namespace {

json error_to_json(const Error& e) {
  return json{{"code", to_string(e.code)}, {"detail", e.detail}};
}

struct ParsedError {
  Error error;
};

Result<ParsedError> error_from_json(const json& j, const std::string& pointer) {
  MP_TRY_ASSIGN(code, detail::get_string(j, "code", pointer));
  MP_TRY_ASSIGN(text, detail::get_string(j, "detail", pointer));
  auto parsed = parse_errc(code);
  if (!parsed) return detail::schema_error(child(pointer, "code"), "unknown error code");
  return ParsedError{Error{*parsed, text}};
}

template <typename T, typename F>
Result<std::vector<T>> array_from_json(const json& j, const std::string& key,
                                       const std::string& pointer, F&& parse_one) {
  MP_TRY_ASSIGN(items, detail::get_array(j, key, pointer));
  std::vector<T> out;
  for (std::size_t i = 0; i < items->size(); ++i) {
    auto parsed = parse_one((*items)[i], child(child(pointer, key), i));
    if (!parsed) return parsed.error();
    out.push_back(std::move(*parsed));
  }
  return out;
}

}  // namespace

json ReconcileReport::to_json() const {
  json j;
  j["tick_id"] = tick_id;
  j["at"] = at.minutes;
  j["aborted"] = aborted ? error_to_json(*aborted) : json(nullptr);
  j["created"] = json::array();
  for (const auto& c : created) {
    j["created"].push_back(json{{"principal", c.principal},
                                {"email", c.email},
                                {"project", c.project},
                                {"key_id", c.key_id},
                                {"replaced_disabled", c.replaced_disabled}});
  }
  j["rotated"] = json::array();
  for (const auto& r : rotated) {
    j["rotated"].push_back(json{{"email", r.email},
                                {"new_key_id", r.new_key_id},
                                {"retired_key_id", detail::optional_to_json(r.retired_key_id)}});
  }
  j["actas_granted"] = json::array();
  for (const auto& g : actas_granted) {
    j["actas_granted"].push_back(
        json{{"workspace_identity", g.workspace_identity}, {"email", g.email}});
  }
  j["decommissioned"] = json::array();
  for (const auto& d : decommissioned) {
    j["decommissioned"].push_back(json{{"principal", d.principal},
                                       {"email", d.email},
                                       {"keys_invalidated", d.keys_invalidated},
                                       {"actas_removed", d.actas_removed}});
  }
  j["rejected"] = json::array();
  for (const auto& r : rejected) {
    j["rejected"].push_back(json{{"principal", r.principal}, {"reason", to_string(r.reason)}});
  }
  j["errors"] = json::array();
  for (const auto& e : errors) {
    j["errors"].push_back(json{{"principal", e.principal}, {"error", error_to_json(e.error)}});
  }
  j["expired"] = json::array();
  for (const auto& t : expired) {
    j["expired"].push_back(json{{"key_id", t.key_id}, {"email", t.account_email}});
  }
  return j;
}

Result<ReconcileReport> ReconcileReport::from_json(const json& j, const std::string& pointer) {
  ReconcileReport r;
  MP_TRY_ASSIGN(tick, detail::get_int(j, "tick_id", pointer));
  MP_TRY_ASSIGN(at, detail::get_int(j, "at", pointer));
  r.tick_id = static_cast<std::uint64_t>(tick);
  r.at = LogicalTime{at};
  if (!j.contains("aborted")) return detail::schema_error(child(pointer, "aborted"), "missing");
  if (!j["aborted"].is_null()) {
    MP_TRY_ASSIGN(err, error_from_json(j["aborted"], child(pointer, "aborted")));
    r.aborted = err.error;
  }
  auto str = [](const json& o, const char* k, const std::string& p) {
    return detail::get_string(o, k, p);
  };
  {
    auto v = array_from_json<CreatedMirror>(
        j, "created", pointer, [&](const json& o, const std::string& p) -> Result<CreatedMirror> {
          MP_TRY_ASSIGN(principal, str(o, "principal", p));
          MP_TRY_ASSIGN(email, str(o, "email", p));
          MP_TRY_ASSIGN(project, str(o, "project", p));
          MP_TRY_ASSIGN(key_id, str(o, "key_id", p));
          MP_TRY_ASSIGN(replaced, detail::get_bool(o, "replaced_disabled", p));
          return CreatedMirror{principal, email, project, key_id, replaced};
        });
    if (!v) return v.error();
    r.created = std::move(*v);
  }
  {
    auto v = array_from_json<RotatedKey>(
        j, "rotated", pointer, [&](const json& o, const std::string& p) -> Result<RotatedKey> {
          MP_TRY_ASSIGN(email, str(o, "email", p));
          MP_TRY_ASSIGN(new_key, str(o, "new_key_id", p));
          MP_TRY_ASSIGN(retired, detail::get_optional_string(o, "retired_key_id", p));
          return RotatedKey{email, new_key, retired};
        });
    if (!v) return v.error();
    r.rotated = std::move(*v);
  }
  {
    auto v =
        array_from_json<ActAsGrant>(j, "actas_granted", pointer,
                                    [&](const json& o, const std::string& p) -> Result<ActAsGrant> {
                                      MP_TRY_ASSIGN(ws, str(o, "workspace_identity", p));
                                      MP_TRY_ASSIGN(email, str(o, "email", p));
                                      return ActAsGrant{ws, email};
                                    });
    if (!v) return v.error();
    r.actas_granted = std::move(*v);
  }
  {
    auto v = array_from_json<Decommissioned>(
        j, "decommissioned", pointer,
        [&](const json& o, const std::string& p) -> Result<Decommissioned> {
          MP_TRY_ASSIGN(principal, str(o, "principal", p));
          MP_TRY_ASSIGN(email, str(o, "email", p));
          MP_TRY_ASSIGN(keys, detail::get_int(o, "keys_invalidated", p));
          MP_TRY_ASSIGN(actas, detail::get_int(o, "actas_removed", p));
          return Decommissioned{principal, email, static_cast<std::size_t>(keys),
                                static_cast<std::size_t>(actas)};
        });
    if (!v) return v.error();
    r.decommissioned = std::move(*v);
  }
  {
    auto v = array_from_json<Rejection>(
        j, "rejected", pointer, [&](const json& o, const std::string& p) -> Result<Rejection> {
          MP_TRY_ASSIGN(principal, str(o, "principal", p));
          MP_TRY_ASSIGN(reason, str(o, "reason", p));
          auto code = parse_errc(reason);
          if (!code) return detail::schema_error(child(p, "reason"), "unknown error code");
          return Rejection{principal, *code};
        });
    if (!v) return v.error();
    r.rejected = std::move(*v);
  }
  {
    auto v = array_from_json<AccountError>(
        j, "errors", pointer, [&](const json& o, const std::string& p) -> Result<AccountError> {
          MP_TRY_ASSIGN(principal, str(o, "principal", p));
          MP_TRY_ASSIGN(err_obj, detail::get_object(o, "error", p));
          MP_TRY_ASSIGN(err, error_from_json(*err_obj, child(p, "error")));
          return AccountError{principal, err.error};
        });
    if (!v) return v.error();
    r.errors = std::move(*v);
  }
  {
    auto v = array_from_json<KeyTransition>(
        j, "expired", pointer, [&](const json& o, const std::string& p) -> Result<KeyTransition> {
          MP_TRY_ASSIGN(key_id, str(o, "key_id", p));
          MP_TRY_ASSIGN(email, str(o, "email", p));
          return KeyTransition{key_id, email, KeyState::Retiring, KeyState::Invalid};
        });
    if (!v) return v.error();
    r.expired = std::move(*v);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Control loop

Status Reconciler::ensure_placement(const Placement& placement, Cloud& cloud,
                                    const AuditScope& audit) const {
  auto ensure = [&](NodeKind kind, const std::string& id, const std::string& parent) -> Status {
    if (const auto* existing = cloud.node(id)) {
      if (existing->kind != kind) {
        return make_error(Errc::DuplicateId,
                          id + " exists as " + std::string(to_string(existing->kind)));
      }
      return {};
    }
    auto created = cloud.create_node(kind, id, parent, audit);
    if (!created) return created.error();
    return {};
  };
  const std::string iam_store{kIamStoreFolder};
  MP_TRY(ensure(NodeKind::Folder, iam_store, cloud.organization()));
  if (placement.folder != iam_store) MP_TRY(ensure(NodeKind::Folder, placement.folder, iam_store));
  return ensure(NodeKind::Project, placement.project, placement.folder);
}

void Reconciler::converge_member(const PrincipalRecord& principal, ControlPlaneRefs refs,
                                 ReconcileReport& report, const AuditScope& audit) const {
  auto fail = [&](Error error) {
    audit.emit(kReconcilerActor, "reconcile.error", principal.name, Outcome::Failure,
               error.message());
    report.errors.push_back(AccountError{principal.name, std::move(error)});
  };

  if (auto name = derive_mirror_name(principal.name, config_.base_project); !name) {
    if (name.code() == Errc::UnderscoreNotSupported) {
      audit.emit(kReconcilerActor, "reconcile.reject", principal.name, Outcome::Failure,
                 std::string(to_string(name.code())));
      report.rejected.push_back(Rejection{principal.name, name.code()});
    } else {
      fail(name.error());
    }
    return;
  }

  const LogicalTime now = audit.now();
  std::string email;
  bool fresh = false;
  const auto* active = refs.cloud.active_mirror_of(principal.name);
  if (active != nullptr && active->created_at < principal.created_at) {
    // The mirror belongs to an earlier principal of the same name whose
    // departure was never reconciled.
    auto done = decommission(principal.name, refs, audit);
    if (!done) return fail(done.error());
    report.decommissioned.push_back(*done);
    active = nullptr;
  }
  if (active != nullptr) {
    email = active->email;
  } else {
    // A previously decommissioned mirror is deleted, never re-enabled; its
    // keys stay Invalid in the vault.
    bool replaced = false;
    std::vector<std::string> stale;
    for (const auto* a : refs.cloud.accounts_of(principal.name)) stale.push_back(a->email);
    for (const auto& old : stale) {
      auto deleted = refs.cloud.delete_service_account(old, audit);
      if (!deleted) return fail(deleted.error());
      replaced = true;
    }
    const auto placement = select_project(principal, config_, refs.cloud);
    if (auto st = ensure_placement(placement, refs.cloud, audit); !st) return fail(st.error());
    auto account = refs.cloud.create_service_account(
        placement.project, mirror_account_name(principal.name), principal.name, audit);
    if (!account) return fail(account.error());
    email = account->email;
    auto secret = refs.secrets.generate(refs.vault.next_key_sequence());
    auto key =
        refs.vault.store_key(email, principal.name, std::move(secret), refs.directory, audit);
    if (!key) return fail(key.error());
    report.created.push_back(
        CreatedMirror{principal.name, email, placement.project, key->key_id, replaced});
    fresh = true;
  }

  if (principal.kind == PrincipalKind::Human && principal.has_workspace_identity) {
    auto grant =
        refs.cloud.bind_role(email, Role::ActAs, CloudPrincipal::user(principal.name), audit);
    if (!grant) return fail(grant.error());
    if (grant->added) report.actas_granted.push_back(ActAsGrant{principal.name, email});
  }

  if (fresh) return;
  const auto* entry = refs.vault.entry(email);
  const auto* active_key = entry ? entry->active() : nullptr;
  if (active_key != nullptr && now - active_key->created_at < config_.rotation_age) return;
  std::optional<std::string> retired;
  if (active_key != nullptr) retired = active_key->key_id;
  auto secret = refs.secrets.generate(refs.vault.next_key_sequence());
  auto key = refs.vault.store_key(email, principal.name, std::move(secret), refs.directory, audit);
  if (!key) return fail(key.error());
  report.rotated.push_back(RotatedKey{email, key->key_id, retired});
}

ReconcileReport Reconciler::tick(ControlPlaneRefs refs, std::uint64_t tick_id,
                                 const AuditScope& base_audit) const {
  const auto audit = base_audit.with_tick(tick_id);
  ReconcileReport report;
  report.tick_id = tick_id;
  report.at = audit.now();

  auto members = refs.directory.verify_source_group();
  if (!members) {
    audit.emit(kReconcilerActor, "reconcile.abort", std::string(kSourceGroup), Outcome::Failure,
               members.error().message());
    report.aborted = members.error();
    return report;
  }

  const std::set<std::string, std::less<>> wanted(members->begin(), members->end());
  for (const auto& name : *members) {
    const auto* principal = refs.directory.find(name);
    if (principal == nullptr) {
      audit.emit(kReconcilerActor, "reconcile.error", name, Outcome::Failure, "UnknownPrincipal");
      report.errors.push_back(AccountError{name, make_error(Errc::UnknownPrincipal, name)});
      continue;
    }
    converge_member(*principal, refs, report, audit);
  }

  std::vector<std::string> departed;
  for (const auto& [email, account] : refs.cloud.accounts()) {
    if (!account.active()) continue;
    if (!wanted.contains(account.source_principal) ||
        refs.directory.find(account.source_principal) == nullptr) {
      departed.push_back(account.source_principal);
    }
  }
  for (const auto& principal : departed) {
    auto done = decommission(principal, refs, audit);
    if (done) {
      report.decommissioned.push_back(*done);
    } else {
      audit.emit(kReconcilerActor, "reconcile.error", principal, Outcome::Failure,
                 done.error().message());
      report.errors.push_back(AccountError{principal, done.error()});
    }
  }

  report.expired = refs.vault.expire_versions(audit.now(), config_.retiring_grace, audit);
  return report;
}

Result<Decommissioned> Reconciler::decommission(std::string_view principal, ControlPlaneRefs refs,
                                                const AuditScope& audit) const {
  const auto* active = refs.cloud.active_mirror_of(principal);
  if (active == nullptr) return make_error(Errc::NoMirror, std::string(principal));
  const std::string email = active->email;

  Decommissioned record{std::string(principal), email, 0, 0};
  auto disabled = refs.cloud.disable_service_account(email, audit);
  if (!disabled) return disabled.error();
  if (refs.vault.entry(email) != nullptr) {
    auto revoked = refs.vault.revoke_all(email, audit);
    if (!revoked) return revoked.error();
    record.keys_invalidated = *revoked;
  }
  std::vector<CloudPrincipal> grantees;
  for (const auto& b : refs.cloud.node(email)->bindings) {
    if (b.role == Role::ActAs) grantees.push_back(b.principal);
  }
  for (const auto& g : grantees) {
    auto removed = refs.cloud.unbind_role(email, Role::ActAs, g, audit);
    if (!removed) return removed.error();
    if (*removed) ++record.actas_removed;
  }
  return record;
}

}  // namespace mirrorplane
