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

#include "mirrorplane/world.hpp"

#include <map>
#include <mutex>
#include <set>

#include "json_util.hpp"

namespace mirrorplane {

using detail::child;
using nlohmann::json;

World::World()
    : secrets_(std::make_unique<SeededSecretSource>(0)),
      latch_(std::make_unique<std::shared_mutex>()) {}

Result<World> World::create(std::uint64_t seed, ReconcileConfig config) {
  MP_TRY(config.validate());
  World world;
  world.seed_ = seed;
  world.config_ = std::move(config);
  world.secrets_ = std::make_unique<SeededSecretSource>(seed);
  world.cloud_.set_default_quota(world.config_.quota_default);

  const auto audit = world.scope();
  auto& cloud = world.cloud_;
  const std::string org = cloud.organization();
  for (auto folder : {kIamStoreFolder, kDataInfraFolder, kDataStoreFolder}) {
    MP_TRY(cloud.create_node(NodeKind::Folder, folder, org, audit));
  }
  MP_TRY(cloud.create_node(NodeKind::Project, kDataInfraProject, kDataInfraFolder, audit));
  MP_TRY(cloud.create_node(NodeKind::Project, kSharedStorageProject, kDataStoreFolder, audit));
  return world;
}

Status World::set_config(ReconcileConfig config) {
  MP_TRY(config.validate());
  std::unique_lock lock(*latch_);
  config_ = std::move(config);
  cloud_.set_default_quota(config_.quota_default);
  return {};
}

Status World::advance_clock(Duration d) {
  std::unique_lock lock(*latch_);
  return clock_.advance(d);
}

ReconcileReport World::reconcile_once() {
  std::unique_lock lock(*latch_);
  Reconciler reconciler(config_);
  auto report = reconciler.tick(refs(), next_tick_id_++, scope());
  last_report_ = report;
  return report;
}

std::vector<ReconcileReport> World::reconcile_ticks(std::size_t n) {
  std::vector<ReconcileReport> reports;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) (void)advance_clock(config_.tick_interval);
    reports.push_back(reconcile_once());
  }
  return reports;
}

Result<Decommissioned> World::decommission(std::string_view principal) {
  std::unique_lock lock(*latch_);
  return Reconciler(config_).decommission(principal, refs(), scope());
}

Result<BucketMapping> World::provision_bucket(std::string_view principal) {
  std::unique_lock lock(*latch_);
  return mirrorplane::provision_bucket(principal, directory_, cloud_, scope());
}

SyncReport World::sync_reader_groups() {
  std::unique_lock lock(*latch_);
  return mirrorplane::sync_reader_groups(directory_, cloud_, scope());
}

Result<Token> World::authenticate(std::string_view caller, std::string_view account_email) {
  std::shared_lock lock(*latch_);
  return mirrorplane::authenticate(caller, account_email, access_view(), authz_, scope());
}

Result<Token> World::impersonate(std::string_view workspace_identity,
                                 std::string_view account_email) {
  std::shared_lock lock(*latch_);
  return mirrorplane::impersonate(workspace_identity, account_email, access_view(), authz_,
                                  scope());
}

Result<AccessDecision> World::authorize(const Token& token, std::string_view bucket,
                                        Action action) {
  std::shared_lock lock(*latch_);
  return mirrorplane::authorize(token, bucket, action, access_view(), scope());
}

Result<AccessDecision> World::authorize(std::string_view token_id, std::string_view bucket,
                                        Action action) {
  auto token = authz_.token(token_id);
  if (!token) return make_error(Errc::UnknownToken, std::string(token_id));
  return authorize(*token, bucket, action);
}

Result<JobResult> World::submit_job(const JobRequest& request) {
  std::shared_lock lock(*latch_);
  return mirrorplane::submit_job(request, access_view(), authz_, scope());
}

// ---------------------------------------------------------------------------
// Snapshot

json World::to_json(bool reveal_secrets) const {
  json audit = json::array();
  for (const auto& e : audit_.events()) audit.push_back(mirrorplane::to_json(e));
  return json{{"format", kSnapshotFormat},
              {"seed", seed_},
              {"clock", clock_.now().minutes},
              {"next_tick_id", next_tick_id_},
              {"config", config_.to_json()},
              {"directory", directory_.to_json()},
              {"cloud", cloud_.to_json()},
              {"vault", vault_.to_json(reveal_secrets)},
              {"authz", authz_.to_json()},
              {"audit", audit},
              {"last_report", last_report_ ? last_report_->to_json() : json(nullptr)}};
}

std::string World::export_canonical(bool reveal_secrets) const {
  return to_json(reveal_secrets).dump(2) + "\n";
}

Result<World> World::from_json(const json& j) {
  if (!j.is_object()) return detail::schema_error("", "expected object");
  MP_TRY_ASSIGN(format, detail::get_string(j, "format", ""));
  if (format != kSnapshotFormat) return detail::schema_error("/format", "unsupported format");
  World world;
  MP_TRY_ASSIGN(seed, detail::get_int(j, "seed", ""));
  MP_TRY_ASSIGN(clock, detail::get_int(j, "clock", ""));
  MP_TRY_ASSIGN(next_tick, detail::get_int(j, "next_tick_id", ""));
  if (clock < 0) return detail::schema_error("/clock", "must be >= 0");
  if (next_tick < 1) return detail::schema_error("/next_tick_id", "must be >= 1");
  world.seed_ = static_cast<std::uint64_t>(seed);
  world.clock_ = LogicalClock(LogicalTime{clock});
  world.next_tick_id_ = static_cast<std::uint64_t>(next_tick);
  world.secrets_ = std::make_unique<SeededSecretSource>(world.seed_);

  MP_TRY_ASSIGN(config, detail::get_object(j, "config", ""));
  MP_TRY(world.config_.merge_json(*config, "/config"));
  if (auto st = world.config_.validate(); !st) {
    return detail::schema_error("/config", st.error().detail);
  }

  MP_TRY_ASSIGN(dir_json, detail::get_object(j, "directory", ""));
  MP_TRY_ASSIGN(directory, Directory::from_json(*dir_json, "/directory"));
  world.directory_ = std::move(directory);
  MP_TRY_ASSIGN(cloud_json, detail::get_object(j, "cloud", ""));
  MP_TRY_ASSIGN(cloud, Cloud::from_json(*cloud_json, "/cloud"));
  world.cloud_ = std::move(cloud);
  MP_TRY_ASSIGN(vault_json, detail::get_object(j, "vault", ""));
  MP_TRY_ASSIGN(vault, Vault::from_json(*vault_json, "/vault"));
  world.vault_ = std::move(vault);
  MP_TRY_ASSIGN(authz_json, detail::get_object(j, "authz", ""));
  MP_TRY_ASSIGN(authz, AuthzState::from_json(*authz_json, "/authz"));
  world.authz_ = authz;

  MP_TRY_ASSIGN(audit_json, detail::get_array(j, "audit", ""));
  std::vector<AuditEvent> events;
  for (std::size_t i = 0; i < audit_json->size(); ++i) {
    MP_TRY_ASSIGN(e, audit_event_from_json((*audit_json)[i], child("/audit", i)));
    events.push_back(std::move(e));
  }
  MP_TRY_ASSIGN(audit, AuditLog::from_events(std::move(events)));
  world.audit_ = audit;

  if (!j.contains("last_report")) return detail::schema_error("/last_report", "missing");
  if (!j["last_report"].is_null()) {
    MP_TRY_ASSIGN(report, ReconcileReport::from_json(j["last_report"], "/last_report"));
    world.last_report_ = std::move(report);
  }
  return world;
}

Result<World> World::import_canonical(std::string_view text) {
  auto parsed = json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) return make_error(Errc::SchemaError, "/: not valid JSON");
  return from_json(parsed);
}

// ---------------------------------------------------------------------------
// Invariants

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DanglingMember: return "DanglingMember";
    case ViolationKind::WorkspaceIdentityMismatch: return "WorkspaceIdentityMismatch";
    case ViolationKind::TreeViolation: return "TreeViolation";
    case ViolationKind::QuotaViolation: return "QuotaViolation";
    case ViolationKind::BijectionViolation: return "BijectionViolation";
    case ViolationKind::MirrorNameViolation: return "MirrorNameViolation";
    case ViolationKind::LockdownViolation: return "LockdownViolation";
    case ViolationKind::IllegalBinding: return "IllegalBinding";
    case ViolationKind::ActAsViolation: return "ActAsViolation";
    case ViolationKind::SingleActiveViolation: return "SingleActiveViolation";
    case ViolationKind::LifecycleViolation: return "LifecycleViolation";
    case ViolationKind::OwnershipViolation: return "OwnershipViolation";
    case ViolationKind::ReaderGroupViolation: return "ReaderGroupViolation";
    case ViolationKind::AuditGapViolation: return "AuditGapViolation";
    case ViolationKind::ConvergenceViolation: return "ConvergenceViolation";
    case ViolationKind::RotationViolation: return "RotationViolation";
  }
  return "Unknown";
}

json to_json(const Violation& v) {
  return json{{"kind", to_string(v.kind)}, {"subject", v.subject}, {"detail", v.detail}};
}

namespace {

class Checker {
 public:
  Checker(const World& world, std::vector<Violation>& out) : w_(world), out_(out) {}

  void add(ViolationKind kind, std::string subject, std::string detail) {
    out_.push_back(Violation{kind, std::move(subject), std::move(detail)});
  }

  void directory() {
    for (const auto& m : w_.directory().dangling_members()) {
      add(ViolationKind::DanglingMember, m, "group member is not a principal");
    }
    for (const auto& [name, p] : w_.directory().principals()) {
      if (p.has_workspace_identity != (p.kind == PrincipalKind::Human)) {
        add(ViolationKind::WorkspaceIdentityMismatch, name,
            std::string(to_string(p.kind)) + " with workspace identity " +
                (p.has_workspace_identity ? "true" : "false"));
      }
    }
  }

  void tree() {
    const auto& cloud = w_.cloud();
    for (const auto& [id, n] : cloud.nodes()) {
      if (n.kind == NodeKind::Organization) {
        if (id != cloud.organization() || n.parent) {
          add(ViolationKind::TreeViolation, id, "extra or parented organization");
        }
        continue;
      }
      if (!n.parent) {
        add(ViolationKind::TreeViolation, id, "node without parent");
        continue;
      }
      const auto* parent = cloud.node(*n.parent);
      if (parent == nullptr) {
        add(ViolationKind::TreeViolation, id, "missing parent " + *n.parent);
      } else if (!may_contain(parent->kind, n.kind)) {
        add(ViolationKind::TreeViolation, id, "illegal parent " + *n.parent);
      } else if (!cloud.reaches_root(id)) {
        add(ViolationKind::TreeViolation, id, "does not reach the organization");
      }
      for (const auto& b : n.bindings) {
        if (!role_applies_to(b.role, n.kind)) {
          add(ViolationKind::IllegalBinding, id,
              std::string(to_string(b.role)) + " on " + std::string(to_string(n.kind)));
        }
      }
    }
  }

  void accounts() {
    const auto& cloud = w_.cloud();
    std::map<std::string, std::vector<std::string>> active_by_source;
    for (const auto& [email, a] : cloud.accounts()) {
      const auto* n = cloud.node(email);
      if (n == nullptr || n->kind != NodeKind::ServiceAccount || n->parent != a.project) {
        add(ViolationKind::TreeViolation, email, "account without a service account node");
      }
      auto expected = derive_mirror_name(a.source_principal, a.project);
      if (!expected || *expected != email) {
        add(ViolationKind::MirrorNameViolation, email,
            "not the mirror name of " + a.source_principal);
      }
      if (a.active()) active_by_source[a.source_principal].push_back(email);
    }
    for (const auto& [source, emails] : active_by_source) {
      if (emails.size() > 1) {
        add(ViolationKind::BijectionViolation, source,
            std::to_string(emails.size()) + " active mirrors");
      }
    }
    for (const auto& [project, max] : cloud.quotas()) {
      auto q = cloud.quota(project);
      if (q && q->current_count > max) {
        add(ViolationKind::QuotaViolation, project,
            std::to_string(q->current_count) + " > " + std::to_string(max));
      }
    }
  }

  void lockdown() {
    const auto& cloud = w_.cloud();
    const std::string iam_store{kIamStoreFolder};
    for (const auto& [id, n] : cloud.nodes()) {
      if (n.kind != NodeKind::Project && n.kind != NodeKind::Folder) continue;
      if (id != iam_store && !cloud.is_under(id, iam_store)) continue;
      for (const auto& b : n.bindings) {
        if (b.principal.kind == CloudPrincipal::Kind::ServiceAccount &&
            cloud.account(b.principal.id) != nullptr) {
          add(ViolationKind::LockdownViolation, id, b.principal.to_string());
        }
      }
    }
  }

  void actas() {
    const auto& cloud = w_.cloud();
    for (const auto& [id, n] : cloud.nodes()) {
      for (const auto& b : n.bindings) {
        if (b.role != Role::ActAs || n.kind != NodeKind::ServiceAccount) continue;
        const auto* account = cloud.account(id);
        const auto subject = id + " <- " + b.principal.to_string();
        if (account == nullptr || b.principal.kind != CloudPrincipal::Kind::User) {
          add(ViolationKind::ActAsViolation, subject,
              "ActAs must name a workspace user on a mirror");
          continue;
        }
        std::vector<std::string> reasons;
        if (b.principal.id != account->source_principal) {
          reasons.emplace_back("grantee does not own the mirror");
        }
        if (!account->active()) reasons.emplace_back("mirror is disabled");
        const auto* source = w_.directory().find(account->source_principal);
        if (source != nullptr &&
            (source->kind != PrincipalKind::Human || !source->has_workspace_identity)) {
          reasons.emplace_back("mirror belongs to a headless principal");
        }
        if (reasons.empty()) continue;
        std::string detail;
        for (const auto& r : reasons) detail += (detail.empty() ? "" : "; ") + r;
        add(ViolationKind::ActAsViolation, subject, detail);
      }
    }
  }

  void vault() {
    for (const auto& [email, e] : w_.vault().entries()) {
      std::size_t active = 0;
      for (const auto& v : e.versions) {
        if (v.state == KeyState::Active) ++active;
        if (v.account_email != email) {
          add(ViolationKind::OwnershipViolation, v.key_id, "version filed under another entry");
        }
        if (v.state == KeyState::Retiring && !v.retiring_since) {
          add(ViolationKind::LifecycleViolation, v.key_id, "Retiring without retiring_since");
        }
      }
      if (active > 1) {
        add(ViolationKind::SingleActiveViolation, email, std::to_string(active) + " active keys");
      }
      if (const auto* a = w_.cloud().account(email)) {
        if (a->source_principal != e.owner_principal) {
          add(ViolationKind::OwnershipViolation, email,
              "owned by " + e.owner_principal + ", mirror of " + a->source_principal);
        }
        if (!a->active() && active > 0) {
          add(ViolationKind::LifecycleViolation, email, "disabled mirror with an active key");
        }
      }
    }
  }

  void reader_groups() {
    const auto& cloud = w_.cloud();
    for (const auto& [id, n] : cloud.nodes()) {
      if (n.kind != NodeKind::Bucket) continue;
      for (const auto& b : n.bindings) {
        if (b.principal.kind == CloudPrincipal::Kind::Group && b.role != Role::BucketReader) {
          add(ViolationKind::ReaderGroupViolation, id,
              b.principal.to_string() + " holds " + std::string(to_string(b.role)));
        }
      }
    }
  }

  void audit() {
    std::uint64_t expected = 1;
    for (const auto& e : w_.audit().events()) {
      if (e.seq != expected) {
        add(ViolationKind::AuditGapViolation, std::to_string(e.seq),
            "expected seq " + std::to_string(expected));
        expected = e.seq;
      }
      ++expected;
    }
  }

  void converged() {
    const auto& cloud = w_.cloud();
    const auto* group = w_.directory().group(kSourceGroup);
    std::set<std::string> legal;
    if (group != nullptr) {
      for (const auto& m : group->members) {
        if (w_.directory().find(m) != nullptr && m.find('_') == std::string::npos) legal.insert(m);
      }
    }
    for (const auto& m : legal) {
      const auto* mirror = cloud.active_mirror_of(m);
      if (mirror == nullptr) {
        add(ViolationKind::ConvergenceViolation, m, "legal member without an active mirror");
        continue;
      }
      const auto* p = w_.directory().find(m);
      if (mirror->created_at < p->created_at) {
        add(ViolationKind::ConvergenceViolation, m, "active mirror predates its principal");
      }
      const bool wants_actas = p->kind == PrincipalKind::Human && p->has_workspace_identity;
      const bool has_actas =
          cloud.node(mirror->email)->has_binding(Role::ActAs, CloudPrincipal::user(m));
      if (wants_actas && !has_actas) {
        add(ViolationKind::ConvergenceViolation, m, "human member without ActAs on its mirror");
      }
      const auto* entry = w_.vault().entry(mirror->email);
      const auto* key = entry ? entry->active() : nullptr;
      if (key == nullptr) {
        add(ViolationKind::ConvergenceViolation, m, "mirror without an active key");
      } else if (!(w_.now() - key->created_at < w_.config().rotation_age)) {
        add(ViolationKind::RotationViolation, key->key_id, "active key older than rotation_age");
      }
    }
    for (const auto& [email, a] : cloud.accounts()) {
      if (a.active() && !legal.contains(a.source_principal)) {
        add(ViolationKind::ConvergenceViolation, email, "active mirror without a legal member");
      }
    }
    for (const auto& pair : reader_pairs(cloud)) {
      std::set<std::string> desired;
      if (const auto* ldap = w_.directory().group(pair.ldap_group)) {
        for (const auto& m : ldap->members) {
          if (const auto* mirror = cloud.active_mirror_of(m)) desired.insert(mirror->email);
        }
      }
      std::set<std::string> actual;
      if (const auto* g = cloud.node(pair.cloud_group)) {
        for (const auto& b : g->bindings) {
          if (b.role == Role::GroupMember) actual.insert(b.principal.id);
        }
      }
      if (desired != actual) {
        add(ViolationKind::ReaderGroupViolation, pair.cloud_group,
            "cloud group differs from its LDAP group");
      }
    }
  }

 private:
  const World& w_;
  std::vector<Violation>& out_;
};

}  // namespace

std::vector<Violation> verify(const World& world, VerifyMode mode) {
  std::vector<Violation> out;
  Checker check(world, out);
  check.directory();
  check.tree();
  check.accounts();
  check.lockdown();
  check.actas();
  check.vault();
  check.reader_groups();
  check.audit();
  if (mode == VerifyMode::Converged) check.converged();
  return out;
}

}  // namespace mirrorplane
