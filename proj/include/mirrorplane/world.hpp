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

// The whole simulated control plane as one value: directory, cloud, vault,
// issued tokens, audit log, logical clock and reconciler configuration.
// Snapshots are canonical JSON (sorted keys, integer timestamps) so that
// export -> import -> export is byte-identical.

#include <cstdint>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorplane/audit.hpp"
#include "mirrorplane/authz.hpp"
#include "mirrorplane/cloud.hpp"
#include "mirrorplane/directory.hpp"
#include "mirrorplane/onboarder.hpp"
#include "mirrorplane/reconciler.hpp"
#include "mirrorplane/time.hpp"
#include "mirrorplane/vault.hpp"

namespace mirrorplane {

inline constexpr std::string_view kSnapshotFormat = "mirrorplane-world/1";
inline constexpr std::string_view kDataInfraFolder = "DATAINFRA";
inline constexpr std::string_view kDataInfraProject = "shared-data-infra-project";
inline constexpr std::string_view kDataStoreFolder = "DATASTORE";

class World {
 public:
  /// Fresh world with the base topology: IAMSTORE, DATAINFRA with the shared
  /// data-processing project, DATASTORE with the shared storage project.
  static Result<World> create(std::uint64_t seed, ReconcileConfig config = {});

  World(World&&) noexcept = default;
  World& operator=(World&&) noexcept = default;

  const Directory& directory() const { return directory_; }
  Directory& directory() { return directory_; }
  const Cloud& cloud() const { return cloud_; }
  Cloud& cloud() { return cloud_; }
  const Vault& vault() const { return vault_; }
  Vault& vault() { return vault_; }
  const AuditLog& audit() const { return audit_; }
  const AuthzState& authz() const { return authz_; }
  AuthzState& authz() { return authz_; }
  const ReconcileConfig& config() const { return config_; }
  Status set_config(ReconcileConfig config);
  LogicalTime now() const { return clock_.now(); }
  std::uint64_t seed() const { return seed_; }
  const std::optional<ReconcileReport>& last_report() const { return last_report_; }
  std::uint64_t next_tick_id() const { return next_tick_id_; }

  /// Replaces the key generator (tests). The default derives from the seed.
  void set_secret_source(std::unique_ptr<SecretSource> source) { secrets_ = std::move(source); }

  AuditScope scope() { return AuditScope(audit_, clock_.now()); }
  AccessView access_view() const { return AccessView{cloud_, vault_}; }
  ControlPlaneRefs refs() { return ControlPlaneRefs{directory_, cloud_, vault_, *secrets_}; }

  // Control-plane mutations. Each takes the writer lock.
  Status advance_clock(Duration d);
  ReconcileReport reconcile_once();
  /// Runs `n` ticks, advancing the clock by tick_interval between them.
  std::vector<ReconcileReport> reconcile_ticks(std::size_t n);
  Result<Decommissioned> decommission(std::string_view principal);
  Result<BucketMapping> provision_bucket(std::string_view principal);
  SyncReport sync_reader_groups();

  // Data-plane operations. Safe to call concurrently with each other.
  Result<Token> authenticate(std::string_view caller, std::string_view account_email);
  Result<Token> impersonate(std::string_view workspace_identity, std::string_view account_email);
  Result<AccessDecision> authorize(const Token& token, std::string_view bucket, Action action);
  Result<AccessDecision> authorize(std::string_view token_id, std::string_view bucket,
                                   Action action);
  Result<JobResult> submit_job(const JobRequest& request);

  nlohmann::json to_json(bool reveal_secrets = true) const;
  /// Canonical text: two-space indented JSON with sorted keys and a final newline.
  std::string export_canonical(bool reveal_secrets = true) const;
  static Result<World> from_json(const nlohmann::json& j);
  static Result<World> import_canonical(std::string_view text);

 private:
  World();

  Directory directory_;
  Cloud cloud_;
  Vault vault_;
  AuditLog audit_;
  AuthzState authz_;
  LogicalClock clock_;
  ReconcileConfig config_;
  std::uint64_t seed_ = 0;
  std::uint64_t next_tick_id_ = 1;
  std::optional<ReconcileReport> last_report_;
  std::unique_ptr<SecretSource> secrets_;
  std::unique_ptr<std::shared_mutex> latch_;
};

enum class ViolationKind {
  DanglingMember,
  WorkspaceIdentityMismatch,
  TreeViolation,
  QuotaViolation,
  BijectionViolation,
  MirrorNameViolation,
  LockdownViolation,
  IllegalBinding,
  ActAsViolation,
  SingleActiveViolation,
  LifecycleViolation,
  OwnershipViolation,
  ReaderGroupViolation,
  AuditGapViolation,
  // Only checked in converged mode.
  ConvergenceViolation,
  RotationViolation,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string subject;
  std::string detail;
};

nlohmann::json to_json(const Violation& v);

enum class VerifyMode {
  /// Safety invariants that hold in every reachable state.
  Safety,
  /// Safety plus the fixed-point properties expected right after a
  /// reconcile tick and a reader sync with no directory edits in between.
  Converged,
};

std::vector<Violation> verify(const World& world, VerifyMode mode = VerifyMode::Safety);

}  // namespace mirrorplane
