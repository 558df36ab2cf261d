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

// The account-creator control loop. Each tick diffs the source-of-truth
// group against cloud state and converges: mirrors are created, keyed,
// granted to their human owners, rotated when stale, and decommissioned
// when their source leaves.

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorplane/audit.hpp"
#include "mirrorplane/cloud.hpp"
#include "mirrorplane/directory.hpp"
#include "mirrorplane/result.hpp"
#include "mirrorplane/time.hpp"
#include "mirrorplane/vault.hpp"

namespace mirrorplane {

inline constexpr std::string_view kIamStoreFolder = "IAMSTORE";
inline constexpr std::string_view kDefaultBaseProject = "service-accounts-project";
inline constexpr std::string_view kReconcilerActor = "account-creator";

enum class ShardingMode { SingleProject, PerOrgUnit };

std::string_view to_string(ShardingMode mode);
Result<ShardingMode> parse_sharding_mode(std::string_view text);

struct ReconcileConfig {
  Duration tick_interval = Duration::of_minutes(15);
  Duration rotation_age = Duration::of_days(7);
  Duration retiring_grace = Duration::of_days(2);
  ShardingMode sharding_mode = ShardingMode::SingleProject;
  std::string base_project{kDefaultBaseProject};
  std::int64_t quota_default = kDefaultServiceAccountQuota;

  Status validate() const;

  nlohmann::json to_json() const;
  /// Accepts durations as integers (minutes) or strings like "7d". Keys not
  /// present keep their current value.
  Status merge_json(const nlohmann::json& j, const std::string& pointer);
  Status set(std::string_view key, std::string_view value);
};

struct CreatedMirror {
  std::string principal;
  std::string email;
  std::string project;
  std::string key_id;
  bool replaced_disabled = false;  // an old disabled mirror was deleted first
};

struct RotatedKey {
  std::string email;
  std::string new_key_id;
  std::optional<std::string> retired_key_id;
};

struct ActAsGrant {
  std::string workspace_identity;
  std::string email;
};

struct Decommissioned {
  std::string principal;
  std::string email;
  std::size_t keys_invalidated = 0;
  std::size_t actas_removed = 0;
};

struct Rejection {
  std::string principal;
  Errc reason;
};

struct AccountError {
  std::string principal;
  Error error;
};

struct ReconcileReport {
  std::uint64_t tick_id = 0;
  LogicalTime at;
  std::optional<Error> aborted;
  std::vector<CreatedMirror> created;
  std::vector<RotatedKey> rotated;
  std::vector<ActAsGrant> actas_granted;
  std::vector<Decommissioned> decommissioned;
  std::vector<Rejection> rejected;
  std::vector<AccountError> errors;
  std::vector<KeyTransition> expired;

  /// True when the tick mutated anything. Rejections and errors are not
  /// changes: they repeat every tick until the directory is fixed.
  bool changed() const;

  nlohmann::json to_json() const;
  static Result<ReconcileReport> from_json(const nlohmann::json& j, const std::string& pointer);
};

/// "<principal>-mirror@<project>.iam.gserviceaccount.com". Principals with an
/// underscore are refused: substituting '-' could collide with another
/// principal's mirror.
Result<std::string> derive_mirror_name(std::string_view principal, std::string_view project);

struct Placement {
  std::string project;
  std::string folder;
};

/// SingleProject: the configured base project under IAMSTORE.
/// PerOrgUnit: "<ou>-service-accounts-project" under folder "<OU>IAM" inside
/// IAMSTORE, overflowing to "<project>-2", "<project>-3", ... once a project
/// is at quota. Projects that do not exist yet are reported as-is; the
/// reconciler creates them on demand.
Placement select_project(const PrincipalRecord& principal, const ReconcileConfig& config,
                         const Cloud& cloud);

/// Mutable view of the state a tick converges.
struct ControlPlaneRefs {
  const Directory& directory;
  Cloud& cloud;
  Vault& vault;
  SecretSource& secrets;
};

class Reconciler {
 public:
  explicit Reconciler(ReconcileConfig config) : config_(std::move(config)) {}

  const ReconcileConfig& config() const { return config_; }

  /// One pass of the control loop at `audit.now()`. Only a failed source
  /// group aborts the tick; per-account failures land in report.errors.
  ReconcileReport tick(ControlPlaneRefs refs, std::uint64_t tick_id, const AuditScope& audit) const;

  /// Disables the principal's Active mirror, invalidates its keys and drops
  /// its ActAs bindings.
  Result<Decommissioned> decommission(std::string_view principal, ControlPlaneRefs refs,
                                      const AuditScope& audit) const;

 private:
  Status ensure_placement(const Placement& placement, Cloud& cloud, const AuditScope& audit) const;
  void converge_member(const PrincipalRecord& principal, ControlPlaneRefs refs,
                       ReconcileReport& report, const AuditScope& audit) const;

  ReconcileConfig config_;
};

}  // namespace mirrorplane
