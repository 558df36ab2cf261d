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

// Simulated cloud provider: resource hierarchy, service accounts, IAM
// bindings and per-project service-account quotas.

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorplane/audit.hpp"
#include "mirrorplane/identifiers.hpp"
#include "mirrorplane/result.hpp"

namespace mirrorplane {

inline constexpr std::int64_t kDefaultServiceAccountQuota = 100;
inline constexpr std::string_view kServiceAccountDomain = ".iam.gserviceaccount.com";
inline constexpr std::string_view kBucketScheme = "gs://";

enum class NodeKind { Organization, Folder, Project, ServiceAccount, CloudGroup, Bucket };
enum class Role { ActAs, BucketReader, BucketWriter, BucketOwner, GroupMember };
enum class AccountStatus { Active, Disabled };

std::string_view to_string(NodeKind kind);
std::string_view to_string(Role role);
std::string_view to_string(AccountStatus status);
Result<NodeKind> parse_node_kind(std::string_view text);
Result<Role> parse_role(std::string_view text);

bool may_contain(NodeKind parent, NodeKind child);
bool role_applies_to(Role role, NodeKind kind);

struct RoleBinding {
  Role role = Role::ActAs;
  CloudPrincipal principal;

  friend bool operator==(const RoleBinding&, const RoleBinding&) = default;
};

struct ResourceNode {
  std::string id;
  NodeKind kind = NodeKind::Folder;
  std::optional<std::string> parent;
  std::vector<RoleBinding> bindings;

  bool has_binding(Role role, const CloudPrincipal& principal) const;
  friend bool operator==(const ResourceNode&, const ResourceNode&) = default;
};

struct MirrorAccount {
  std::string email;
  std::string source_principal;
  std::string project;
  AccountStatus status = AccountStatus::Active;
  LogicalTime created_at;

  bool active() const { return status == AccountStatus::Active; }
  friend bool operator==(const MirrorAccount&, const MirrorAccount&) = default;
};

struct ProjectQuota {
  std::string project;
  std::int64_t max_service_accounts = kDefaultServiceAccountQuota;
  std::int64_t current_count = 0;
};

struct BindOutcome {
  RoleBinding binding;
  bool added = false;  // false when the binding already existed
};

struct Lookup {
  const ResourceNode* node = nullptr;
  const MirrorAccount* account = nullptr;
};

/// "<account>@<project>.iam.gserviceaccount.com"
std::string service_account_email(std::string_view account_name, std::string_view project);

/// Strips the display scheme: "gs://user.helen.dp.domain" -> "user.helen.dp.domain".
std::string strip_bucket_scheme(std::string_view id);

class Cloud {
 public:
  explicit Cloud(std::string organization_id = "org");

  const std::string& organization() const { return organization_; }

  Result<ResourceNode> create_node(NodeKind kind, std::string_view id, std::string_view parent,
                                   const AuditScope& audit);

  /// Fails with QuotaExceeded once the project holds max_service_accounts
  /// accounts (disabled ones included, as with the real provider).
  Result<MirrorAccount> create_service_account(std::string_view project,
                                               std::string_view account_name,
                                               std::string_view source_principal,
                                               const AuditScope& audit);
  Result<MirrorAccount> disable_service_account(std::string_view email, const AuditScope& audit);

  /// Deletes a disabled account together with every binding that names it,
  /// freeing its email and quota slot. Returns the number of bindings dropped.
  Result<std::size_t> delete_service_account(std::string_view email, const AuditScope& audit);

  Result<BindOutcome> bind_role(std::string_view node, Role role, const CloudPrincipal& principal,
                                const AuditScope& audit);
  /// Returns whether a binding was removed; absent bindings are not an error.
  Result<bool> unbind_role(std::string_view node, Role role, const CloudPrincipal& principal,
                           const AuditScope& audit);

  Status set_quota(std::string_view project, std::int64_t max_service_accounts,
                   const AuditScope& audit);
  void set_default_quota(std::int64_t n) { default_quota_ = n; }
  std::int64_t default_quota() const { return default_quota_; }

  Result<Lookup> lookup(std::string_view id) const;
  const ResourceNode* node(std::string_view id) const;
  const MirrorAccount* account(std::string_view email) const;
  const MirrorAccount* active_mirror_of(std::string_view principal) const;
  std::vector<const MirrorAccount*> accounts_of(std::string_view principal) const;
  Result<ProjectQuota> quota(std::string_view project) const;
  std::vector<std::string> children(std::string_view id) const;

  const std::map<std::string, ResourceNode, std::less<>>& nodes() const { return nodes_; }
  const std::map<std::string, MirrorAccount, std::less<>>& accounts() const { return accounts_; }
  const std::map<std::string, std::int64_t, std::less<>>& quotas() const { return quotas_; }

  /// Walks parents from `id`; true when the walk reaches the organization.
  bool reaches_root(std::string_view id) const;
  bool is_under(std::string_view id, std::string_view ancestor) const;

  /// Indented tree rendering for `cloud tree`.
  std::string render_tree() const;

  nlohmann::json to_json() const;
  static Result<Cloud> from_json(const nlohmann::json& j, const std::string& pointer);

 private:
  std::int64_t service_account_count(std::string_view project) const;
  ResourceNode* mutable_node(std::string_view id);

  std::string organization_;
  std::int64_t default_quota_ = kDefaultServiceAccountQuota;
  std::map<std::string, ResourceNode, std::less<>> nodes_;
  std::map<std::string, MirrorAccount, std::less<>> accounts_;
  std::map<std::string, std::int64_t, std::less<>> quotas_;
};

}  // namespace mirrorplane
