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

// The on-premise identity world: principals, LDAP-style groups and HDFS
// homes. The reconciler reads it; nothing here touches cloud or vault.

#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorplane/audit.hpp"
#include "mirrorplane/result.hpp"
#include "mirrorplane/time.hpp"

namespace mirrorplane {

inline constexpr std::string_view kDefaultOrgUnit = "general";

enum class PrincipalKind { Human, Headless };

std::string_view to_string(PrincipalKind kind);
Result<PrincipalKind> parse_principal_kind(std::string_view text);

struct PrincipalRecord {
  std::string name;
  PrincipalKind kind = PrincipalKind::Human;
  // Only employees get a workspace account; headless users never do.
  bool has_workspace_identity = true;
  std::optional<std::string> hdfs_home;
  std::string org_unit{kDefaultOrgUnit};
  LogicalTime created_at;

  friend bool operator==(const PrincipalRecord&, const PrincipalRecord&) = default;
};

/// Membership is an insertion-ordered set.
struct DirectoryGroup {
  std::string name;
  std::vector<std::string> members;

  bool contains(std::string_view principal) const;
  friend bool operator==(const DirectoryGroup&, const DirectoryGroup&) = default;
};

struct RemovalRecord {
  PrincipalRecord principal;
  std::vector<std::string> groups_left;
};

class Directory {
 public:
  Result<PrincipalRecord> add_principal(std::string_view name, PrincipalKind kind,
                                        std::optional<std::string> hdfs_home,
                                        std::optional<std::string> org_unit,
                                        const AuditScope& audit);
  Result<DirectoryGroup> add_group(std::string_view name, const AuditScope& audit);

  /// Idempotent: joining twice leaves the member set unchanged and emits
  /// no second event.
  Result<DirectoryGroup> join_group(std::string_view group, std::string_view principal,
                                    const AuditScope& audit);
  Result<DirectoryGroup> leave_group(std::string_view group, std::string_view principal,
                                     const AuditScope& audit);
  Result<RemovalRecord> remove_principal(std::string_view name, const AuditScope& audit);

  /// Precondition of every reconcile tick.
  Result<std::vector<std::string>> verify_source_group() const;

  const PrincipalRecord* find(std::string_view name) const;
  const DirectoryGroup* group(std::string_view name) const;
  bool has_group(std::string_view name) const { return group(name) != nullptr; }

  const std::map<std::string, PrincipalRecord, std::less<>>& principals() const {
    return principals_;
  }
  const std::map<std::string, DirectoryGroup, std::less<>>& groups() const { return groups_; }

  /// Members that reference missing principals. Empty for any state built
  /// through the public operations.
  std::vector<std::string> dangling_members() const;

  nlohmann::json to_json() const;
  static Result<Directory> from_json(const nlohmann::json& j, const std::string& pointer);

 private:
  std::map<std::string, PrincipalRecord, std::less<>> principals_;
  std::map<std::string, DirectoryGroup, std::less<>> groups_;
};

}  // namespace mirrorplane
