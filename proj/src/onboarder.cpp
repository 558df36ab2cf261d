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

#include "mirrorplane/onboarder.hpp"

#include <algorithm>
#include <set>

#include "mirrorplane/identifiers.hpp"

namespace mirrorplane {
namespace {

constexpr std::string_view kBucketPrefix = "user.";
constexpr std::string_view kBucketSuffix = ".dp.domain";

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string_view::npos) slash = path.size();
    parts.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return parts;
}

Result<const ResourceNode*> user_bucket(std::string_view bucket, const Cloud& cloud) {
  auto id = strip_bucket_scheme(bucket);
  const auto* node = cloud.node(id);
  if (node == nullptr || node->kind != NodeKind::Bucket || !principal_of_bucket(id)) {
    return make_error(Errc::UnknownBucket, std::string(bucket));
  }
  return node;
}

}  // namespace

Result<std::string> map_hdfs_path(std::string_view path) {
  // Leading '/' yields an empty first segment: ["", dc, cluster, "user", name, rest...]
  auto parts = split_path(path);
  if (parts.size() < 5 || !parts[0].empty() || parts[1].empty() || parts[2].empty() ||
      parts[3] != "user" || !is_valid_principal_name(parts[4])) {
    return make_error(Errc::UnmappablePath, std::string(path));
  }
  std::string rest;
  for (std::size_t i = 5; i < parts.size(); ++i) {
    if (i > 5) rest += '/';
    rest += parts[i];
  }
  return std::string(kBucketScheme) + bucket_id_for(parts[4]) + "/" + rest;
}

std::string bucket_id_for(std::string_view principal) {
  return std::string(kBucketPrefix) + std::string(principal) + std::string(kBucketSuffix);
}

std::optional<std::string> principal_of_bucket(std::string_view bucket_id) {
  if (!bucket_id.starts_with(kBucketPrefix) || !bucket_id.ends_with(kBucketSuffix)) {
    return std::nullopt;
  }
  auto name = bucket_id.substr(kBucketPrefix.size(),
                               bucket_id.size() - kBucketPrefix.size() - kBucketSuffix.size());
  if (!is_valid_principal_name(name)) return std::nullopt;
  return std::string(name);
}

std::string reader_group_for(std::string_view bucket_id) {
  return "reader-" + std::string(bucket_id);
}

Result<BucketMapping> provision_bucket(std::string_view principal, Directory& directory,
                                       Cloud& cloud, const AuditScope& audit) {
  const auto* mirror = cloud.active_mirror_of(principal);
  if (mirror == nullptr) return make_error(Errc::NoMirror, std::string(principal));
  const auto* record = directory.find(principal);
  if (record == nullptr) return make_error(Errc::NoMirror, std::string(principal));
  if (!record->hdfs_home) return make_error(Errc::NoHdfsHome, std::string(principal));

  BucketMapping mapping{std::string(principal), *record->hdfs_home, bucket_id_for(principal)};
  const std::string group = reader_group_for(mapping.bucket_id);
  const std::string mirror_email = mirror->email;

  if (cloud.node(kSharedStorageProject) == nullptr) {
    return make_error(Errc::UnknownNode, std::string(kSharedStorageProject));
  }
  if (cloud.node(mapping.bucket_id) == nullptr) {
    auto created =
        cloud.create_node(NodeKind::Bucket, mapping.bucket_id, kSharedStorageProject, audit);
    if (!created) return created.error();
  }
  auto owner = cloud.bind_role(mapping.bucket_id, Role::BucketOwner,
                               CloudPrincipal::service_account(mirror_email), audit);
  if (!owner) return owner.error();
  if (cloud.node(group) == nullptr) {
    auto created = cloud.create_node(NodeKind::CloudGroup, group, cloud.organization(), audit);
    if (!created) return created.error();
  }
  auto reader =
      cloud.bind_role(mapping.bucket_id, Role::BucketReader, CloudPrincipal::group(group), audit);
  if (!reader) return reader.error();
  if (!directory.has_group(group)) {
    auto created = directory.add_group(group, audit);
    if (!created) return created.error();
  }
  return mapping;
}

std::vector<ReaderGroupPair> reader_pairs(const Cloud& cloud) {
  std::vector<ReaderGroupPair> out;
  for (const auto& [id, node] : cloud.nodes()) {
    if (node.kind != NodeKind::Bucket || !principal_of_bucket(id)) continue;
    auto group = reader_group_for(id);
    out.push_back(ReaderGroupPair{id, group, group});
  }
  return out;
}

bool SyncReport::changed() const {
  return std::any_of(pairs.begin(), pairs.end(),
                     [](const PairSync& p) { return !p.added.empty() || !p.removed.empty(); });
}

SyncReport sync_reader_groups(const Directory& directory, Cloud& cloud, const AuditScope& audit) {
  SyncReport report;
  for (const auto& pair : reader_pairs(cloud)) {
    PairSync sync{pair.bucket_id, {}, {}, {}};
    const auto* ldap = directory.group(pair.ldap_group);
    const auto* cloud_group = cloud.node(pair.cloud_group);
    if (cloud_group == nullptr) continue;

    std::set<std::string> desired;
    if (ldap != nullptr) {
      for (const auto& member : ldap->members) {
        if (const auto* mirror = cloud.active_mirror_of(member)) {
          desired.insert(mirror->email);
        } else {
          sync.skipped.push_back(member);
        }
      }
    }
    std::set<std::string> current;
    for (const auto& b : cloud_group->bindings) {
      if (b.role == Role::GroupMember) current.insert(b.principal.id);
    }
    for (const auto& email : current) {
      if (desired.contains(email)) continue;
      auto removed = cloud.unbind_role(pair.cloud_group, Role::GroupMember,
                                       CloudPrincipal::service_account(email), audit);
      if (removed && *removed) sync.removed.push_back(email);
    }
    for (const auto& email : desired) {
      if (current.contains(email)) continue;
      auto added = cloud.bind_role(pair.cloud_group, Role::GroupMember,
                                   CloudPrincipal::service_account(email), audit);
      if (added && added->added) sync.added.push_back(email);
    }
    report.pairs.push_back(std::move(sync));
  }
  return report;
}

Result<DirectoryGroup> readers_join(std::string_view bucket, std::string_view principal,
                                    Directory& directory, const Cloud& cloud,
                                    const AuditScope& audit) {
  auto node = user_bucket(bucket, cloud);
  if (!node) return node.error();
  return directory.join_group(reader_group_for((*node)->id), principal, audit);
}

Result<DirectoryGroup> readers_leave(std::string_view bucket, std::string_view principal,
                                     Directory& directory, const Cloud& cloud,
                                     const AuditScope& audit) {
  auto node = user_bucket(bucket, cloud);
  if (!node) return node.error();
  return directory.leave_group(reader_group_for((*node)->id), principal, audit);
}

}  // namespace mirrorplane
