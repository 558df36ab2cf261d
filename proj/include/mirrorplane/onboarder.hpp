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

// Partly-cloudy storage onboarding: HDFS home -> per-user bucket, and the
// on-premise reader group <-> cloud reader group pairing that grants
// read-only access to a bucket.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorplane/audit.hpp"
#include "mirrorplane/cloud.hpp"
#include "mirrorplane/directory.hpp"
#include "mirrorplane/result.hpp"

namespace mirrorplane {

inline constexpr std::string_view kSharedStorageProject = "shared-gcs-storage-project";

struct BucketMapping {
  std::string principal;
  std::string hdfs_home;
  std::string bucket_id;
};

struct ReaderGroupPair {
  std::string bucket_id;
  std::string ldap_group;
  std::string cloud_group;
};

/// "/<dc>/<cluster>/user/<name>/<rest...>" -> "gs://user.<name>.dp.domain/<rest...>"
Result<std::string> map_hdfs_path(std::string_view path);

/// "user.<name>.dp.domain"
std::string bucket_id_for(std::string_view principal);
/// Inverse of bucket_id_for; nullopt for ids that are not user buckets.
std::optional<std::string> principal_of_bucket(std::string_view bucket_id);
/// "reader-<bucket_id>"; used for both the LDAP and the cloud group.
std::string reader_group_for(std::string_view bucket_id);

/// Creates the bucket under the shared storage project, makes the owner's
/// mirror account its BucketOwner, and creates the empty reader group pair.
/// Idempotent.
Result<BucketMapping> provision_bucket(std::string_view principal, Directory& directory,
                                       Cloud& cloud, const AuditScope& audit);

/// Every provisioned user bucket with its reader group pair.
std::vector<ReaderGroupPair> reader_pairs(const Cloud& cloud);

struct PairSync {
  std::string bucket_id;
  std::vector<std::string> added;    // mirror emails
  std::vector<std::string> removed;  // mirror emails
  std::vector<std::string> skipped;  // LDAP members without an Active mirror
};

struct SyncReport {
  std::vector<PairSync> pairs;
  bool changed() const;
};

/// Full set reconciliation: each cloud reader group ends up holding exactly
/// the Active mirrors of its LDAP group's members.
SyncReport sync_reader_groups(const Directory& directory, Cloud& cloud, const AuditScope& audit);

/// `readers join|leave <bucket> <principal>`: edits the LDAP side only; the
/// cloud side follows on the next sync.
Result<DirectoryGroup> readers_join(std::string_view bucket, std::string_view principal,
                                    Directory& directory, const Cloud& cloud,
                                    const AuditScope& audit);
Result<DirectoryGroup> readers_leave(std::string_view bucket, std::string_view principal,
                                     Directory& directory, const Cloud& cloud,
                                     const AuditScope& audit);

}  // namespace mirrorplane
