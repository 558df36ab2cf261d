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

// On-premise secret store for mirror-account key files.
//
// Custody rules:
//   - only the owning principal may read an entry's key;
//   - nobody may modify a stored key, the owner included;
//   - each entry has at most one Active version; older versions move
//     Active -> Retiring -> Invalid and never back.

#include <cstdint>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorplane/audit.hpp"
#include "mirrorplane/result.hpp"
#include "mirrorplane/time.hpp"

namespace mirrorplane {

class Directory;

enum class KeyState { Active, Retiring, Invalid };

std::string_view to_string(KeyState state);

struct KeyVersion {
  std::string key_id;
  std::string account_email;
  std::string secret;  // hex, 128 bits
  KeyState state = KeyState::Active;
  LogicalTime created_at;
  std::optional<LogicalTime> retiring_since;

  bool usable() const { return state != KeyState::Invalid; }
  friend bool operator==(const KeyVersion&, const KeyVersion&) = default;
};

struct VaultEntry {
  std::string account_email;
  std::string owner_principal;
  std::vector<KeyVersion> versions;  // newest first

  const KeyVersion* active() const;
  friend bool operator==(const VaultEntry&, const VaultEntry&) = default;
};

struct KeyTransition {
  std::string key_id;
  std::string account_email;
  KeyState from = KeyState::Active;
  KeyState to = KeyState::Invalid;
};

/// Source of key material. Implementations must be deterministic in
/// `sequence` so that a seeded world replays identically.
class SecretSource {
 public:
  virtual ~SecretSource() = default;
  virtual std::string generate(std::uint64_t sequence) = 0;
};

/// 128-bit hex secrets from a 64-bit seed and the key sequence number.
class SeededSecretSource final : public SecretSource {
 public:
  explicit SeededSecretSource(std::uint64_t seed) : seed_(seed) {}
  std::string generate(std::uint64_t sequence) override;

 private:
  std::uint64_t seed_;
};

class Vault {
 public:
  /// Control-plane write path. Prepends a new Active version; a previous
  /// Active version becomes Retiring at `audit.now()`.
  Result<KeyVersion> store_key(std::string_view account_email, std::string_view owner,
                               std::string secret, const Directory& directory,
                               const AuditScope& audit);

  /// Owner-gated read of the newest Active version. Every attempt is audited.
  Result<KeyVersion> read_key(std::string_view account_email, std::string_view caller,
                              const AuditScope& audit) const;

  /// Key files are immutable to every principal. Always PermissionDenied.
  Status modify_key(std::string_view account_email, std::string_view caller,
                    const AuditScope& audit) const;

  /// Retiring versions whose grace has elapsed (now - retiring_since >= grace)
  /// become Invalid.
  std::vector<KeyTransition> expire_versions(LogicalTime now, Duration grace,
                                             const AuditScope& audit);

  /// Invalidates every non-Invalid version. Returns how many changed.
  Result<std::size_t> revoke_all(std::string_view account_email, const AuditScope& audit);

  /// Allocates the sequence number for the next generated key.
  std::uint64_t next_key_sequence() const { return next_key_seq_; }

  const VaultEntry* entry(std::string_view account_email) const;
  const KeyVersion* key(std::string_view key_id) const;
  const std::map<std::string, VaultEntry, std::less<>>& entries() const { return entries_; }

  nlohmann::json to_json(bool reveal_secrets) const;
  static Result<Vault> from_json(const nlohmann::json& j, const std::string& pointer);

 private:
  std::map<std::string, VaultEntry, std::less<>> entries_;
  std::uint64_t next_key_seq_ = 1;
};

}  // namespace mirrorplane
