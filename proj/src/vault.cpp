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

#include "mirrorplane/vault.hpp"

#include <cstdio>
#include <random>

#include "json_util.hpp"
#include "mirrorplane/directory.hpp"

namespace mirrorplane {

using detail::child;
using nlohmann::json;

namespace {

constexpr std::string_view kRedacted = "<redacted>";

Result<KeyState> parse_key_state(std::string_view text) {
  if (text == "Active") return KeyState::Active;
  if (text == "Retiring") return KeyState::Retiring;
  if (text == "Invalid") return KeyState::Invalid;
  return make_error(Errc::InvalidArgument, std::string(text));
}

std::string transition_detail(KeyState from, KeyState to) {
  return std::string(to_string(from)) + "->" + std::string(to_string(to));
}

}  // namespace

std::string_view to_string(KeyState state) {
  switch (state) {
    case KeyState::Active: return "Active";
    case KeyState::Retiring: return "Retiring";
    case KeyState::Invalid: return "Invalid";
  }
  return "Invalid";
}

const KeyVersion* VaultEntry::active() const {
  for (const auto& v : versions) {
    if (v.state == KeyState::Active) return &v;
  }
  return nullptr;
}

std::string SeededSecretSource::generate(std::uint64_t sequence) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(sequence),
                    static_cast<std::uint32_t>(sequence >> 32)};
  std::mt19937_64 engine(seq);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(engine()),
                static_cast<unsigned long long>(engine()));
  return buf;
}

Result<KeyVersion> Vault::store_key(std::string_view account_email, std::string_view owner,
                                    std::string secret, const Directory& directory,
                                    const AuditScope& audit) {
  if (directory.find(owner) == nullptr) return make_error(Errc::UnknownOwner, std::string(owner));
  auto it = entries_.find(account_email);
  if (it != entries_.end() && it->second.owner_principal != owner) {
    return make_error(Errc::OwnerMismatch,
                      std::string(account_email) + " is owned by " + it->second.owner_principal);
  }
  if (it == entries_.end()) {
    it = entries_
             .emplace(std::string(account_email),
                      VaultEntry{std::string(account_email), std::string(owner), {}})
             .first;
  }
  auto& entry = it->second;
  std::string detail;
  for (auto& v : entry.versions) {
    if (v.state == KeyState::Active) {
      v.state = KeyState::Retiring;
      v.retiring_since = audit.now();
      detail = " retired=" + v.key_id;
    }
  }
  KeyVersion version;
  version.key_id = "key-" + std::to_string(next_key_seq_++);
  version.account_email = entry.account_email;
  version.secret = std::move(secret);
  version.state = KeyState::Active;
  version.created_at = audit.now();
  entry.versions.insert(entry.versions.begin(), version);
  audit.emit(kControlPlaneActor, "vault.store_key", entry.account_email, Outcome::Success,
             version.key_id + " owner=" + entry.owner_principal + detail);
  return version;
}

Result<KeyVersion> Vault::read_key(std::string_view account_email, std::string_view caller,
                                   const AuditScope& audit) const {
  auto fail = [&](Errc code, std::string why) -> Error {
    audit.emit(caller, "vault.read_key", account_email, Outcome::Failure,
               std::string(to_string(code)));
    return make_error(code, std::move(why));
  };
  const auto* e = entry(account_email);
  if (e == nullptr) return fail(Errc::NoActiveKey, "no entry for " + std::string(account_email));
  if (e->owner_principal != caller) {
    return fail(Errc::PermissionDenied,
                std::string(caller) + " does not own " + std::string(account_email));
  }
  const auto* active = e->active();
  if (active == nullptr) return fail(Errc::NoActiveKey, std::string(account_email));
  audit.emit(caller, "vault.read_key", account_email, Outcome::Success, active->key_id);
  return *active;
}

Status Vault::modify_key(std::string_view account_email, std::string_view caller,
                         const AuditScope& audit) const {
  audit.emit(caller, "vault.modify_key", account_email, Outcome::Failure, "PermissionDenied");
  return make_error(Errc::PermissionDenied, "key files are immutable");
}

std::vector<KeyTransition> Vault::expire_versions(LogicalTime now, Duration grace,
                                                  const AuditScope& audit) {
  std::vector<KeyTransition> out;
  for (auto& [email, entry] : entries_) {
    for (auto& v : entry.versions) {
      if (v.state != KeyState::Retiring || !v.retiring_since) continue;
      if (now - *v.retiring_since >= grace) {
        v.state = KeyState::Invalid;
        out.push_back(KeyTransition{v.key_id, email, KeyState::Retiring, KeyState::Invalid});
        audit.emit(kControlPlaneActor, "vault.expire_key", v.key_id, Outcome::Success,
                   transition_detail(KeyState::Retiring, KeyState::Invalid));
      }
    }
  }
  return out;
}

Result<std::size_t> Vault::revoke_all(std::string_view account_email, const AuditScope& audit) {
  auto it = entries_.find(account_email);
  if (it == entries_.end()) return make_error(Errc::UnknownEntry, std::string(account_email));
  std::size_t count = 0;
  for (auto& v : it->second.versions) {
    if (v.state == KeyState::Invalid) continue;
    auto from = v.state;
    v.state = KeyState::Invalid;
    ++count;
    audit.emit(kControlPlaneActor, "vault.revoke_key", v.key_id, Outcome::Success,
               transition_detail(from, KeyState::Invalid));
  }
  return count;
}

const VaultEntry* Vault::entry(std::string_view account_email) const {
  auto it = entries_.find(account_email);
  return it == entries_.end() ? nullptr : &it->second;
}

const KeyVersion* Vault::key(std::string_view key_id) const {
  for (const auto& [email, e] : entries_) {
    for (const auto& v : e.versions) {
      if (v.key_id == key_id) return &v;
    }
  }
  return nullptr;
}

json Vault::to_json(bool reveal_secrets) const {
  json entries = json::object();
  for (const auto& [email, e] : entries_) {
    json versions = json::array();
    for (const auto& v : e.versions) {
      versions.push_back(json{
          {"key_id", v.key_id},
          {"secret", reveal_secrets ? v.secret : std::string(kRedacted)},
          {"state", to_string(v.state)},
          {"created_at", v.created_at.minutes},
          {"retiring_since", v.retiring_since ? json(v.retiring_since->minutes) : json(nullptr)}});
    }
    entries[email] = json{{"owner", e.owner_principal}, {"versions", versions}};
  }
  return json{{"entries", entries}, {"next_key_seq", next_key_seq_}};
}

Result<Vault> Vault::from_json(const json& j, const std::string& pointer) {
  Vault vault;
  MP_TRY_ASSIGN(next, detail::get_int(j, "next_key_seq", pointer));
  if (next < 1) return detail::schema_error(child(pointer, "next_key_seq"), "must be >= 1");
  vault.next_key_seq_ = static_cast<std::uint64_t>(next);
  MP_TRY_ASSIGN(entries, detail::get_object(j, "entries", pointer));
  const auto ep = child(pointer, "entries");
  for (const auto& [email, value] : entries->items()) {
    const auto ptr = child(ep, email);
    MP_TRY_ASSIGN(owner, detail::get_string(value, "owner", ptr));
    MP_TRY_ASSIGN(versions, detail::get_array(value, "versions", ptr));
    VaultEntry e{email, owner, {}};
    for (std::size_t i = 0; i < versions->size(); ++i) {
      const auto vp = child(child(ptr, "versions"), i);
      const auto& vj = (*versions)[i];
      MP_TRY_ASSIGN(key_id, detail::get_string(vj, "key_id", vp));
      MP_TRY_ASSIGN(secret, detail::get_string(vj, "secret", vp));
      MP_TRY_ASSIGN(state_text, detail::get_string(vj, "state", vp));
      MP_TRY_ASSIGN(created, detail::get_int(vj, "created_at", vp));
      MP_TRY_ASSIGN(retiring, detail::get_optional_int(vj, "retiring_since", vp));
      auto state = parse_key_state(state_text);
      if (!state) return detail::schema_error(child(vp, "state"), "unknown state");
      KeyVersion v{key_id, email, secret, *state, LogicalTime{created}, std::nullopt};
      if (retiring) v.retiring_since = LogicalTime{*retiring};
      e.versions.push_back(std::move(v));
    }
    vault.entries_.emplace(email, std::move(e));
  }
  return vault;
}

}  // namespace mirrorplane
