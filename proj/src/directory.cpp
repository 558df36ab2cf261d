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

#include "mirrorplane/directory.hpp"

#include <algorithm>

#include "json_util.hpp"
#include "mirrorplane/identifiers.hpp"

namespace mirrorplane {

using detail::child;
using nlohmann::json;

std::string_view to_string(PrincipalKind kind) {
  return kind == PrincipalKind::Human ? "Human" : "Headless";
}

Result<PrincipalKind> parse_principal_kind(std::string_view text) {
  if (text == "Human" || text == "human") return PrincipalKind::Human;
  if (text == "Headless" || text == "headless") return PrincipalKind::Headless;
  return make_error(Errc::InvalidArgument, "unknown principal kind: " + std::string(text));
}

bool DirectoryGroup::contains(std::string_view principal) const {
  return std::find(members.begin(), members.end(), principal) != members.end();
}

Result<PrincipalRecord> Directory::add_principal(std::string_view name, PrincipalKind kind,
                                                 std::optional<std::string> hdfs_home,
                                                 std::optional<std::string> org_unit,
                                                 const AuditScope& audit) {
  if (!is_valid_principal_name(name)) {
    return make_error(Errc::InvalidName, "'" + std::string(name) + "'");
  }
  if (org_unit && !is_valid_principal_name(*org_unit)) {
    return make_error(Errc::InvalidName, "org unit '" + *org_unit + "'");
  }
  if (principals_.contains(name)) return make_error(Errc::DuplicateName, std::string(name));

  PrincipalRecord record;
  record.name = std::string(name);
  record.kind = kind;
  record.has_workspace_identity = kind == PrincipalKind::Human;
  record.hdfs_home = std::move(hdfs_home);
  record.org_unit = org_unit.value_or(std::string(kDefaultOrgUnit));
  record.created_at = audit.now();
  principals_.emplace(record.name, record);
  audit.emit(kControlPlaneActor, "directory.add_principal", record.name, Outcome::Success,
             std::string(to_string(kind)));
  return record;
}

Result<DirectoryGroup> Directory::add_group(std::string_view name, const AuditScope& audit) {
  if (!is_valid_resource_id(name)) return make_error(Errc::InvalidName, std::string(name));
  if (groups_.contains(name)) return make_error(Errc::DuplicateName, std::string(name));
  DirectoryGroup group{std::string(name), {}};
  groups_.emplace(group.name, group);
  audit.emit(kControlPlaneActor, "directory.add_group", group.name);
  return group;
}

Result<DirectoryGroup> Directory::join_group(std::string_view group, std::string_view principal,
                                             const AuditScope& audit) {
  auto it = groups_.find(group);
  if (it == groups_.end()) return make_error(Errc::UnknownGroup, std::string(group));
  if (!principals_.contains(principal)) {
    return make_error(Errc::UnknownPrincipal, std::string(principal));
  }
  if (!it->second.contains(principal)) {
    it->second.members.emplace_back(principal);
    audit.emit(kControlPlaneActor, "directory.join", it->first, Outcome::Success,
               std::string(principal));
  }
  return it->second;
}

Result<DirectoryGroup> Directory::leave_group(std::string_view group, std::string_view principal,
                                              const AuditScope& audit) {
  auto it = groups_.find(group);
  if (it == groups_.end()) return make_error(Errc::UnknownGroup, std::string(group));
  if (!principals_.contains(principal)) {
    return make_error(Errc::UnknownPrincipal, std::string(principal));
  }
  auto& members = it->second.members;
  auto pos = std::find(members.begin(), members.end(), principal);
  if (pos != members.end()) {
    members.erase(pos);
    audit.emit(kControlPlaneActor, "directory.leave", it->first, Outcome::Success,
               std::string(principal));
  }
  return it->second;
}

Result<RemovalRecord> Directory::remove_principal(std::string_view name, const AuditScope& audit) {
  auto it = principals_.find(name);
  if (it == principals_.end()) return make_error(Errc::UnknownPrincipal, std::string(name));
  RemovalRecord removal{it->second, {}};
  for (auto& [group_name, group] : groups_) {
    auto pos = std::find(group.members.begin(), group.members.end(), name);
    if (pos != group.members.end()) {
      group.members.erase(pos);
      removal.groups_left.push_back(group_name);
    }
  }
  principals_.erase(it);
  // Group departures are part of the same mutation, recorded in its detail.
  std::string left;
  for (const auto& g : removal.groups_left) left += (left.empty() ? "" : ",") + g;
  audit.emit(kControlPlaneActor, "directory.remove_principal", removal.principal.name,
             Outcome::Success, left);
  return removal;
}

Result<std::vector<std::string>> Directory::verify_source_group() const {
  const auto* source = group(kSourceGroup);
  if (source == nullptr) return make_error(Errc::GroupMissing, std::string(kSourceGroup));
  if (source->members.empty()) return make_error(Errc::GroupEmpty, std::string(kSourceGroup));
  return source->members;
}

const PrincipalRecord* Directory::find(std::string_view name) const {
  auto it = principals_.find(name);
  return it == principals_.end() ? nullptr : &it->second;
}

const DirectoryGroup* Directory::group(std::string_view name) const {
  auto it = groups_.find(name);
  return it == groups_.end() ? nullptr : &it->second;
}

std::vector<std::string> Directory::dangling_members() const {
  std::vector<std::string> out;
  for (const auto& [name, group] : groups_) {
    for (const auto& m : group.members) {
      if (!principals_.contains(m)) out.push_back(name + ":" + m);
    }
  }
  return out;
}

json Directory::to_json() const {
  json principals = json::object();
  for (const auto& [name, p] : principals_) {
    principals[name] = json{{"kind", to_string(p.kind)},
                            {"has_workspace_identity", p.has_workspace_identity},
                            {"hdfs_home", detail::optional_to_json(p.hdfs_home)},
                            {"org_unit", p.org_unit},
                            {"created_at", p.created_at.minutes}};
  }
  json groups = json::object();
  for (const auto& [name, g] : groups_) groups[name] = json{{"members", g.members}};
  return json{{"principals", principals}, {"groups", groups}};
}

Result<Directory> Directory::from_json(const json& j, const std::string& pointer) {
  Directory dir;
  MP_TRY_ASSIGN(principals, detail::get_object(j, "principals", pointer));
  const auto pp = child(pointer, "principals");
  for (const auto& [name, value] : principals->items()) {
    const auto ptr = child(pp, name);
    if (!is_valid_principal_name(name)) return detail::schema_error(ptr, "invalid principal name");
    MP_TRY_ASSIGN(kind_text, detail::get_string(value, "kind", ptr));
    auto kind = parse_principal_kind(kind_text);
    if (!kind) return detail::schema_error(child(ptr, "kind"), "unknown kind");
    MP_TRY_ASSIGN(workspace, detail::get_bool(value, "has_workspace_identity", ptr));
    MP_TRY_ASSIGN(home, detail::get_optional_string(value, "hdfs_home", ptr));
    MP_TRY_ASSIGN(ou, detail::get_string(value, "org_unit", ptr));
    MP_TRY_ASSIGN(created, detail::get_int(value, "created_at", ptr));
    dir.principals_.emplace(
        name, PrincipalRecord{name, *kind, workspace, home, ou, LogicalTime{created}});
  }
  MP_TRY_ASSIGN(groups, detail::get_object(j, "groups", pointer));
  const auto gp = child(pointer, "groups");
  for (const auto& [name, value] : groups->items()) {
    const auto ptr = child(gp, name);
    MP_TRY_ASSIGN(members, detail::get_array(value, "members", ptr));
    DirectoryGroup group{name, {}};
    for (std::size_t i = 0; i < members->size(); ++i) {
      const auto& m = (*members)[i];
      if (!m.is_string())
        return detail::schema_error(child(child(ptr, "members"), i), "wrong type");
      if (group.contains(m.get<std::string>())) {
        return detail::schema_error(child(child(ptr, "members"), i), "duplicate member");
      }
      group.members.push_back(m.get<std::string>());
    }
    dir.groups_.emplace(name, std::move(group));
  }
  return dir;
}

}  // namespace mirrorplane
