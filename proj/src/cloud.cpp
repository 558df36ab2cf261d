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

#include "mirrorplane/cloud.hpp"

#include <algorithm>
#include <functional>

#include "json_util.hpp"

namespace mirrorplane {

using detail::child;
using nlohmann::json;

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Organization: return "Organization";
    case NodeKind::Folder: return "Folder";
    case NodeKind::Project: return "Project";
    case NodeKind::ServiceAccount: return "ServiceAccount";
    case NodeKind::CloudGroup: return "CloudGroup";
    case NodeKind::Bucket: return "Bucket";
  }
  return "Folder";
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::ActAs: return "ActAs";
    case Role::BucketReader: return "BucketReader";
    case Role::BucketWriter: return "BucketWriter";
    case Role::BucketOwner: return "BucketOwner";
    case Role::GroupMember: return "GroupMember";
  }
  return "ActAs";
}

std::string_view to_string(AccountStatus status) {
  return status == AccountStatus::Active ? "Active" : "Disabled";
}

Result<NodeKind> parse_node_kind(std::string_view text) {
  for (auto k : {NodeKind::Organization, NodeKind::Folder, NodeKind::Project,
                 NodeKind::ServiceAccount, NodeKind::CloudGroup, NodeKind::Bucket}) {
    if (text == to_string(k)) return k;
  }
  return make_error(Errc::InvalidArgument, "unknown node kind: " + std::string(text));
}

Result<Role> parse_role(std::string_view text) {
  for (auto r : {Role::ActAs, Role::BucketReader, Role::BucketWriter, Role::BucketOwner,
                 Role::GroupMember}) {
    if (text == to_string(r)) return r;
  }
  return make_error(Errc::InvalidArgument, "unknown role: " + std::string(text));
}

bool may_contain(NodeKind parent, NodeKind child_kind) {
  switch (child_kind) {
    case NodeKind::Organization: return false;
    case NodeKind::Folder: return parent == NodeKind::Organization || parent == NodeKind::Folder;
    case NodeKind::Project: return parent == NodeKind::Organization || parent == NodeKind::Folder;
    case NodeKind::ServiceAccount:
    case NodeKind::Bucket: return parent == NodeKind::Project;
    // Groups belong to the workspace domain, not to a project.
    case NodeKind::CloudGroup: return parent == NodeKind::Organization;
  }
  return false;
}

bool role_applies_to(Role role, NodeKind kind) {
  switch (role) {
    case Role::ActAs: return kind == NodeKind::ServiceAccount;
    case Role::BucketReader:
    case Role::BucketWriter:
    case Role::BucketOwner: return kind == NodeKind::Bucket;
    case Role::GroupMember: return kind == NodeKind::CloudGroup;
  }
  return false;
}

bool ResourceNode::has_binding(Role role, const CloudPrincipal& principal) const {
  return std::find(bindings.begin(), bindings.end(), RoleBinding{role, principal}) !=
         bindings.end();
}

std::string service_account_email(std::string_view account_name, std::string_view project) {
  return std::string(account_name) + "@" + std::string(project) +
         std::string(kServiceAccountDomain);
}

std::string strip_bucket_scheme(std::string_view id) {
  if (id.starts_with(kBucketScheme)) id.remove_prefix(kBucketScheme.size());
  while (!id.empty() && id.back() == '/') id.remove_suffix(1);
  return std::string(id);
}

namespace {

bool is_valid_account_name(std::string_view name) {
  if (name.empty() || name.size() > kMaxIdentifierLength) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
  });
}

}  // namespace

Cloud::Cloud(std::string organization_id) : organization_(std::move(organization_id)) {
  nodes_.emplace(organization_, ResourceNode{organization_, NodeKind::Organization, {}, {}});
}

Result<ResourceNode> Cloud::create_node(NodeKind kind, std::string_view id, std::string_view parent,
                                        const AuditScope& audit) {
  if (!is_valid_resource_id(id)) return make_error(Errc::InvalidName, std::string(id));
  const auto* parent_node = node(parent);
  if (parent_node == nullptr) return make_error(Errc::UnknownNode, std::string(parent));
  if (!may_contain(parent_node->kind, kind)) {
    return make_error(Errc::IllegalParent, std::string(to_string(kind)) + " under " +
                                               std::string(to_string(parent_node->kind)));
  }
  if (kind == NodeKind::ServiceAccount) {
    return make_error(Errc::InvalidArgument,
                      "service accounts are created with create_service_account");
  }
  if (nodes_.contains(id)) return make_error(Errc::DuplicateId, std::string(id));

  ResourceNode created{std::string(id), kind, std::string(parent), {}};
  nodes_.emplace(created.id, created);
  if (kind == NodeKind::Project) quotas_.emplace(created.id, default_quota_);
  audit.emit(kControlPlaneActor, "cloud.create_node", created.id, Outcome::Success,
             std::string(to_string(kind)) + " parent=" + std::string(parent));
  return created;
}

Result<MirrorAccount> Cloud::create_service_account(std::string_view project,
                                                    std::string_view account_name,
                                                    std::string_view source_principal,
                                                    const AuditScope& audit) {
  const auto* project_node = node(project);
  if (project_node == nullptr || project_node->kind != NodeKind::Project) {
    return make_error(Errc::UnknownNode, std::string(project));
  }
  if (!is_valid_account_name(account_name)) {
    return make_error(Errc::InvalidName, std::string(account_name));
  }
  auto email = service_account_email(account_name, project);
  if (accounts_.contains(email) || nodes_.contains(email)) {
    return make_error(Errc::DuplicateEmail, email);
  }
  auto max = quotas_.at(std::string(project));
  if (service_account_count(project) >= max) {
    return make_error(Errc::QuotaExceeded,
                      std::string(project) + " holds " + std::to_string(max) + " accounts");
  }
  MirrorAccount account{email, std::string(source_principal), std::string(project),
                        AccountStatus::Active, audit.now()};
  nodes_.emplace(email, ResourceNode{email, NodeKind::ServiceAccount, std::string(project), {}});
  accounts_.emplace(email, account);
  audit.emit(kControlPlaneActor, "cloud.create_service_account", email, Outcome::Success,
             "source=" + account.source_principal);
  return account;
}

Result<MirrorAccount> Cloud::disable_service_account(std::string_view email,
                                                     const AuditScope& audit) {
  auto it = accounts_.find(email);
  if (it == accounts_.end()) return make_error(Errc::UnknownAccount, std::string(email));
  if (!it->second.active()) return make_error(Errc::AlreadyDisabled, std::string(email));
  it->second.status = AccountStatus::Disabled;
  audit.emit(kControlPlaneActor, "cloud.disable_service_account", it->first);
  return it->second;
}

Result<std::size_t> Cloud::delete_service_account(std::string_view email, const AuditScope& audit) {
  auto it = accounts_.find(email);
  if (it == accounts_.end()) return make_error(Errc::UnknownAccount, std::string(email));
  if (it->second.active()) {
    return make_error(Errc::InvalidArgument, "only disabled accounts can be deleted");
  }
  const auto member = CloudPrincipal::service_account(it->first);
  std::size_t dropped = 0;
  for (auto& [id, n] : nodes_) {
    for (auto b = n.bindings.begin(); b != n.bindings.end();) {
      if (b->principal == member) {
        audit.emit(kControlPlaneActor, "cloud.unbind_role", id, Outcome::Success,
                   std::string(to_string(b->role)) + " " + member.to_string());
        b = n.bindings.erase(b);
        ++dropped;
      } else {
        ++b;
      }
    }
  }
  const std::string key = it->first;
  accounts_.erase(it);
  nodes_.erase(key);
  audit.emit(kControlPlaneActor, "cloud.delete_service_account", key);
  return dropped;
}

Result<BindOutcome> Cloud::bind_role(std::string_view node_id, Role role,
                                     const CloudPrincipal& principal, const AuditScope& audit) {
  auto* n = mutable_node(node_id);
  if (n == nullptr) return make_error(Errc::UnknownNode, std::string(node_id));
  if (!role_applies_to(role, n->kind)) {
    return make_error(Errc::IllegalRoleForNode,
                      std::string(to_string(role)) + " on " + std::string(to_string(n->kind)));
  }
  RoleBinding binding{role, principal};
  if (n->has_binding(role, principal)) return BindOutcome{binding, false};
  n->bindings.push_back(binding);
  audit.emit(kControlPlaneActor, "cloud.bind_role", n->id, Outcome::Success,
             std::string(to_string(role)) + " " + principal.to_string());
  return BindOutcome{binding, true};
}

Result<bool> Cloud::unbind_role(std::string_view node_id, Role role,
                                const CloudPrincipal& principal, const AuditScope& audit) {
  auto* n = mutable_node(node_id);
  if (n == nullptr) return make_error(Errc::UnknownNode, std::string(node_id));
  auto pos = std::find(n->bindings.begin(), n->bindings.end(), RoleBinding{role, principal});
  if (pos == n->bindings.end()) return false;
  n->bindings.erase(pos);
  audit.emit(kControlPlaneActor, "cloud.unbind_role", n->id, Outcome::Success,
             std::string(to_string(role)) + " " + principal.to_string());
  return true;
}

Status Cloud::set_quota(std::string_view project, std::int64_t max_service_accounts,
                        const AuditScope& audit) {
  auto it = quotas_.find(project);
  if (it == quotas_.end()) return make_error(Errc::UnknownNode, std::string(project));
  if (max_service_accounts < 1) return make_error(Errc::InvalidArgument, "quota must be >= 1");
  if (max_service_accounts < service_account_count(project)) {
    return make_error(Errc::InvalidArgument, "quota below current service account count");
  }
  if (it->second == max_service_accounts) return {};
  it->second = max_service_accounts;
  audit.emit(kControlPlaneActor, "cloud.set_quota", it->first, Outcome::Success,
             std::to_string(max_service_accounts));
  return {};
}

Result<Lookup> Cloud::lookup(std::string_view id) const {
  auto key = strip_bucket_scheme(id);
  const auto* n = node(key);
  if (n == nullptr) return make_error(Errc::NotFound, std::string(id));
  return Lookup{n, account(key)};
}

const ResourceNode* Cloud::node(std::string_view id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

ResourceNode* Cloud::mutable_node(std::string_view id) {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const MirrorAccount* Cloud::account(std::string_view email) const {
  auto it = accounts_.find(email);
  return it == accounts_.end() ? nullptr : &it->second;
}

const MirrorAccount* Cloud::active_mirror_of(std::string_view principal) const {
  for (const auto& [email, a] : accounts_) {
    if (a.active() && a.source_principal == principal) return &a;
  }
  return nullptr;
}

std::vector<const MirrorAccount*> Cloud::accounts_of(std::string_view principal) const {
  std::vector<const MirrorAccount*> out;
  for (const auto& [email, a] : accounts_) {
    if (a.source_principal == principal) out.push_back(&a);
  }
  return out;
}

std::int64_t Cloud::service_account_count(std::string_view project) const {
  return std::count_if(accounts_.begin(), accounts_.end(),
                       [&](const auto& kv) { return kv.second.project == project; });
}

Result<ProjectQuota> Cloud::quota(std::string_view project) const {
  auto it = quotas_.find(project);
  if (it == quotas_.end()) return make_error(Errc::UnknownNode, std::string(project));
  return ProjectQuota{it->first, it->second, service_account_count(project)};
}

std::vector<std::string> Cloud::children(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& [nid, n] : nodes_) {
    if (n.parent && *n.parent == id) out.push_back(nid);
  }
  return out;
}

bool Cloud::reaches_root(std::string_view id) const {
  return is_under(id, organization_) || id == organization_;
}

bool Cloud::is_under(std::string_view id, std::string_view ancestor) const {
  const auto* n = node(id);
  // Bounded walk so that a cyclic imported snapshot still terminates.
  for (std::size_t steps = 0; n != nullptr && steps <= nodes_.size(); ++steps) {
    if (!n->parent) return false;
    if (*n->parent == ancestor) return true;
    n = node(*n->parent);
  }
  return false;
}

std::string Cloud::render_tree() const {
  std::string out;
  std::function<void(const std::string&, int)> walk = [&](const std::string& id, int depth) {
    const auto& n = nodes_.at(id);
    out += std::string(static_cast<std::size_t>(depth) * 2, ' ') + n.id + " [" +
           std::string(to_string(n.kind));
    if (const auto* a = account(id)) out += ", " + std::string(to_string(a->status));
    out += "]\n";
    for (const auto& b : n.bindings) {
      out += std::string(static_cast<std::size_t>(depth) * 2 + 4, ' ') + "- " +
             std::string(to_string(b.role)) + " " + b.principal.to_string() + "\n";
    }
    if (depth > static_cast<int>(nodes_.size())) return;
    for (const auto& c : children(id)) walk(c, depth + 1);
  };
  walk(organization_, 0);
  return out;
}

json Cloud::to_json() const {
  json nodes = json::object();
  for (const auto& [id, n] : nodes_) {
    json bindings = json::array();
    for (const auto& b : n.bindings) {
      bindings.push_back(json{{"role", to_string(b.role)}, {"principal", b.principal.to_string()}});
    }
    nodes[id] = json{{"kind", to_string(n.kind)},
                     {"parent", detail::optional_to_json(n.parent)},
                     {"bindings", bindings}};
  }
  json accounts = json::object();
  for (const auto& [email, a] : accounts_) {
    accounts[email] = json{{"source_principal", a.source_principal},
                           {"project", a.project},
                           {"status", to_string(a.status)},
                           {"created_at", a.created_at.minutes}};
  }
  json quotas = json::object();
  for (const auto& [p, q] : quotas_) quotas[p] = q;
  return json{{"organization", organization_},
              {"default_quota", default_quota_},
              {"nodes", nodes},
              {"accounts", accounts},
              {"quotas", quotas}};
}

Result<Cloud> Cloud::from_json(const json& j, const std::string& pointer) {
  MP_TRY_ASSIGN(org, detail::get_string(j, "organization", pointer));
  MP_TRY_ASSIGN(default_quota, detail::get_int(j, "default_quota", pointer));
  Cloud cloud(org);
  cloud.nodes_.clear();
  cloud.default_quota_ = default_quota;

  MP_TRY_ASSIGN(nodes, detail::get_object(j, "nodes", pointer));
  const auto np = child(pointer, "nodes");
  for (const auto& [id, value] : nodes->items()) {
    const auto ptr = child(np, id);
    MP_TRY_ASSIGN(kind_text, detail::get_string(value, "kind", ptr));
    auto kind = parse_node_kind(kind_text);
    if (!kind) return detail::schema_error(child(ptr, "kind"), "unknown kind");
    MP_TRY_ASSIGN(parent, detail::get_optional_string(value, "parent", ptr));
    MP_TRY_ASSIGN(bindings, detail::get_array(value, "bindings", ptr));
    ResourceNode n{id, *kind, parent, {}};
    for (std::size_t i = 0; i < bindings->size(); ++i) {
      const auto bp = child(child(ptr, "bindings"), i);
      MP_TRY_ASSIGN(role_text, detail::get_string((*bindings)[i], "role", bp));
      MP_TRY_ASSIGN(principal_text, detail::get_string((*bindings)[i], "principal", bp));
      auto role = parse_role(role_text);
      if (!role) return detail::schema_error(child(bp, "role"), "unknown role");
      auto principal = CloudPrincipal::parse(principal_text);
      if (!principal) return detail::schema_error(child(bp, "principal"), "bad principal");
      n.bindings.push_back(RoleBinding{*role, *principal});
    }
    cloud.nodes_.emplace(id, std::move(n));
  }
  auto root = cloud.nodes_.find(org);
  if (root == cloud.nodes_.end() || root->second.kind != NodeKind::Organization) {
    return detail::schema_error(child(pointer, "organization"), "organization node missing");
  }

  MP_TRY_ASSIGN(accounts, detail::get_object(j, "accounts", pointer));
  const auto ap = child(pointer, "accounts");
  for (const auto& [email, value] : accounts->items()) {
    const auto ptr = child(ap, email);
    MP_TRY_ASSIGN(source, detail::get_string(value, "source_principal", ptr));
    MP_TRY_ASSIGN(project, detail::get_string(value, "project", ptr));
    MP_TRY_ASSIGN(status, detail::get_string(value, "status", ptr));
    MP_TRY_ASSIGN(created, detail::get_int(value, "created_at", ptr));
    if (status != "Active" && status != "Disabled") {
      return detail::schema_error(child(ptr, "status"), "unknown status");
    }
    cloud.accounts_.emplace(
        email, MirrorAccount{email, source, project,
                             status == "Active" ? AccountStatus::Active : AccountStatus::Disabled,
                             LogicalTime{created}});
  }

  MP_TRY_ASSIGN(quotas, detail::get_object(j, "quotas", pointer));
  for (const auto& [project, value] : quotas->items()) {
    if (!value.is_number_integer()) {
      return detail::schema_error(child(child(pointer, "quotas"), project), "wrong type");
    }
    cloud.quotas_.emplace(project, value.get<std::int64_t>());
  }
  return cloud;
}

}  // namespace mirrorplane
