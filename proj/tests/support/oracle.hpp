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

// Reference model used by the tests. Every function here reads a world
// snapshot (the exported JSON document) and evaluates the access rules
// directly, without calling into the library's decision code.

#include <cstddef>
#include <nlohmann/json.hpp>
#include <set>
#include <string>

namespace oracle {

using nlohmann::json;

/// "Token", "PermissionDenied" or "AuthFailure".
std::string authenticate(const json& world, const std::string& caller, const std::string& email);

/// "Token", "PermissionDenied" or "AuthFailure".
std::string impersonate(const json& world, const std::string& workspace, const std::string& email);

/// "Allow(Owner)", "Allow(ReaderGroup)", "Deny(<reason>)" or "UnknownBucket".
std::string authorize(const json& world, const std::string& token_id, const std::string& bucket,
                      const std::string& action);

/// Mirror emails that should sit in the cloud reader group of `bucket`.
std::set<std::string> expected_readers(const json& world, const std::string& bucket);

/// Mirror emails currently in the cloud reader group of `bucket`.
std::set<std::string> actual_readers(const json& world, const std::string& bucket);

/// Number of state mutations between two snapshots of the same world,
/// counted record by record: principals, group memberships, nodes,
/// bindings, account status, quotas, key versions, key invalidations and
/// tokens. A new key version that retires its predecessor is one mutation;
/// a disabled mirror replaced by a fresh one with the same email is two.
std::size_t mutation_count(const json& before, const json& after);

}  // namespace oracle
