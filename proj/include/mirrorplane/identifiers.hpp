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

#include <optional>
#include <string>
#include <string_view>

#include "mirrorplane/result.hpp"

namespace mirrorplane {

inline constexpr std::size_t kMaxIdentifierLength = 63;
inline constexpr std::string_view kSourceGroup = "mirror-account-users";

/// Principal names: lowercase [a-z0-9_-], length 1..63.
bool is_valid_principal_name(std::string_view name);

/// Group and resource ids additionally admit '.', so that bucket-derived
/// names like "reader-user.helen.dp.domain" are representable.
bool is_valid_resource_id(std::string_view id);

/// Identity as seen by the cloud provider's IAM. Rendered in the
/// provider's "<kind>:<id>" member syntax.
struct CloudPrincipal {
  enum class Kind { User, ServiceAccount, Group };

  Kind kind = Kind::User;
  std::string id;

  static CloudPrincipal user(std::string workspace_name) {
    return {Kind::User, std::move(workspace_name)};
  }
  static CloudPrincipal service_account(std::string email) {
    return {Kind::ServiceAccount, std::move(email)};
  }
  static CloudPrincipal group(std::string group_id) { return {Kind::Group, std::move(group_id)}; }

  std::string to_string() const;
  static Result<CloudPrincipal> parse(std::string_view text);

  friend bool operator==(const CloudPrincipal&, const CloudPrincipal&) = default;
  friend auto operator<=>(const CloudPrincipal&, const CloudPrincipal&) = default;
};

std::string_view to_string(CloudPrincipal::Kind kind);

}  // namespace mirrorplane
