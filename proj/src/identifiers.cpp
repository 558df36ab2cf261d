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

#include "mirrorplane/identifiers.hpp"

#include <algorithm>

namespace mirrorplane {
namespace {

bool is_lower_alnum(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

}  // namespace

bool is_valid_principal_name(std::string_view name) {
  if (name.empty() || name.size() > kMaxIdentifierLength) return false;
  return std::all_of(name.begin(), name.end(),
                     [](char c) { return is_lower_alnum(c) || c == '_' || c == '-'; });
}

bool is_valid_resource_id(std::string_view id) {
  if (id.empty() || id.size() > 2 * kMaxIdentifierLength) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return is_lower_alnum(c) || (c >= 'A' && c <= 'Z') || c == '_' || c == '-' || c == '.' ||
           c == '@';
  });
}

std::string_view to_string(CloudPrincipal::Kind kind) {
  switch (kind) {
    case CloudPrincipal::Kind::User: return "user";
    case CloudPrincipal::Kind::ServiceAccount: return "serviceAccount";
    case CloudPrincipal::Kind::Group: return "group";
  }
  return "user";
}

std::string CloudPrincipal::to_string() const {
  return std::string(mirrorplane::to_string(kind)) + ":" + id;
}

Result<CloudPrincipal> CloudPrincipal::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos || colon + 1 == text.size()) {
    return make_error(Errc::InvalidArgument, "principal must be <kind>:<id>: " + std::string(text));
  }
  auto kind = text.substr(0, colon);
  std::string id{text.substr(colon + 1)};
  if (kind == "user") return CloudPrincipal::user(std::move(id));
  if (kind == "serviceAccount") return CloudPrincipal::service_account(std::move(id));
  if (kind == "group") return CloudPrincipal::group(std::move(id));
  return make_error(Errc::InvalidArgument, "unknown principal kind: " + std::string(kind));
}

}  // namespace mirrorplane
