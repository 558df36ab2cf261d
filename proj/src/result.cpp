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

#include "mirrorplane/result.hpp"

namespace mirrorplane {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::InvalidName: return "InvalidName";
    case Errc::UnknownGroup: return "UnknownGroup";
    case Errc::UnknownPrincipal: return "UnknownPrincipal";
    case Errc::GroupMissing: return "GroupMissing";
    case Errc::GroupEmpty: return "GroupEmpty";
    case Errc::IllegalParent: return "IllegalParent";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::QuotaExceeded: return "QuotaExceeded";
    case Errc::DuplicateEmail: return "DuplicateEmail";
    case Errc::IllegalRoleForNode: return "IllegalRoleForNode";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::UnknownAccount: return "UnknownAccount";
    case Errc::AlreadyDisabled: return "AlreadyDisabled";
    case Errc::NotFound: return "NotFound";
    case Errc::OwnerMismatch: return "OwnerMismatch";
    case Errc::UnknownOwner: return "UnknownOwner";
    case Errc::PermissionDenied: return "PermissionDenied";
    case Errc::NoActiveKey: return "NoActiveKey";
    case Errc::UnknownEntry: return "UnknownEntry";
    case Errc::UnderscoreNotSupported: return "UnderscoreNotSupported";
    case Errc::NoMirror: return "NoMirror";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::UnmappablePath: return "UnmappablePath";
    case Errc::NoHdfsHome: return "NoHdfsHome";
    case Errc::AuthFailure: return "AuthFailure";
    case Errc::UnknownBucket: return "UnknownBucket";
    case Errc::UnknownToken: return "UnknownToken";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::SchemaError: return "SchemaError";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

std::optional<Errc> parse_errc(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(Errc::IoError); ++i) {
    auto code = static_cast<Errc>(i);
    if (to_string(code) == name) return code;
  }
  return std::nullopt;
}

std::string Error::message() const {
  std::string out{to_string(code)};
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

}  // namespace mirrorplane
