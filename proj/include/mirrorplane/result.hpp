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
#include <utility>
#include <variant>

namespace mirrorplane {

/// Every failure the control plane can report. The names are part of the
/// CLI and snapshot surface: `to_string` output is stable.
enum class Errc {
  // directory
  DuplicateName,
  InvalidName,
  UnknownGroup,
  UnknownPrincipal,
  GroupMissing,
  GroupEmpty,
  // cloud
  IllegalParent,
  DuplicateId,
  QuotaExceeded,
  DuplicateEmail,
  IllegalRoleForNode,
  UnknownNode,
  UnknownAccount,
  AlreadyDisabled,
  NotFound,
  // vault
  OwnerMismatch,
  UnknownOwner,
  PermissionDenied,
  NoActiveKey,
  UnknownEntry,
  // reconciler
  UnderscoreNotSupported,
  NoMirror,
  InvalidConfig,
  // onboarder
  UnmappablePath,
  NoHdfsHome,
  // authz
  AuthFailure,
  UnknownBucket,
  UnknownToken,
  InvalidArgument,
  // state / cli
  SchemaError,
  ParseError,
  IoError,
};

std::string_view to_string(Errc code);

struct Error {
  Errc code;
  std::string detail;

  std::string message() const;
};

/// Value-or-error. Mirrors the subset of std::expected the code base needs.
template <typename T>
class Result {
 public:
  Result(T value) : state_(std::move(value)) {}      // NOLINT(runtime/explicit)
  Result(Error error) : state_(std::move(error)) {}  // NOLINT(runtime/explicit)

  bool ok() const { return state_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() & { return std::get<0>(state_); }
  const T& value() const& { return std::get<0>(state_); }
  T&& value() && { return std::get<0>(std::move(state_)); }
  T& operator*() & { return value(); }
  const T& operator*() const& { return value(); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

  const Error& error() const { return std::get<1>(state_); }
  Errc code() const { return error().code; }

 private:
  std::variant<T, Error> state_;
};

template <>
class Result<void> {
 public:
  Result() = default;
  Result(Error error) : error_(std::move(error)), ok_(false) {}  // NOLINT

  bool ok() const { return ok_; }
  explicit operator bool() const { return ok_; }
  const Error& error() const { return error_; }
  Errc code() const { return error_.code; }

 private:
  Error error_{Errc::InvalidArgument, {}};
  bool ok_ = true;
};

using Status = Result<void>;

/// Inverse of to_string(Errc); nullopt for unknown names.
std::optional<Errc> parse_errc(std::string_view name);

inline Error make_error(Errc code, std::string detail = {}) {
  return Error{code, std::move(detail)};
}

}  // namespace mirrorplane
