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

// Schema-checked field access for snapshot import. Every failure is a
// SchemaError whose detail is the JSON pointer of the offending value.

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "mirrorplane/result.hpp"

namespace mirrorplane::detail {

using nlohmann::json;

inline Error schema_error(const std::string& pointer, const std::string& what) {
  return make_error(Errc::SchemaError, (pointer.empty() ? "/" : pointer) + ": " + what);
}

inline std::string child(const std::string& pointer, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~')
      escaped += "~0";
    else if (c == '/')
      escaped += "~1";
    else
      escaped += c;
  }
  return pointer + "/" + escaped;
}

inline std::string child(const std::string& pointer, std::size_t index) {
  return pointer + "/" + std::to_string(index);
}

inline Result<const json*> field(const json& j, const std::string& key, const std::string& pointer,
                                 json::value_t type) {
  if (!j.is_object()) return schema_error(pointer, "expected object");
  auto it = j.find(key);
  if (it == j.end()) return schema_error(child(pointer, key), "missing");
  bool type_ok = it->type() == type || (type == json::value_t::number_integer &&
                                        it->type() == json::value_t::number_unsigned);
  if (!type_ok) return schema_error(child(pointer, key), "wrong type");
  return &*it;
}

inline Result<std::string> get_string(const json& j, const std::string& key,
                                      const std::string& pointer) {
  auto f = field(j, key, pointer, json::value_t::string);
  if (!f) return f.error();
  return (*f)->get<std::string>();
}

inline Result<std::int64_t> get_int(const json& j, const std::string& key,
                                    const std::string& pointer) {
  auto f = field(j, key, pointer, json::value_t::number_integer);
  if (!f) return f.error();
  return (*f)->get<std::int64_t>();
}

inline Result<bool> get_bool(const json& j, const std::string& key, const std::string& pointer) {
  auto f = field(j, key, pointer, json::value_t::boolean);
  if (!f) return f.error();
  return (*f)->get<bool>();
}

inline Result<const json*> get_object(const json& j, const std::string& key,
                                      const std::string& pointer) {
  return field(j, key, pointer, json::value_t::object);
}

inline Result<const json*> get_array(const json& j, const std::string& key,
                                     const std::string& pointer) {
  return field(j, key, pointer, json::value_t::array);
}

/// Optional fields are always present in canonical output, as null when unset.
inline Result<std::optional<std::string>> get_optional_string(const json& j, const std::string& key,
                                                              const std::string& pointer) {
  if (!j.is_object()) return schema_error(pointer, "expected object");
  auto it = j.find(key);
  if (it == j.end()) return schema_error(child(pointer, key), "missing");
  if (it->is_null()) return std::optional<std::string>{};
  if (!it->is_string()) return schema_error(child(pointer, key), "wrong type");
  return std::optional<std::string>{it->get<std::string>()};
}

inline Result<std::optional<std::int64_t>> get_optional_int(const json& j, const std::string& key,
                                                            const std::string& pointer) {
  if (!j.is_object()) return schema_error(pointer, "expected object");
  auto it = j.find(key);
  if (it == j.end()) return schema_error(child(pointer, key), "missing");
  if (it->is_null()) return std::optional<std::int64_t>{};
  if (!it->is_number_integer()) return schema_error(child(pointer, key), "wrong type");
  return std::optional<std::int64_t>{it->get<std::int64_t>()};
}

template <typename T>
json optional_to_json(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

}  // namespace mirrorplane::detail

// Early-return helpers for Result-returning code.
#define MP_TRY_ASSIGN(lhs, expr)                  \
  auto lhs##_result = (expr);                     \
  if (!lhs##_result) return lhs##_result.error(); \
  auto lhs = std::move(*lhs##_result)

#define MP_TRY(expr)                                    \
  do {                                                  \
    auto mp_try_result_ = (expr);                       \
    if (!mp_try_result_) return mp_try_result_.error(); \
  } while (0)
