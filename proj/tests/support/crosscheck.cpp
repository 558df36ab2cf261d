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

#include "crosscheck.hpp"

#include "oracle.hpp"

namespace testing_support {

using namespace mirrorplane;

std::string outcome_of(const Result<Token>& r) {
  return r ? "Token" : std::string(to_string(r.code()));
}

std::string outcome_of(const Result<AccessDecision>& r) {
  return r ? r->to_string() : std::string(to_string(r.code()));
}

namespace {

bool is_allow(const std::string& s) { return s == "Token" || s.starts_with("Allow"); }

void compare(CrossCheck& out, const std::string& what, const std::string& got,
             const std::string& want) {
  if (got == want) return;
  if (is_allow(got) && !is_allow(want)) ++out.false_allows;
  if (!is_allow(got) && is_allow(want)) ++out.false_denies;
  out.mismatches.push_back(what + ": got " + got + ", oracle " + want);
}

}  // namespace

CrossCheck cross_check(World& w) {
  CrossCheck out;
  std::vector<std::string> names{"mallory"};
  for (const auto& [name, _] : w.directory().principals()) names.push_back(name);
  std::vector<std::string> accounts{
      "nobody-mirror@service-accounts-project.iam.gserviceaccount.com"};
  for (const auto& [email, _] : w.cloud().accounts()) accounts.push_back(email);
  std::vector<std::string> buckets{"user.nobody.dp.domain", "shared-gcs-storage-project"};
  for (const auto& [id, node] : w.cloud().nodes()) {
    if (node.kind == NodeKind::Bucket) buckets.push_back(id);
  }

  const auto before = w.to_json();
  for (const auto& caller : names) {
    for (const auto& email : accounts) {
      ++out.authenticate_cases;
      compare(out, "authenticate(" + caller + ", " + email + ")",
              outcome_of(w.authenticate(caller, email)),
              oracle::authenticate(before, caller, email));
      ++out.impersonate_cases;
      compare(out, "impersonate(" + caller + ", " + email + ")",
              outcome_of(w.impersonate(caller, email)), oracle::impersonate(before, caller, email));
    }
  }

  const auto after = w.to_json();
  for (const auto& token : w.authz().tokens()) {
    for (const auto& bucket : buckets) {
      for (auto action : {Action::Read, Action::Write}) {
        ++out.authorize_cases;
        const std::string verb(to_string(action));
        compare(out, "authorize(" + token.token_id + ", " + bucket + ", " + verb + ")",
                outcome_of(w.authorize(token, bucket, action)),
                oracle::authorize(after, token.token_id, bucket, verb));
      }
    }
  }
  return out;
}

}  // namespace testing_support
