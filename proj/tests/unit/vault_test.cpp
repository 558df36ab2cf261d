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

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "mirrorplane/directory.hpp"

namespace mirrorplane {
namespace {

constexpr const char* kHelen = "helen-mirror@service-accounts-project.iam.gserviceaccount.com";
constexpr const char* kPosts =
    "posts-analyze-mirror@service-accounts-project.iam.gserviceaccount.com";

class VaultTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (const char* n : {"helen", "posts-analyze", "mallory"}) {
      ASSERT_TRUE(dir.add_principal(n, PrincipalKind::Human, std::nullopt, std::nullopt, at(0)));
    }
  }
  AuditScope at(std::int64_t minute) { return AuditScope(log, LogicalTime{minute}); }

  AuditLog log;
  Directory dir;
  Vault vault;
};

TEST_F(VaultTest, FreshStoreCreatesOneActiveVersion) {
  auto v = vault.store_key(kHelen, "helen", "s1", dir, at(0));
  ASSERT_TRUE(v);
  EXPECT_EQ(v->state, KeyState::Active);
  const auto* e = vault.entry(kHelen);
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->owner_principal, "helen");
  EXPECT_EQ(e->versions.size(), 1u);
}

TEST_F(VaultTest, SecondStoreRetiresThePrevious) {
  auto s1 = vault.store_key(kHelen, "helen", "s1", dir, at(0));
  auto s2 = vault.store_key(kHelen, "helen", "s2", dir, at(50));
  ASSERT_TRUE(s1 && s2);
  const auto* e = vault.entry(kHelen);
  ASSERT_EQ(e->versions.size(), 2u);
  EXPECT_EQ(e->versions[0].key_id, s2->key_id);
  EXPECT_EQ(e->versions[0].state, KeyState::Active);
  EXPECT_EQ(e->versions[1].state, KeyState::Retiring);
  EXPECT_EQ(e->versions[1].retiring_since->minutes, 50);
  EXPECT_EQ(e->versions[1].secret, "s1");
}

TEST_F(VaultTest, StoreRejectsForeignOwnerAndUnknownOwner) {
  ASSERT_TRUE(vault.store_key(kHelen, "helen", "s1", dir, at(0)));
  EXPECT_EQ(vault.store_key(kHelen, "mallory", "s3", dir, at(0)).code(), Errc::OwnerMismatch);
  EXPECT_EQ(vault.store_key(kPosts, "ghost", "s", dir, at(0)).code(), Errc::UnknownOwner);
  EXPECT_EQ(vault.entry(kHelen)->versions.size(), 1u);
}

TEST_F(VaultTest, ReadIsOwnerOnlyAndAudited) {
  ASSERT_TRUE(vault.store_key(kPosts, "posts-analyze", "s", dir, at(0)));
  const auto before = log.size();
  auto own = vault.read_key(kPosts, "posts-analyze", at(0));
  ASSERT_TRUE(own);
  EXPECT_EQ(own->secret, "s");
  EXPECT_EQ(vault.read_key(kPosts, "helen", at(0)).code(), Errc::PermissionDenied);
  EXPECT_EQ(vault.read_key("unknown@x", "helen", at(0)).code(), Errc::NoActiveKey);
  ASSERT_EQ(log.size(), before + 3);
  const auto events = log.tail(3);
  EXPECT_EQ(events[0].outcome, Outcome::Success);
  EXPECT_EQ(events[1].actor, "helen");
  EXPECT_EQ(events[1].outcome, Outcome::Failure);
}

TEST_F(VaultTest, ModifyAlwaysDenied) {
  ASSERT_TRUE(vault.store_key(kHelen, "helen", "s1", dir, at(0)));
  for (const char* who : {"helen", "mallory", "control-plane"}) {
    EXPECT_EQ(vault.modify_key(kHelen, who, at(0)).code(), Errc::PermissionDenied) << who;
  }
  EXPECT_EQ(vault.entry(kHelen)->versions[0].secret, "s1");
  EXPECT_EQ(log.query(AuditFilter{.action = "vault.modify_key"}).size(), 3u);
}

TEST_F(VaultTest, ExpiryHappensExactlyAtTheGraceBoundary) {
  const Duration grace = Duration::of_hours(48);
  ASSERT_TRUE(vault.store_key(kHelen, "helen", "s1", dir, at(0)));
  ASSERT_TRUE(vault.store_key(kHelen, "helen", "s2", dir, at(100)));

  EXPECT_TRUE(vault.expire_versions(LogicalTime{100} + grace + Duration{-1}, grace, at(0)).empty());
  EXPECT_EQ(vault.entry(kHelen)->versions[1].state, KeyState::Retiring);

  auto transitions = vault.expire_versions(LogicalTime{100} + grace, grace, at(0));
  ASSERT_EQ(transitions.size(), 1u);
  EXPECT_EQ(transitions[0].from, KeyState::Retiring);
  EXPECT_EQ(transitions[0].to, KeyState::Invalid);
  EXPECT_EQ(vault.entry(kHelen)->versions[1].state, KeyState::Invalid);
  EXPECT_EQ(vault.entry(kHelen)->versions[0].state, KeyState::Active);
  EXPECT_TRUE(vault.expire_versions(LogicalTime{100000}, grace, at(0)).empty());
}

TEST_F(VaultTest, RevokeAll) {
  ASSERT_TRUE(vault.store_key(kHelen, "helen", "s1", dir, at(0)));
  ASSERT_TRUE(vault.store_key(kHelen, "helen", "s2", dir, at(1)));
  auto n = vault.revoke_all(kHelen, at(2));
  ASSERT_TRUE(n);
  EXPECT_EQ(*n, 2u);
  EXPECT_EQ(*vault.revoke_all(kHelen, at(3)), 0u);
  EXPECT_EQ(vault.revoke_all("unknown@x", at(3)).code(), Errc::UnknownEntry);
  EXPECT_EQ(vault.read_key(kHelen, "helen", at(3)).code(), Errc::NoActiveKey);
}

TEST_F(VaultTest, SeededSecretsAreDeterministicAndWide) {
  SeededSecretSource a(42), b(42), c(43);
  std::set<std::string> seen;
  for (std::uint64_t i = 1; i <= 200; ++i) {
    const auto s = a.generate(i);
    EXPECT_EQ(s, b.generate(i));
    EXPECT_NE(s, c.generate(i));
    EXPECT_EQ(s.size(), 32u);
    EXPECT_EQ(s.find_first_not_of("0123456789abcdef"), std::string::npos);
    seen.insert(s);
  }
  EXPECT_EQ(seen.size(), 200u);
}

TEST_F(VaultTest, RedactedExportHidesSecrets) {
  ASSERT_TRUE(vault.store_key(kHelen, "helen", "deadbeef", dir, at(0)));
  EXPECT_EQ(vault.to_json(false).dump().find("deadbeef"), std::string::npos);
  EXPECT_NE(vault.to_json(true).dump().find("deadbeef"), std::string::npos);
  auto back = Vault::from_json(vault.to_json(true), "/vault");
  ASSERT_TRUE(back);
  EXPECT_EQ(back->to_json(true), vault.to_json(true));
}

// Random store / expire / revoke / read / modify sequences over a small
// population. After every step: each entry has at most one Active version,
// secrets never change, every state history is a subsequence of
// Active, Retiring, Invalid, and only owners can read.
TEST(VaultProperty, CustodyAndLifecycle) {
  const std::vector<std::string> people{"p0", "p1", "p2", "p3"};
  auto email = [](const std::string& p) { return p + "-mirror@prj.iam.gserviceaccount.com"; };
  auto rank = [](KeyState s) { return static_cast<int>(s); };

  for (std::uint32_t seed = 1; seed <= 25; ++seed) {
    std::mt19937 rng(seed);
    AuditLog log;
    Directory dir;
    for (const auto& p : people) {
      ASSERT_TRUE(dir.add_principal(p, PrincipalKind::Human, std::nullopt, std::nullopt,
                                    AuditScope(log, LogicalTime{0})));
    }
    Vault vault;
    SeededSecretSource secrets(seed);
    std::map<std::string, std::string> secret_of;
    std::map<std::string, std::vector<KeyState>> history;
    std::int64_t now = 0;

    for (int step = 0; step < 150; ++step) {
      now += static_cast<std::int64_t>(rng() % 600);
      AuditScope scope(log, LogicalTime{now});
      const auto& owner = people[rng() % people.size()];
      const auto& other = people[rng() % people.size()];
      switch (rng() % 5) {
        case 0:
        case 1:
          (void)vault.store_key(email(owner), rng() % 8 == 0 ? other : owner,
                                secrets.generate(vault.next_key_sequence()), dir, scope);
          break;
        case 2: (void)vault.expire_versions(LogicalTime{now}, Duration{720}, scope); break;
        case 3: (void)vault.revoke_all(email(owner), scope); break;
        default: (void)vault.modify_key(email(owner), other, scope); break;
      }

      for (const auto& [mail, entry] : vault.entries()) {
        int active = 0;
        for (const auto& v : entry.versions) {
          active += v.state == KeyState::Active ? 1 : 0;
          auto [it, fresh] = secret_of.emplace(v.key_id, v.secret);
          EXPECT_EQ(it->second, v.secret) << v.key_id;
          auto& h = history[v.key_id];
          if (h.empty() || h.back() != v.state) h.push_back(v.state);
        }
        EXPECT_LE(active, 1) << mail;
        for (const auto& caller : people) {
          auto r = vault.read_key(mail, caller, scope);
          if (caller != entry.owner_principal) {
            EXPECT_EQ(r.code(), Errc::PermissionDenied);
          } else if (entry.active() != nullptr) {
            EXPECT_TRUE(r);
          }
        }
      }
    }
    for (const auto& [key_id, h] : history) {
      for (std::size_t i = 1; i < h.size(); ++i) {
        EXPECT_LT(rank(h[i - 1]), rank(h[i])) << key_id;
      }
    }
  }
}

}  // namespace
}  // namespace mirrorplane
