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

#include "mirrorplane/reconciler.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

#include "mirrorplane/world.hpp"
#include "oracle.hpp"
#include "world_builder.hpp"

namespace mirrorplane {
namespace {

using testing_support::enroll;
using testing_support::fresh_world;
using testing_support::mirror_of;
using testing_support::run;

std::size_t events_in_tick(const World& w, std::uint64_t tick) {
  AuditFilter f;
  f.tick_id = tick;
  return w.audit().query(f).size();
}

TEST(DeriveMirrorName, FollowsTheMirrorPattern) {
  EXPECT_EQ(*derive_mirror_name("helen", "service-accounts-project"),
            "helen-mirror@service-accounts-project.iam.gserviceaccount.com");
  EXPECT_EQ(*derive_mirror_name("posts-analyze", "service-accounts-project"),
            "posts-analyze-mirror@service-accounts-project.iam.gserviceaccount.com");
  EXPECT_EQ(derive_mirror_name("data_pipeline", "service-accounts-project").code(),
            Errc::UnderscoreNotSupported);
  EXPECT_EQ(derive_mirror_name("data_pipeline", "other").code(), Errc::UnderscoreNotSupported);
}

TEST(SelectProject, SingleAndPerOrgUnit) {
  Cloud cloud;
  PrincipalRecord helen{"helen", PrincipalKind::Human, true, std::nullopt, "general", {}};
  ReconcileConfig single;
  auto p = select_project(helen, single, cloud);
  EXPECT_EQ(p.project, "service-accounts-project");
  EXPECT_EQ(p.folder, "IAMSTORE");

  ReconcileConfig sharded;
  sharded.sharding_mode = ShardingMode::PerOrgUnit;
  PrincipalRecord dev{"dana", PrincipalKind::Human, true, std::nullopt, "dev", {}};
  auto d = select_project(dev, sharded, cloud);
  EXPECT_EQ(d.project, "dev-service-accounts-project");
  EXPECT_EQ(d.folder, "DEVIAM");
}

TEST(ReconcileConfig, ValidationAndKeys) {
  ReconcileConfig c;
  EXPECT_TRUE(c.validate());
  EXPECT_EQ(c.tick_interval.minutes, 15);
  EXPECT_EQ(c.rotation_age, Duration::of_days(7));
  EXPECT_EQ(c.retiring_grace, Duration::of_days(2));

  ASSERT_TRUE(c.set("rotation_age", "10m"));
  EXPECT_EQ(c.validate().code(), Errc::InvalidConfig);
  ASSERT_TRUE(c.set("rotation_age", "16m"));
  EXPECT_TRUE(c.validate());
  ASSERT_TRUE(c.set("retiring_grace", "0m"));
  EXPECT_EQ(c.validate().code(), Errc::InvalidConfig);
  EXPECT_EQ(c.set("nope", "1").code(), Errc::InvalidConfig);
  EXPECT_FALSE(c.set("sharding_mode", "Sideways"));
  EXPECT_FALSE(c.set("quota_default", "12x"));

  ReconcileConfig merged;
  ASSERT_TRUE(merged.merge_json(
      nlohmann::json{
          {"rotation_age", "3d"}, {"tick_interval", 30}, {"sharding_mode", "PerOrgUnit"}},
      ""));
  EXPECT_EQ(merged.rotation_age, Duration::of_days(3));
  EXPECT_EQ(merged.tick_interval.minutes, 30);
  EXPECT_EQ(merged.sharding_mode, ShardingMode::PerOrgUnit);
  EXPECT_FALSE(merged.merge_json(nlohmann::json{{"rotation_age", true}}, ""));
}

TEST(Reconcile, FreshPairCreatesMirrorsKeysAndOneActAs) {
  auto w = fresh_world();
  enroll(w, "helen", true);
  enroll(w, "posts-analyze", false);
  const auto r = w.reconcile_once();
  EXPECT_FALSE(r.aborted);
  ASSERT_EQ(r.created.size(), 2u);
  EXPECT_EQ(w.vault().entries().size(), 2u);
  ASSERT_EQ(r.actas_granted.size(), 1u);
  EXPECT_EQ(r.actas_granted[0].workspace_identity, "helen");
  EXPECT_EQ(w.vault().entry(mirror_of("posts-analyze"))->owner_principal, "posts-analyze");
  EXPECT_TRUE(w.cloud().node(mirror_of("posts-analyze"))->bindings.empty());

  const auto second = w.reconcile_once();
  EXPECT_FALSE(second.changed());
  EXPECT_TRUE(verify(w, VerifyMode::Converged).empty());
}

TEST(Reconcile, AbortsWithoutMutationsWhenSourceGroupIsMissingOrEmpty) {
  auto w = fresh_world();
  run(w, "dir add-user helen");
  const auto before = w.to_json();
  auto r = w.reconcile_once();
  ASSERT_TRUE(r.aborted);
  EXPECT_EQ(r.aborted->code, Errc::GroupMissing);
  EXPECT_EQ(oracle::mutation_count(before, w.to_json()), 0u);
  EXPECT_EQ(events_in_tick(w, r.tick_id), 1u);

  run(w, "dir add-group mirror-account-users");
  const auto before_empty = w.to_json();
  r = w.reconcile_once();
  ASSERT_TRUE(r.aborted);
  EXPECT_EQ(r.aborted->code, Errc::GroupEmpty);
  EXPECT_EQ(oracle::mutation_count(before_empty, w.to_json()), 0u);
  EXPECT_EQ(w.audit().tail(1)[0].action, "reconcile.abort");
}

TEST(Reconcile, UnderscoreNamesAreRejectedEveryTick) {
  auto w = fresh_world();
  enroll(w, "data_pipeline", false);
  enroll(w, "helen", true);
  auto r = w.reconcile_once();
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].reason, Errc::UnderscoreNotSupported);
  EXPECT_EQ(r.created.size(), 1u);
  EXPECT_TRUE(w.cloud().accounts_of("data_pipeline").empty());
  auto again = w.reconcile_once();
  EXPECT_EQ(again.rejected.size(), 1u);
  EXPECT_FALSE(again.changed());
}

TEST(Reconcile, RotationAtExactlyRotationAge) {
  auto w = fresh_world();
  enroll(w, "helen", true);
  enroll(w, "posts-analyze", false);
  w.reconcile_once();

  ASSERT_TRUE(w.advance_clock(Duration::of_days(7) + Duration{-1}));
  EXPECT_TRUE(w.reconcile_once().rotated.empty());

  ASSERT_TRUE(w.advance_clock(Duration{1}));
  const auto r = w.reconcile_once();
  EXPECT_EQ(r.rotated.size(), 2u);
  for (const auto& [email, entry] : w.vault().entries()) {
    ASSERT_EQ(entry.versions.size(), 2u) << email;
    EXPECT_EQ(entry.versions[0].state, KeyState::Active);
    EXPECT_EQ(entry.versions[1].state, KeyState::Retiring);
  }
  EXPECT_FALSE(w.reconcile_once().changed());
}

TEST(Reconcile, DecommissionOnRemovalAndOnGroupExit) {
  auto w = fresh_world();
  enroll(w, "helen", true);
  enroll(w, "posts-analyze", false);
  enroll(w, "ivan", true);
  w.reconcile_once();

  run(w, "dir remove posts-analyze");
  run(w, "dir leave mirror-account-users ivan");
  const auto r = w.reconcile_once();
  ASSERT_EQ(r.decommissioned.size(), 2u);
  for (const auto* who : {"posts-analyze", "ivan"}) {
    const auto* a = w.cloud().account(mirror_of(who));
    ASSERT_NE(a, nullptr);
    EXPECT_EQ(a->status, AccountStatus::Disabled) << who;
    for (const auto& v : w.vault().entry(mirror_of(who))->versions) {
      EXPECT_EQ(v.state, KeyState::Invalid);
    }
  }
  EXPECT_TRUE(w.cloud().node(mirror_of("ivan"))->bindings.empty());
  EXPECT_TRUE(verify(w, VerifyMode::Converged).empty());
  EXPECT_FALSE(w.reconcile_once().changed());

  EXPECT_EQ(w.decommission("posts-analyze").code(), Errc::NoMirror);
}

TEST(Reconcile, RemoveThenReAddCreatesAFreshMirror) {
  auto w = fresh_world();
  enroll(w, "posts-analyze", false);
  w.reconcile_once();
  const auto old_key = w.vault().entry(mirror_of("posts-analyze"))->versions[0].key_id;

  run(w, "dir remove posts-analyze");
  w.reconcile_once();
  ASSERT_TRUE(w.advance_clock(Duration::of_hours(1)));
  enroll(w, "posts-analyze", false);
  EXPECT_EQ(w.directory().find("posts-analyze")->created_at.minutes, 60);
  const auto r = w.reconcile_once();
  ASSERT_EQ(r.created.size(), 1u);
  EXPECT_TRUE(r.created[0].replaced_disabled);

  const auto* account = w.cloud().account(mirror_of("posts-analyze"));
  ASSERT_NE(account, nullptr);
  EXPECT_TRUE(account->active());
  EXPECT_EQ(w.cloud().accounts_of("posts-analyze").size(), 1u);
  EXPECT_EQ(w.vault().key(old_key)->state, KeyState::Invalid);
  EXPECT_EQ(w.vault().entry(mirror_of("posts-analyze"))->active()->created_at.minutes, 60);
  EXPECT_TRUE(verify(w, VerifyMode::Converged).empty());
}

// Removing the only member empties the source group, so the next tick
// aborts before it can decommission. A same-named principal added later must
// still get a fresh mirror rather than inherit the old credentials.
TEST(Reconcile, LastMemberRemovedThenReAdded) {
  auto w = fresh_world();
  enroll(w, "posts-analyze", false);
  w.reconcile_once();
  const auto old_key = w.vault().entry(mirror_of("posts-analyze"))->versions[0].key_id;
  run(w, "dir remove posts-analyze");
  EXPECT_EQ(w.reconcile_once().aborted->code, Errc::GroupEmpty);
  EXPECT_TRUE(w.cloud().account(mirror_of("posts-analyze"))->active());

  ASSERT_TRUE(w.advance_clock(Duration::of_minutes(15)));
  enroll(w, "posts-analyze", false);
  const auto r = w.reconcile_once();
  ASSERT_EQ(r.decommissioned.size(), 1u);
  ASSERT_EQ(r.created.size(), 1u);
  EXPECT_TRUE(r.created[0].replaced_disabled);
  EXPECT_EQ(w.vault().key(old_key)->state, KeyState::Invalid);
  EXPECT_NE(w.vault().entry(mirror_of("posts-analyze"))->active()->key_id, old_key);
  EXPECT_TRUE(verify(w, VerifyMode::Converged).empty());
  EXPECT_FALSE(w.reconcile_once().changed());
}

TEST(Reconcile, PerAccountFailuresDoNotAbortTheTick) {
  auto w = fresh_world();
  enroll(w, "aa", true);
  w.reconcile_once();
  run(w, "cloud set-quota service-accounts-project 2");
  enroll(w, "bb", true);
  enroll(w, "cc", true);
  const auto r = w.reconcile_once();
  EXPECT_EQ(r.created.size(), 1u);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].principal, "cc");
  EXPECT_EQ(r.errors[0].error.code, Errc::QuotaExceeded);
  EXPECT_TRUE(verify(w, VerifyMode::Safety).empty());
}

TEST(Reconcile, OverflowToSecondProjectUnderTheOrgUnitFolder) {
  ReconcileConfig config;
  config.sharding_mode = ShardingMode::PerOrgUnit;
  auto w = fresh_world(3, config);
  for (int i = 0; i < 101; ++i) enroll(w, "dev" + std::to_string(i), true, "dev");
  const auto r = w.reconcile_once();
  EXPECT_TRUE(r.errors.empty());
  ASSERT_EQ(r.created.size(), 101u);
  EXPECT_EQ(r.created.back().project, "dev-service-accounts-project-2");
  EXPECT_EQ(w.cloud().node("dev-service-accounts-project-2")->parent, "DEVIAM");
  EXPECT_EQ(w.cloud().node("DEVIAM")->parent, "IAMSTORE");
  EXPECT_EQ(w.cloud().quota("dev-service-accounts-project")->current_count, 100);
  EXPECT_EQ(w.cloud().quota("dev-service-accounts-project-2")->current_count, 1);
  EXPECT_TRUE(verify(w, VerifyMode::Converged).empty());
}

TEST(Reconcile, ReportJsonRoundTrip) {
  auto w = fresh_world();
  enroll(w, "helen", true);
  enroll(w, "bad_name", false);
  const auto r = w.reconcile_once();
  auto back = ReconcileReport::from_json(r.to_json(), "/last_report");
  ASSERT_TRUE(back);
  EXPECT_EQ(back->to_json(), r.to_json());
}

// Audit events stamped with a tick id are exactly that tick's mutations
// (counted independently from snapshots) plus its rejections and errors.
TEST(Reconcile, AuditByTickMatchesReportAndStateDelta) {
  auto w = fresh_world(11);
  for (const auto* n : {"a1", "a2", "b_1", "c1"}) enroll(w, n, n[0] != 'c');
  auto check = [&w] {
    const auto before = w.to_json();
    const auto r = w.reconcile_once();
    const auto mutations = oracle::mutation_count(before, w.to_json());
    EXPECT_EQ(events_in_tick(w, r.tick_id),
              mutations + r.rejected.size() + r.errors.size() + (r.aborted ? 1 : 0));
    // Folders and projects created on demand for placement are not part of
    // the report; count them from the snapshot.
    std::size_t placement_nodes = 0;
    const auto after = w.to_json();
    for (const auto& [id, node] : after["cloud"]["nodes"].items()) {
      const auto kind = node["kind"].get<std::string>();
      if (!before["cloud"]["nodes"].contains(id) && (kind == "Folder" || kind == "Project")) {
        ++placement_nodes;
      }
    }
    std::size_t expected =
        placement_nodes + r.actas_granted.size() + r.rotated.size() + r.expired.size();
    for (const auto& c : r.created) expected += 2 + (c.replaced_disabled ? 1 : 0);
    for (const auto& d : r.decommissioned) expected += 1 + d.keys_invalidated + d.actas_removed;
    EXPECT_EQ(mutations, expected);
  };
  check();
  run(w, "dir remove a2");
  check();
  ASSERT_TRUE(w.advance_clock(Duration::of_days(7)));
  check();
  ASSERT_TRUE(w.advance_clock(Duration::of_days(2)));
  check();
  enroll(w, "a2", true);
  check();
}

// From any reachable state, a single tick reaches a fixed point.
TEST(ReconcileProperty, OneTickConverges) {
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    std::mt19937 rng(seed);
    auto w = fresh_world(seed);
    run(w, "dir add-group mirror-account-users");
    const std::vector<std::string> names{"ann", "bob", "cy_d", "dee", "eve", "fay"};
    for (int step = 0; step < 40; ++step) {
      const auto& n = names[rng() % names.size()];
      switch (rng() % 6) {
        case 0:
          (void)execute_line(w, "dir add-user " + n + (rng() % 2 ? " --headless" : ""));
          break;
        case 1: (void)execute_line(w, "dir join mirror-account-users " + n); break;
        case 2: (void)execute_line(w, "dir leave mirror-account-users " + n); break;
        case 3: (void)execute_line(w, "dir remove " + n); break;
        case 4:
          ASSERT_TRUE(w.advance_clock(Duration{static_cast<std::int64_t>(rng() % (3 * 1440))}));
          break;
        default: {
          const auto first = w.reconcile_once();
          const auto second = w.reconcile_once();
          EXPECT_FALSE(second.changed()) << "seed " << seed << " step " << step;
          if (!first.aborted) {
            auto violations = verify(w, VerifyMode::Converged);
            EXPECT_TRUE(violations.empty()) << "seed " << seed << " step " << step << ": "
                                            << (violations.empty() ? "" : violations[0].detail);
          }
        }
      }
      EXPECT_TRUE(verify(w, VerifyMode::Safety).empty()) << "seed " << seed << " step " << step;
    }
  }
}

}  // namespace
}  // namespace mirrorplane
