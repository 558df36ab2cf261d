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

#include "mirrorplane/world.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "mirrorplane/commands.hpp"
#include "world_builder.hpp"

namespace mirrorplane {
namespace {

using nlohmann::json;
using testing_support::fresh_world;
using testing_support::mirror_of;

std::string read_file(const std::string& relative) {
  std::ifstream in(std::string(MIRRORPLANE_SOURCE_DIR) + "/" + relative);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture() { return read_file("tests/fixtures/partly-cloudy.json"); }

World load(const json& j) {
  auto w = World::from_json(j);
  if (!w) throw std::runtime_error(w.error().message());
  return std::move(*w);
}

std::size_t count_kind(const std::vector<Violation>& vs, ViolationKind kind) {
  return static_cast<std::size_t>(
      std::count_if(vs.begin(), vs.end(), [&](const auto& v) { return v.kind == kind; }));
}

std::string describe(const std::vector<Violation>& vs) {
  std::string out;
  for (const auto& v : vs) out += to_json(v).dump() + "\n";
  return out;
}

TEST(Fixture, ImportsCleanAndMatchesTheWalkthroughScript) {
  const auto text = fixture();
  ASSERT_FALSE(text.empty());
  auto w = World::import_canonical(text);
  ASSERT_TRUE(w) << w.error().message();
  EXPECT_TRUE(verify(*w, VerifyMode::Converged).empty());
  EXPECT_EQ(w->export_canonical(), text);

  auto replay = fresh_world(1);
  auto transcript = run_scenario(replay, read_file("scenarios/partly-cloudy.txt"), true);
  ASSERT_TRUE(transcript);
  EXPECT_EQ(transcript->exit_code(), kExitOk) << transcript->render();
  EXPECT_EQ(replay.export_canonical(), text);
}

TEST(StateIo, RoundTripIsByteIdentical) {
  auto w = load(json::parse(fixture()));
  ASSERT_TRUE(w.advance_clock(Duration::of_days(8)));
  w.reconcile_once();
  const auto first = w.export_canonical();
  auto again = World::import_canonical(first);
  ASSERT_TRUE(again);
  EXPECT_EQ(again->export_canonical(), first);
  EXPECT_EQ(again->to_json(), w.to_json());
}

TEST(StateIo, RedactedExportOmitsSecrets) {
  auto w = load(json::parse(fixture()));
  const auto redacted = w.export_canonical(false);
  EXPECT_EQ(redacted.find("2f68874c1585b9ae455e90fcf94ed0ed"), std::string::npos);
  EXPECT_NE(w.export_canonical(true).find("2f68874c1585b9ae455e90fcf94ed0ed"), std::string::npos);
}

TEST(StateIo, MissingSectionsAreSchemaErrorsWithPointers) {
  for (const char* key : {"vault", "cloud", "directory", "audit", "authz", "config", "clock"}) {
    auto j = json::parse(fixture());
    j.erase(key);
    auto w = World::from_json(j);
    ASSERT_FALSE(w) << key;
    EXPECT_EQ(w.code(), Errc::SchemaError);
    EXPECT_TRUE(w.error().detail.starts_with(std::string("/") + key)) << w.error().detail;
  }
  auto wrong_format = json::parse(fixture());
  wrong_format["format"] = "something-else/9";
  EXPECT_EQ(World::from_json(wrong_format).code(), Errc::SchemaError);
  EXPECT_EQ(World::import_canonical("{not json").code(), Errc::SchemaError);
}

TEST(Verify, HandEditedActAsOnHeadlessMirrorIsOneViolation) {
  auto j = json::parse(fixture());
  j["cloud"]["nodes"][mirror_of("posts-analyze")]["bindings"].push_back(
      {{"principal", "user:helen"}, {"role", "ActAs"}});
  auto vs = verify(load(j));
  ASSERT_EQ(vs.size(), 1u) << describe(vs);
  EXPECT_EQ(vs[0].kind, ViolationKind::ActAsViolation);
  EXPECT_EQ(vs[0].subject, mirror_of("posts-analyze") + " <- user:helen");
}

TEST(Verify, TwoActiveMirrorsForOnePrincipalIsOneBijectionViolation) {
  auto j = json::parse(fixture());
  const auto second = mirror_of("posts-analyze", "service-accounts-project-2");
  j["cloud"]["nodes"]["service-accounts-project-2"] = {
      {"kind", "Project"}, {"parent", "IAMSTORE"}, {"bindings", json::array()}};
  j["cloud"]["nodes"][second] = {{"kind", "ServiceAccount"},
                                 {"parent", "service-accounts-project-2"},
                                 {"bindings", json::array()}};
  j["cloud"]["accounts"][second] = {{"created_at", 0},
                                    {"project", "service-accounts-project-2"},
                                    {"source_principal", "posts-analyze"},
                                    {"status", "Active"}};
  j["vault"]["entries"][second] = {{"owner", "posts-analyze"},
                                   {"versions", json::array({{{"created_at", 0},
                                                              {"key_id", "key-99"},
                                                              {"retiring_since", nullptr},
                                                              {"secret", "00"},
                                                              {"state", "Active"}}})}};
  auto vs = verify(load(j));
  ASSERT_EQ(vs.size(), 1u) << describe(vs);
  EXPECT_EQ(vs[0].kind, ViolationKind::BijectionViolation);
}

TEST(Verify, DetectsOtherHandEdits) {
  {
    auto j = json::parse(fixture());
    j["vault"]["entries"][mirror_of("helen")]["owner"] = "posts-analyze";
    EXPECT_GE(count_kind(verify(load(j)), ViolationKind::OwnershipViolation), 1u);
  }
  {
    auto j = json::parse(fixture());
    auto& versions = j["vault"]["entries"][mirror_of("helen")]["versions"];
    auto copy = versions[0];
    copy["key_id"] = "key-98";
    versions.push_back(copy);
    EXPECT_EQ(count_kind(verify(load(j)), ViolationKind::SingleActiveViolation), 1u);
  }
  {
    auto j = json::parse(fixture());
    j["audit"].erase(3);
    auto w = World::from_json(j);
    ASSERT_FALSE(w);
    EXPECT_TRUE(w.error().detail.starts_with("/audit/3/seq")) << w.error().detail;
  }
  {
    auto j = json::parse(fixture());
    j["cloud"]["nodes"]["reader-user.posts-analyze.dp.domain"]["bindings"] = json::array();
    auto w = load(j);
    // An unsynced reader group is safe; only convergence requires equality.
    EXPECT_TRUE(verify(w).empty());
    auto vs = verify(w, VerifyMode::Converged);
    ASSERT_EQ(vs.size(), 1u) << describe(vs);
    EXPECT_EQ(vs[0].kind, ViolationKind::ReaderGroupViolation);
  }
  {
    auto j = json::parse(fixture());
    j["cloud"]["nodes"]["user.helen.dp.domain"]["bindings"].push_back(
        {{"principal", "group:reader-user.helen.dp.domain"}, {"role", "BucketWriter"}});
    auto vs = verify(load(j));
    EXPECT_EQ(count_kind(vs, ViolationKind::ReaderGroupViolation), 1u) << describe(vs);
  }
}

TEST(Determinism, SameSeedAndScriptGiveIdenticalBytes) {
  const auto script = read_file("scenarios/partly-cloudy.txt") +
                      "clock advance 8d\nreconcile --once\nclock advance 2d\nreconcile --ticks 3\n";
  std::string exports[2];
  std::string transcripts[2];
  for (int i = 0; i < 2; ++i) {
    auto w = fresh_world(42);
    auto t = run_scenario(w, script);
    ASSERT_TRUE(t);
    transcripts[i] = t->render();
    exports[i] = w.export_canonical();
  }
  EXPECT_EQ(exports[0], exports[1]);
  EXPECT_EQ(transcripts[0], transcripts[1]);

  auto other = fresh_world(43);
  ASSERT_TRUE(run_scenario(other, script));
  EXPECT_NE(other.export_canonical(), exports[0]);
}

TEST(Determinism, ImportedWorldsEvolveIdentically) {
  auto a = load(json::parse(fixture()));
  auto b = load(json::parse(fixture()));
  for (auto* w : {&a, &b}) {
    ASSERT_TRUE(w->advance_clock(Duration::of_days(7)));
    w->reconcile_once();
  }
  EXPECT_EQ(a.export_canonical(), b.export_canonical());
}

}  // namespace
}  // namespace mirrorplane
