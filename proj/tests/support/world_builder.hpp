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

#include <gtest/gtest.h>

#include <string>
#include <string_view>

#include "mirrorplane/commands.hpp"
#include "mirrorplane/world.hpp"

namespace testing_support {

inline mirrorplane::World fresh_world(std::uint64_t seed = 7,
                                      mirrorplane::ReconcileConfig config = {}) {
  auto w = mirrorplane::World::create(seed, std::move(config));
  if (!w) throw std::runtime_error(w.error().message());
  return std::move(*w);
}

/// Runs one command line and fails the current test if it does not exit 0.
inline std::string run(mirrorplane::World& w, std::string_view line) {
  auto out = mirrorplane::execute_line(w, line);
  EXPECT_EQ(out.exit_code, mirrorplane::kExitOk) << line << "\n" << out.text;
  return out.text;
}

inline std::string mirror_of(std::string_view principal,
                             std::string_view project = "service-accounts-project") {
  return std::string(principal) + "-mirror@" + std::string(project) + ".iam.gserviceaccount.com";
}

/// Adds a principal with a home directory and puts it in the source group.
inline void enroll(mirrorplane::World& w, const std::string& name, bool human,
                   const std::string& ou = "general") {
  if (!w.directory().has_group(mirrorplane::kSourceGroup)) {
    run(w, "dir add-group mirror-account-users");
  }
  run(w, "dir add-user " + name + (human ? " --human" : " --headless") +
             " --home /dc1/cluster1/user/" + name + " --ou " + ou);
  run(w, "dir join mirror-account-users " + name);
}

}  // namespace testing_support
