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

// mirrorctl: drives a simulated control plane whose state lives in a JSON
// file between invocations.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "mirrorplane/commands.hpp"
#include "mirrorplane/world.hpp"

namespace mp = mirrorplane;

namespace {

mp::Result<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return mp::make_error(mp::Errc::IoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

mp::Result<mp::ReconcileConfig> load_config(const std::string& path, mp::ReconcileConfig base) {
  auto text = slurp(path);
  if (!text) return text.error();
  auto j = nlohmann::json::parse(*text, nullptr, false);
  if (j.is_discarded()) return mp::make_error(mp::Errc::ParseError, path + " is not valid JSON");
  if (auto st = base.merge_json(j, ""); !st) return st.error();
  if (auto st = base.validate(); !st) return st.error();
  return base;
}

int report(const mp::Error& e) {
  std::cerr << "error: " << e.message() << "\n";
  return mp::kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated hybrid-cloud identity control plane"};
  std::string state_path = "world.json";
  std::uint64_t seed = 1;
  std::string config_path;
  app.add_option("--state", state_path, "World state file (created if missing)");
  app.add_option("--seed", seed, "Seed for a newly created world");
  app.add_option("--config", config_path, "JSON reconciler configuration")
      ->check(CLI::ExistingFile);
  app.prefix_command();
  app.footer("Commands:\n" + mp::command_usage());
  CLI11_PARSE(app, argc, argv);
  const std::vector<std::string> command = app.remaining();

  if (command.empty()) {
    std::cout << app.help();
    return mp::kExitError;
  }

  auto parsed = mp::parse_command(command);
  if (!parsed) return report(parsed.error());

  mp::Result<mp::World> world = mp::make_error(mp::Errc::NotFound, state_path);
  if (std::filesystem::exists(state_path)) {
    auto text = slurp(state_path);
    if (!text) return report(text.error());
    world = mp::World::import_canonical(*text);
    if (!world) return report(world.error());
    if (!config_path.empty()) {
      auto config = load_config(config_path, world->config());
      if (!config) return report(config.error());
      if (auto st = world->set_config(*config); !st) return report(st.error());
    }
  } else {
    mp::ReconcileConfig config;
    if (!config_path.empty()) {
      auto loaded = load_config(config_path, config);
      if (!loaded) return report(loaded.error());
      config = *loaded;
    }
    world = mp::World::create(seed, config);
    if (!world) return report(world.error());
  }

  auto output = mp::execute(*world, *parsed);
  if (output.exit_code == mp::kExitError) {
    std::cerr << output.text;
  } else {
    std::cout << output.text;
  }

  std::ofstream out(state_path, std::ios::binary | std::ios::trunc);
  if (!out) return report(mp::Error{mp::Errc::IoError, "cannot write " + state_path});
  out << world->export_canonical(true);
  return output.exit_code;
}
