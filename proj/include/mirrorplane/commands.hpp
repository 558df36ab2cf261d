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

// Text command surface shared by the mirrorctl binary, scenario scripts
// and the Python module. A command is a subcommand path ("dir add-user")
// followed by positionals and --flags.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorplane/result.hpp"
#include "mirrorplane/world.hpp"

namespace mirrorplane {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitViolations = 2 };

struct CommandSpec;

struct ParsedCommand {
  const CommandSpec* spec = nullptr;
  std::vector<std::string> positionals;
  std::map<std::string, std::string, std::less<>> flags;  // boolean flags map to ""

  std::string_view name() const;
  bool has(std::string_view flag) const { return flags.contains(flag); }
  std::optional<std::string> flag(std::string_view name) const;
};

struct CommandOutput {
  int exit_code = kExitOk;
  std::string text;
};

/// Splits on whitespace; double quotes group words.
Result<std::vector<std::string>> tokenize(std::string_view line);

Result<ParsedCommand> parse_command(const std::vector<std::string>& args);

/// One line per command: "dir add-user <name> [--headless] ...".
std::string command_usage();

struct ExecOptions {
  /// File-touching commands (state export/import, scenario run) are only
  /// available from the command line, never from inside a script.
  bool allow_files = true;
};

CommandOutput execute(World& world, const ParsedCommand& command, const ExecOptions& options = {});

/// Tokenize + parse + execute. Parse failures come back as exit code 1.
CommandOutput execute_line(World& world, std::string_view line, const ExecOptions& options = {});

struct TranscriptEntry {
  std::size_t line = 0;
  std::string command;
  CommandOutput output;
};

struct Transcript {
  std::vector<TranscriptEntry> entries;
  /// Set when a strict run stopped at a failing command.
  std::optional<std::size_t> aborted_at_line;

  int exit_code() const;
  std::string render() const;
};

/// Parses the whole script first (ParseError names the line), then applies
/// commands in order. Command failures are recorded and the run continues
/// unless `strict`.
Result<Transcript> run_scenario(World& world, std::string_view script, bool strict = false);

}  // namespace mirrorplane
