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

#include "mirrorplane/commands.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace mirrorplane {

using nlohmann::json;

struct FlagSpec {
  std::string_view name;
  bool takes_value;
};

struct CommandSpec {
  std::string_view path;  // one or two words
  std::size_t min_positionals;
  std::size_t max_positionals;  // SIZE_MAX for variadic
  std::vector<FlagSpec> flags;
  std::string_view usage;
  bool touches_files = false;
};

namespace {

constexpr std::size_t kMany = static_cast<std::size_t>(-1);

const std::vector<CommandSpec>& specs() {
  // clang-format off
  static const std::vector<CommandSpec> table = {
      {"dir add-user", 1, 1, {{"headless", false}, {"human", false}, {"home", true}, {"ou", true}},
       "dir add-user <name> [--human|--headless] [--home <hdfs path>] [--ou <org unit>]"},
      {"dir add-group", 1, 1, {}, "dir add-group <group>"},
      {"dir join", 2, 2, {}, "dir join <group> <principal>"},
      {"dir leave", 2, 2, {}, "dir leave <group> <principal>"},
      {"dir remove", 1, 1, {}, "dir remove <principal>"},
      {"dir show", 0, 1, {}, "dir show [principal|group]"},
      {"cloud tree", 0, 0, {}, "cloud tree"},
      {"cloud show", 1, 1, {}, "cloud show <id|email|gs://bucket>"},
      {"cloud set-quota", 2, 2, {}, "cloud set-quota <project> <n>"},
      {"vault ls", 0, 0, {}, "vault ls"},
      {"vault read", 1, 1, {{"as", true}, {"reveal", false}},
       "vault read --as <principal> <email> [--reveal]"},
      {"vault modify", 1, 1, {{"as", true}}, "vault modify --as <principal> <email>"},
      {"reconcile", 0, 0, {{"once", false}, {"ticks", true}}, "reconcile --once | --ticks <n>"},
      {"decommission", 1, 1, {}, "decommission <principal>"},
      {"clock advance", 1, 1, {}, "clock advance <duration: 90 | 15m | 36h | 7d>"},
      {"clock show", 0, 0, {}, "clock show"},
      {"report last", 0, 0, {}, "report last"},
      {"onboard bucket", 1, 1, {}, "onboard bucket <principal>"},
      {"onboard sync-readers", 0, 0, {}, "onboard sync-readers"},
      {"onboard map-path", 1, 1, {}, "onboard map-path <hdfs path>"},
      {"readers join", 2, 2, {}, "readers join <bucket> <principal>"},
      {"readers leave", 2, 2, {}, "readers leave <bucket> <principal>"},
      {"authz token", 1, 1, {{"as", true}}, "authz token --as <principal> <email>"},
      {"authz impersonate", 1, 1, {{"as", true}},
       "authz impersonate --as <workspace identity> <email>"},
      {"authz check", 3, 3, {}, "authz check <token> <bucket> <read|write>"},
      {"authz job", 3, kMany, {{"as", true}},
       "authz job --as <principal|user:<name>> <email> <read|write> <path> "
       "[<read|write> <path>...]"},
      {"audit tail", 0, 1, {}, "audit tail [n]"},
      {"audit query", 0, 0,
       {{"actor", true}, {"action", true}, {"target", true}, {"tick", true}, {"job", true},
        {"from", true}, {"to", true}},
       "audit query [--actor a] [--action verb|prefix*] [--target t] [--tick n] [--job id] "
       "[--from seq] [--to seq]"},
      {"verify", 0, 0, {{"format", true}, {"converged", false}},
       "verify [--format text|json] [--converged]"},
      {"config set", 2, 2, {}, "config set <key> <value>"},
      {"config show", 0, 0, {}, "config show"},
      {"state export", 1, 1, {{"reveal-secrets", false}},
       "state export <path> [--reveal-secrets]", true},
      {"state import", 1, 1, {}, "state import <path>", true},
      {"scenario run", 1, 1, {{"strict", false}}, "scenario run <script> [--strict]", true},
  };
  // clang-format on
  return table;
}

std::string join_words(const std::vector<std::string>& words, std::size_t from = 0) {
  std::string out;
  for (std::size_t i = from; i < words.size(); ++i) {
    if (i > from) out += ' ';
    out += words[i];
  }
  return out;
}

Result<std::int64_t> parse_int(std::string_view text, std::string_view what) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    return make_error(Errc::InvalidArgument, std::string(what) + " must be an integer");
  }
  return value;
}

CommandOutput ok(std::string text) { return {kExitOk, std::move(text)}; }

CommandOutput fail(const Error& e) { return {kExitError, "error: " + e.message() + "\n"}; }

std::string describe(const PrincipalRecord& p) {
  std::string out = p.name + " kind=" + std::string(to_string(p.kind)) +
                    " workspace=" + (p.has_workspace_identity ? "true" : "false") +
                    " ou=" + p.org_unit;
  if (p.hdfs_home) out += " home=" + *p.hdfs_home;
  out += " created_at=" + std::to_string(p.created_at.minutes);
  return out + "\n";
}

std::string describe(const DirectoryGroup& g) {
  return g.name + ": [" + join_words(g.members) + "]\n";
}

std::string describe(const ReconcileReport& r) {
  std::ostringstream out;
  out << "tick " << r.tick_id << " @" << r.at.minutes << "m";
  if (r.aborted) {
    out << ": aborted " << r.aborted->message() << "\n";
    return out.str();
  }
  out << ": created=" << r.created.size() << " rotated=" << r.rotated.size()
      << " actas=" << r.actas_granted.size() << " decommissioned=" << r.decommissioned.size()
      << " rejected=" << r.rejected.size() << " errors=" << r.errors.size()
      << " expired=" << r.expired.size() << "\n";
  for (const auto& c : r.created) out << "  created " << c.principal << " -> " << c.email << "\n";
  for (const auto& k : r.rotated) {
    out << "  rotated " << k.email << " " << k.retired_key_id.value_or("-") << " -> "
        << k.new_key_id << "\n";
  }
  for (const auto& g : r.actas_granted) {
    out << "  actas user:" << g.workspace_identity << " -> " << g.email << "\n";
  }
  for (const auto& d : r.decommissioned) {
    out << "  decommissioned " << d.principal << " " << d.email << " keys=" << d.keys_invalidated
        << "\n";
  }
  for (const auto& x : r.rejected) {
    out << "  rejected " << x.principal << " " << to_string(x.reason) << "\n";
  }
  for (const auto& e : r.errors)
    out << "  error " << e.principal << " " << e.error.message() << "\n";
  for (const auto& t : r.expired) out << "  expired " << t.key_id << " " << t.account_email << "\n";
  return out.str();
}

std::string describe(const Token& t) {
  std::string out = t.token_id + " subject=" + t.subject;
  if (t.minted_from) out += " key=" + *t.minted_from;
  if (t.via_actas) out += " via_actas=" + *t.via_actas;
  return out + "\n";
}

std::string describe_events(const std::vector<AuditEvent>& events) {
  std::string out;
  for (const auto& e : events) out += to_json(e).dump() + "\n";
  return out;
}

Result<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return make_error(Errc::IoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Status write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return make_error(Errc::IoError, "cannot write " + path);
  out << text;
  if (!out) return make_error(Errc::IoError, "short write to " + path);
  return {};
}

// ---------------------------------------------------------------------------
// Handlers

CommandOutput dir_command(World& w, const ParsedCommand& c) {
  const auto name = c.name();
  const auto& pos = c.positionals;
  if (name == "dir add-user") {
    if (c.has("human") && c.has("headless")) {
      return fail(make_error(Errc::InvalidArgument, "--human and --headless are exclusive"));
    }
    auto kind = c.has("headless") ? PrincipalKind::Headless : PrincipalKind::Human;
    auto r = w.directory().add_principal(pos[0], kind, c.flag("home"), c.flag("ou"), w.scope());
    return r ? ok(describe(*r)) : fail(r.error());
  }
  if (name == "dir add-group") {
    auto r = w.directory().add_group(pos[0], w.scope());
    return r ? ok(describe(*r)) : fail(r.error());
  }
  if (name == "dir join" || name == "dir leave") {
    auto r = name == "dir join" ? w.directory().join_group(pos[0], pos[1], w.scope())
                                : w.directory().leave_group(pos[0], pos[1], w.scope());
    return r ? ok(describe(*r)) : fail(r.error());
  }
  if (name == "dir remove") {
    auto r = w.directory().remove_principal(pos[0], w.scope());
    if (!r) return fail(r.error());
    return ok("removed " + r->principal.name + " groups=[" + join_words(r->groups_left) + "]\n");
  }
  // dir show
  if (!pos.empty()) {
    if (const auto* p = w.directory().find(pos[0])) return ok(describe(*p));
    if (const auto* g = w.directory().group(pos[0])) return ok(describe(*g));
    return fail(make_error(Errc::NotFound, pos[0]));
  }
  std::string out;
  for (const auto& [n, p] : w.directory().principals()) out += describe(p);
  for (const auto& [n, g] : w.directory().groups()) out += describe(g);
  return ok(out);
}

CommandOutput cloud_command(World& w, const ParsedCommand& c) {
  const auto name = c.name();
  const auto& pos = c.positionals;
  if (name == "cloud tree") return ok(w.cloud().render_tree());
  if (name == "cloud show") {
    auto r = w.cloud().lookup(pos[0]);
    if (!r) return fail(r.error());
    json j{{"id", r->node->id},
           {"kind", to_string(r->node->kind)},
           {"parent", r->node->parent ? json(*r->node->parent) : json(nullptr)}};
    j["bindings"] = json::array();
    for (const auto& b : r->node->bindings) {
      j["bindings"].push_back(
          json{{"role", to_string(b.role)}, {"principal", b.principal.to_string()}});
    }
    if (r->account) {
      j["account"] = json{{"source_principal", r->account->source_principal},
                          {"status", to_string(r->account->status)}};
    }
    if (auto q = w.cloud().quota(r->node->id)) {
      j["quota"] = json{{"max_service_accounts", q->max_service_accounts},
                        {"current_count", q->current_count}};
    }
    return ok(j.dump(2) + "\n");
  }
  // cloud set-quota
  auto n = parse_int(pos[1], "quota");
  if (!n) return fail(n.error());
  auto st = w.cloud().set_quota(pos[0], *n, w.scope());
  return st ? ok(pos[0] + " quota=" + pos[1] + "\n") : fail(st.error());
}

CommandOutput vault_command(World& w, const ParsedCommand& c) {
  const auto name = c.name();
  if (name == "vault ls") {
    std::string out;
    for (const auto& [email, e] : w.vault().entries()) {
      out += email + " owner=" + e.owner_principal;
      for (const auto& v : e.versions)
        out += " " + v.key_id + ":" + std::string(to_string(v.state));
      out += "\n";
    }
    return ok(out);
  }
  auto caller = c.flag("as");
  if (!caller) return fail(make_error(Errc::InvalidArgument, "--as <principal> is required"));
  if (name == "vault modify") {
    auto st = w.vault().modify_key(c.positionals[0], *caller, w.scope());
    return fail(st.error());
  }
  auto r = w.vault().read_key(c.positionals[0], *caller, w.scope());
  if (!r) return fail(r.error());
  return ok(r->key_id + " state=" + std::string(to_string(r->state)) +
            " created_at=" + std::to_string(r->created_at.minutes) +
            (c.has("reveal") ? " secret=" + r->secret : std::string()) + "\n");
}

CommandOutput reconcile_command(World& w, const ParsedCommand& c) {
  if (c.has("once") == c.has("ticks")) {
    return fail(make_error(Errc::InvalidArgument, "exactly one of --once or --ticks <n>"));
  }
  std::size_t n = 1;
  if (auto ticks = c.flag("ticks")) {
    auto parsed = parse_int(*ticks, "--ticks");
    if (!parsed) return fail(parsed.error());
    if (*parsed < 1) return fail(make_error(Errc::InvalidArgument, "--ticks must be >= 1"));
    n = static_cast<std::size_t>(*parsed);
  }
  std::string out;
  for (const auto& r : w.reconcile_ticks(n)) out += describe(r);
  return ok(out);
}

CommandOutput onboard_command(World& w, const ParsedCommand& c) {
  const auto name = c.name();
  const auto& pos = c.positionals;
  if (name == "onboard bucket") {
    auto r = w.provision_bucket(pos[0]);
    if (!r) return fail(r.error());
    return ok(std::string(kBucketScheme) + r->bucket_id +
              " owner=" + w.cloud().active_mirror_of(pos[0])->email +
              " readers=" + reader_group_for(r->bucket_id) + "\n");
  }
  if (name == "onboard map-path") {
    auto r = map_hdfs_path(pos[0]);
    return r ? ok(*r + "\n") : fail(r.error());
  }
  if (name == "onboard sync-readers") {
    auto report = w.sync_reader_groups();
    std::string out;
    for (const auto& p : report.pairs) {
      out += reader_group_for(p.bucket_id) + ": +[" + join_words(p.added) + "] -[" +
             join_words(p.removed) + "] skipped=[" + join_words(p.skipped) + "]\n";
    }
    return ok(out);
  }
  auto r = name == "readers join"
               ? readers_join(pos[0], pos[1], w.directory(), w.cloud(), w.scope())
               : readers_leave(pos[0], pos[1], w.directory(), w.cloud(), w.scope());
  return r ? ok(describe(*r)) : fail(r.error());
}

CommandOutput authz_command(World& w, const ParsedCommand& c) {
  const auto name = c.name();
  const auto& pos = c.positionals;
  if (name == "authz check") {
    auto action = parse_action(pos[2]);
    if (!action) return fail(action.error());
    auto r = w.authorize(std::string_view(pos[0]), pos[1], *action);
    return r ? ok(r->to_string() + "\n") : fail(r.error());
  }
  auto caller = c.flag("as");
  if (!caller) return fail(make_error(Errc::InvalidArgument, "--as is required"));
  if (name == "authz token") {
    auto r = w.authenticate(*caller, pos[0]);
    return r ? ok(describe(*r)) : fail(r.error());
  }
  if (name == "authz impersonate") {
    auto r = w.impersonate(*caller, pos[0]);
    return r ? ok(describe(*r)) : fail(r.error());
  }
  // authz job
  if ((pos.size() - 1) % 2 != 0) {
    return fail(make_error(Errc::InvalidArgument, "job steps come in <action> <path> pairs"));
  }
  JobRequest request{*caller, pos[0], {}};
  for (std::size_t i = 1; i < pos.size(); i += 2) {
    auto action = parse_action(pos[i]);
    if (!action) return fail(action.error());
    request.steps.push_back(JobStep{pos[i + 1], *action});
  }
  auto r = w.submit_job(request);
  if (!r) return fail(r.error());
  std::string out =
      r->job_id + " token=" + r->token.token_id + " subject=" + r->token.subject + "\n";
  for (const auto& s : r->steps) {
    out += "  " + std::string(to_string(s.step.action)) + " " + s.step.path + " " +
           (s.decision ? s.decision->to_string() : "error: " + s.error->message()) + "\n";
  }
  return ok(out);
}

CommandOutput audit_command(World& w, const ParsedCommand& c) {
  if (c.name() == "audit tail") {
    std::size_t n = 10;
    if (!c.positionals.empty()) {
      auto parsed = parse_int(c.positionals[0], "n");
      if (!parsed) return fail(parsed.error());
      n = static_cast<std::size_t>(std::max<std::int64_t>(0, *parsed));
    }
    return ok(describe_events(w.audit().tail(n)));
  }
  AuditFilter filter;
  filter.actor = c.flag("actor");
  filter.action = c.flag("action");
  filter.target = c.flag("target");
  filter.job_id = c.flag("job");
  auto numeric = [&](std::string_view flag, std::optional<std::uint64_t>& out) -> Status {
    if (auto v = c.flag(flag)) {
      auto parsed = parse_int(*v, flag);
      if (!parsed) return parsed.error();
      out = static_cast<std::uint64_t>(*parsed);
    }
    return {};
  };
  for (auto [flag, slot] :
       {std::pair<std::string_view, std::optional<std::uint64_t>*>{"tick", &filter.tick_id},
        {"from", &filter.from_seq},
        {"to", &filter.to_seq}}) {
    if (auto st = numeric(flag, *slot); !st) return fail(st.error());
  }
  return ok(describe_events(w.audit().query(filter)));
}

CommandOutput verify_command(World& w, const ParsedCommand& c) {
  auto mode = c.has("converged") ? VerifyMode::Converged : VerifyMode::Safety;
  auto violations = verify(w, mode);
  const auto format = c.flag("format").value_or("text");
  std::string out;
  if (format == "json") {
    json arr = json::array();
    for (const auto& v : violations) arr.push_back(to_json(v));
    out = arr.dump(2) + "\n";
  } else if (format == "text") {
    for (const auto& v : violations) {
      out += std::string(to_string(v.kind)) + " " + v.subject + ": " + v.detail + "\n";
    }
    if (violations.empty()) out = "ok\n";
  } else {
    return fail(make_error(Errc::InvalidArgument, "--format must be text or json"));
  }
  return {violations.empty() ? kExitOk : kExitViolations, out};
}

CommandOutput config_command(World& w, const ParsedCommand& c) {
  if (c.name() == "config show") return ok(w.config().to_json().dump(2) + "\n");
  auto config = w.config();
  if (auto st = config.set(c.positionals[0], c.positionals[1]); !st) return fail(st.error());
  if (auto st = w.set_config(config); !st) return fail(st.error());
  return ok(c.positionals[0] + "=" + c.positionals[1] + "\n");
}

CommandOutput file_command(World& w, const ParsedCommand& c) {
  const auto name = c.name();
  const auto& path = c.positionals[0];
  if (name == "state export") {
    auto st = write_file(path, w.export_canonical(c.has("reveal-secrets")));
    return st ? ok("exported " + path + "\n") : fail(st.error());
  }
  auto text = read_file(path);
  if (!text) return fail(text.error());
  if (name == "state import") {
    auto imported = World::import_canonical(*text);
    if (!imported) return fail(imported.error());
    w = std::move(*imported);
    return ok("imported " + path + "\n");
  }
  // scenario run
  auto transcript = run_scenario(w, *text, c.has("strict"));
  if (!transcript) return fail(transcript.error());
  return {transcript->exit_code(), transcript->render()};
}

}  // namespace

std::string_view ParsedCommand::name() const { return spec->path; }

std::optional<std::string> ParsedCommand::flag(std::string_view flag_name) const {
  auto it = flags.find(flag_name);
  if (it == flags.end()) return std::nullopt;
  return it->second;
}

Result<std::vector<std::string>> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::string current;
  bool in_word = false;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
      in_word = true;
    } else if (!quoted && (ch == ' ' || ch == '\t' || ch == '\r')) {
      if (in_word) out.push_back(std::move(current));
      current.clear();
      in_word = false;
    } else {
      current += ch;
      in_word = true;
    }
  }
  if (quoted) return make_error(Errc::ParseError, "unterminated quote");
  if (in_word) out.push_back(std::move(current));
  return out;
}

Result<ParsedCommand> parse_command(const std::vector<std::string>& args) {
  if (args.empty()) return make_error(Errc::ParseError, "empty command");
  const CommandSpec* spec = nullptr;
  std::size_t consumed = 0;
  for (const auto& s : specs()) {
    const bool two_words = s.path.find(' ') != std::string_view::npos;
    if (two_words && args.size() >= 2 && args[0] + " " + args[1] == s.path) {
      spec = &s;
      consumed = 2;
      break;
    }
    if (!two_words && args[0] == s.path) {
      spec = &s;
      consumed = 1;
      break;
    }
  }
  if (spec == nullptr) {
    return make_error(Errc::ParseError, "unknown command '" + join_words(args) + "'");
  }
  ParsedCommand cmd;
  cmd.spec = spec;
  for (std::size_t i = consumed; i < args.size(); ++i) {
    const auto& arg = args[i];
    if (arg.size() > 2 && arg.starts_with("--")) {
      std::string flag_name = arg.substr(2);
      std::optional<std::string> inline_value;
      if (auto eq = flag_name.find('='); eq != std::string::npos) {
        inline_value = flag_name.substr(eq + 1);
        flag_name.resize(eq);
      }
      auto it = std::find_if(spec->flags.begin(), spec->flags.end(),
                             [&](const FlagSpec& f) { return f.name == flag_name; });
      if (it == spec->flags.end()) {
        return make_error(Errc::ParseError,
                          "unknown flag --" + flag_name + " for '" + std::string(spec->path) + "'");
      }
      if (it->takes_value) {
        if (inline_value) {
          cmd.flags[flag_name] = *inline_value;
        } else if (i + 1 < args.size()) {
          cmd.flags[flag_name] = args[++i];
        } else {
          return make_error(Errc::ParseError, "--" + flag_name + " needs a value");
        }
      } else {
        if (inline_value) return make_error(Errc::ParseError, "--" + flag_name + " takes no value");
        cmd.flags[flag_name] = "";
      }
    } else {
      cmd.positionals.push_back(arg);
    }
  }
  if (cmd.positionals.size() < spec->min_positionals ||
      (spec->max_positionals != kMany && cmd.positionals.size() > spec->max_positionals)) {
    return make_error(Errc::ParseError, "usage: " + std::string(spec->usage));
  }
  return cmd;
}

std::string command_usage() {
  std::string out;
  for (const auto& s : specs()) out += "  " + std::string(s.usage) + "\n";
  return out;
}

CommandOutput execute(World& world, const ParsedCommand& command, const ExecOptions& options) {
  const std::string_view name = command.name();
  if (command.spec->touches_files) {
    if (!options.allow_files) {
      return fail(make_error(Errc::ParseError, std::string(name) + " is not allowed in scripts"));
    }
    return file_command(world, command);
  }
  if (name.starts_with("dir ")) return dir_command(world, command);
  if (name.starts_with("cloud ")) return cloud_command(world, command);
  if (name.starts_with("vault ")) return vault_command(world, command);
  if (name == "reconcile") return reconcile_command(world, command);
  if (name == "decommission") {
    auto r = world.decommission(command.positionals[0]);
    if (!r) return fail(r.error());
    return ok("decommissioned " + r->principal + " " + r->email +
              " keys=" + std::to_string(r->keys_invalidated) + "\n");
  }
  if (name == "clock advance") {
    auto d = parse_duration(command.positionals[0]);
    if (!d) return fail(d.error());
    if (auto st = world.advance_clock(*d); !st) return fail(st.error());
    return ok("now=" + std::to_string(world.now().minutes) + "m\n");
  }
  if (name == "clock show") return ok("now=" + std::to_string(world.now().minutes) + "m\n");
  if (name == "report last") {
    if (!world.last_report()) return fail(make_error(Errc::NotFound, "no reconcile has run"));
    return ok(world.last_report()->to_json().dump(2) + "\n");
  }
  if (name.starts_with("onboard ") || name.starts_with("readers ")) {
    return onboard_command(world, command);
  }
  if (name.starts_with("authz ")) return authz_command(world, command);
  if (name.starts_with("audit ")) return audit_command(world, command);
  if (name == "verify") return verify_command(world, command);
  if (name.starts_with("config ")) return config_command(world, command);
  return fail(make_error(Errc::ParseError, "unhandled command " + std::string(name)));
}

CommandOutput execute_line(World& world, std::string_view line, const ExecOptions& options) {
  auto tokens = tokenize(line);
  if (!tokens) return fail(tokens.error());
  auto parsed = parse_command(*tokens);
  if (!parsed) return fail(parsed.error());
  return execute(world, *parsed, options);
}

int Transcript::exit_code() const {
  int worst = kExitOk;
  for (const auto& e : entries) {
    if (e.output.exit_code == kExitError) return kExitError;
    if (e.output.exit_code != kExitOk) worst = e.output.exit_code;
  }
  return worst;
}

std::string Transcript::render() const {
  std::string out;
  for (const auto& e : entries) {
    out += "> " + e.command + "\n" + e.output.text;
  }
  if (aborted_at_line) out += "aborted at line " + std::to_string(*aborted_at_line) + "\n";
  return out;
}

Result<Transcript> run_scenario(World& world, std::string_view script, bool strict) {
  struct Step {
    std::size_t line;
    std::string text;
    ParsedCommand command;
  };
  std::vector<Step> steps;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= script.size()) {
    auto end = script.find('\n', start);
    if (end == std::string_view::npos) end = script.size();
    auto line = script.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = tokenize(line);
    if (!tokens) {
      return make_error(Errc::ParseError,
                        "line " + std::to_string(line_no) + ": " + tokens.error().detail);
    }
    if (tokens->empty()) continue;
    auto parsed = parse_command(*tokens);
    if (!parsed) {
      return make_error(Errc::ParseError,
                        "line " + std::to_string(line_no) + ": " + parsed.error().detail);
    }
    if (parsed->spec->touches_files) {
      return make_error(Errc::ParseError, "line " + std::to_string(line_no) + ": " +
                                              std::string(parsed->name()) +
                                              " is not allowed in scripts");
    }
    steps.push_back(Step{line_no, join_words(*tokens), std::move(*parsed)});
  }

  Transcript transcript;
  const ExecOptions options{.allow_files = false};
  for (const auto& step : steps) {
    auto output = execute(world, step.command, options);
    const bool failed = output.exit_code != kExitOk;
    transcript.entries.push_back(TranscriptEntry{step.line, step.text, std::move(output)});
    if (failed && strict) {
      transcript.aborted_at_line = step.line;
      break;
    }
  }
  return transcript;
}

}  // namespace mirrorplane
