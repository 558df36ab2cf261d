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

// Python bindings. Structured values cross the boundary as JSON and are
// decoded with the standard json module, so Python sees plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "mirrorplane/commands.hpp"
#include "mirrorplane/onboarder.hpp"
#include "mirrorplane/world.hpp"

namespace py = pybind11;
using namespace mirrorplane;

namespace {

class MirrorplaneError : public std::runtime_error {
 public:
  explicit MirrorplaneError(const Error& e) : std::runtime_error(e.message()) {}
};

template <typename T>
T unwrap(Result<T> r) {
  if (!r) throw MirrorplaneError(r.error());
  return std::move(*r);
}

void unwrap(const Status& s) {
  if (!s) throw MirrorplaneError(s.error());
}

py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json token_json(const Token& t) {
  return {{"token_id", t.token_id},
          {"subject", t.subject},
          {"minted_from", t.minted_from ? nlohmann::json(*t.minted_from) : nlohmann::json()},
          {"issued_at", t.issued_at.minutes},
          {"via_actas", t.via_actas ? nlohmann::json(*t.via_actas) : nlohmann::json()}};
}

Duration to_duration(const py::object& value) {
  if (py::isinstance<py::int_>(value)) return Duration::of_minutes(value.cast<std::int64_t>());
  return unwrap(parse_duration(value.cast<std::string>()));
}

ReconcileConfig config_from(const py::object& config) {
  ReconcileConfig c;
  if (config.is_none()) return c;
  const auto text = py::module_::import("json").attr("dumps")(config).cast<std::string>();
  unwrap(c.merge_json(nlohmann::json::parse(text), ""));
  unwrap(c.validate());
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulated hybrid-cloud identity control plane";
  py::register_exception<MirrorplaneError>(m, "MirrorplaneError", PyExc_RuntimeError);

  m.def(
      "map_hdfs_path", [](const std::string& path) { return unwrap(map_hdfs_path(path)); },
      py::arg("path"), "Maps /<dc>/<cluster>/user/<name>/... onto gs://user.<name>.dp.domain/...");
  m.def(
      "parse_duration",
      [](const std::string& text) { return unwrap(parse_duration(text)).minutes; }, py::arg("text"),
      "Duration in logical minutes; accepts 90, 15m, 36h and 7d.");

  py::class_<World>(m, "World")
      .def(py::init([](std::uint64_t seed, const py::object& config) {
             return unwrap(World::create(seed, config_from(config)));
           }),
           py::arg("seed") = 1, py::arg("config") = py::none())
      .def_static(
          "from_json",
          [](const std::string& text) { return unwrap(World::import_canonical(text)); },
          py::arg("text"))
      .def(
          "export",
          [](const World& w, bool reveal_secrets) { return w.export_canonical(reveal_secrets); },
          py::arg("reveal_secrets") = true)
      .def_property_readonly("now", [](const World& w) { return w.now().minutes; })
      .def_property_readonly("seed", &World::seed)
      .def(
          "execute",
          [](World& w, const std::string& line) {
            auto out = execute_line(w, line, ExecOptions{.allow_files = false});
            return py::make_tuple(out.exit_code, out.text);
          },
          py::arg("line"), "Runs one command line; returns (exit_code, text).")
      .def(
          "run_scenario",
          [](World& w, const std::string& script, bool strict) {
            auto t = unwrap(run_scenario(w, script, strict));
            py::list entries;
            for (const auto& e : t.entries) {
              py::dict d;
              d["line"] = e.line;
              d["command"] = e.command;
              d["exit_code"] = e.output.exit_code;
              d["text"] = e.output.text;
              entries.append(d);
            }
            py::dict out;
            out["exit_code"] = t.exit_code();
            out["entries"] = entries;
            out["aborted_at_line"] = t.aborted_at_line;
            out["transcript"] = t.render();
            return out;
          },
          py::arg("script"), py::arg("strict") = false)
      .def(
          "reconcile",
          [](World& w, std::size_t ticks) {
            py::list reports;
            for (const auto& r : w.reconcile_ticks(ticks)) reports.append(to_py(r.to_json()));
            return reports;
          },
          py::arg("ticks") = 1, "Runs reconcile ticks and returns their reports.")
      .def(
          "advance_clock",
          [](World& w, const py::object& by) {
            unwrap(w.advance_clock(to_duration(by)));
            return w.now().minutes;
          },
          py::arg("by"))
      .def(
          "provision_bucket",
          [](World& w, const std::string& principal) {
            return unwrap(w.provision_bucket(principal)).bucket_id;
          },
          py::arg("principal"))
      .def("sync_reader_groups", [](World& w) { return w.sync_reader_groups().changed(); })
      .def(
          "authenticate",
          [](World& w, const std::string& caller, const std::string& email) {
            return to_py(token_json(unwrap(w.authenticate(caller, email))));
          },
          py::arg("caller"), py::arg("account_email"))
      .def(
          "impersonate",
          [](World& w, const std::string& workspace, const std::string& email) {
            return to_py(token_json(unwrap(w.impersonate(workspace, email))));
          },
          py::arg("workspace_identity"), py::arg("account_email"))
      .def(
          "authorize",
          [](World& w, const std::string& token_id, const std::string& bucket,
             const std::string& action) {
            return unwrap(w.authorize(token_id, bucket, unwrap(parse_action(action)))).to_string();
          },
          py::arg("token_id"), py::arg("bucket"), py::arg("action"))
      .def(
          "verify",
          [](const World& w, bool converged) {
            auto list = nlohmann::json::array();
            for (const auto& v :
                 verify(w, converged ? VerifyMode::Converged : VerifyMode::Safety)) {
              list.push_back(to_json(v));
            }
            return to_py(list);
          },
          py::arg("converged") = false)
      .def(
          "audit",
          [](const World& w, std::optional<std::string> actor, std::optional<std::string> action,
             std::optional<std::string> target, std::optional<std::uint64_t> tick_id,
             std::optional<std::string> job_id) {
            AuditFilter f{actor, action, target, tick_id, job_id, std::nullopt, std::nullopt};
            auto list = nlohmann::json::array();
            for (const auto& e : w.audit().query(f)) list.push_back(to_json(e));
            return to_py(list);
          },
          py::kw_only(), py::arg("actor") = py::none(), py::arg("action") = py::none(),
          py::arg("target") = py::none(), py::arg("tick_id") = py::none(),
          py::arg("job_id") = py::none());
}
