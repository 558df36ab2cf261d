# Copyright 2026 The Mirrorplane Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import os
import pathlib

import pytest

import mirrorplane
from mirrorplane import MirrorplaneError, World

ROOT = pathlib.Path(os.environ.get("MIRRORPLANE_SOURCE_DIR", pathlib.Path(__file__).parents[2]))
HELEN = "helen-mirror@service-accounts-project.iam.gserviceaccount.com"
POSTS = "posts-analyze-mirror@service-accounts-project.iam.gserviceaccount.com"


def walkthrough_world(seed=1):
    world = World(seed)
    result = world.run_scenario((ROOT / "scenarios" / "partly-cloudy.txt").read_text(), strict=True)
    assert result["exit_code"] == 0, result["transcript"]
    return world


def test_walkthrough_matches_golden_fixture():
    world = walkthrough_world()
    fixture = (ROOT / "tests" / "fixtures" / "partly-cloudy.json").read_text()
    assert world.export() == fixture
    assert World.from_json(fixture).verify(converged=True) == []


def test_execute_returns_exit_code_and_text():
    world = World(3)
    code, _ = world.execute("dir add-group mirror-account-users")
    assert code == 0
    code, text = world.execute("dir add-group mirror-account-users")
    assert code == 1 and "DuplicateName" in text
    code, text = world.execute("dir join nowhere nobody")
    assert code == 1 and text.startswith("error: ")
    code, text = world.execute("state export /tmp/should-not-exist.json")
    assert code == 1


def test_access_decisions():
    world = walkthrough_world()
    token = world.authenticate("posts-analyze", POSTS)
    assert token["subject"] == POSTS and token["via_actas"] is None
    assert world.authorize(token["token_id"], "user.posts-analyze.dp.domain", "write") == "Allow(Owner)"
    assert world.authorize(token["token_id"], "user.helen.dp.domain", "write") == "Deny(NotAuthorized)"
    actas = world.impersonate("helen", HELEN)
    assert actas["via_actas"] == "helen"
    assert world.authorize(actas["token_id"], "gs://user.posts-analyze.dp.domain", "read") == "Allow(ReaderGroup)"
    with pytest.raises(MirrorplaneError, match="PermissionDenied"):
        world.authenticate("helen", POSTS)
    with pytest.raises(MirrorplaneError, match="PermissionDenied"):
        world.impersonate("helen", POSTS)
    with pytest.raises(MirrorplaneError, match="UnknownBucket"):
        world.authorize(token["token_id"], "user.nobody.dp.domain", "read")


def test_rotation_through_the_clock():
    world = walkthrough_world()
    assert world.advance_clock("7d") == 7 * 24 * 60
    (report,) = world.reconcile()
    assert len(report["rotated"]) == 2
    reports = world.reconcile(ticks=2)
    assert len(reports) == 2 and not reports[0]["rotated"]
    assert world.verify() == []


def test_audit_query_and_round_trip():
    world = walkthrough_world()
    decisions = world.audit(actor=POSTS, action="authz.authorize*")
    assert decisions and all(e["actor"] == POSTS for e in decisions)
    seqs = [e["seq"] for e in world.audit()]
    assert seqs == list(range(1, len(seqs) + 1))
    text = world.export()
    assert World.from_json(text).export() == text
    redacted = json.loads(world.export(reveal_secrets=False))
    secrets = {v["secret"] for e in redacted["vault"]["entries"].values() for v in e["versions"]}
    assert secrets == {"<redacted>"}


def test_helpers_and_errors():
    assert mirrorplane.map_hdfs_path("/dc1/cluster1/user/helen/a/b") == "gs://user.helen.dp.domain/a/b"
    assert mirrorplane.parse_duration("36h") == 36 * 60
    with pytest.raises(MirrorplaneError, match="UnmappablePath"):
        mirrorplane.map_hdfs_path("/tmp/scratch")
    with pytest.raises(MirrorplaneError):
        World(1, {"rotation_age": "5m"})
    assert World(1, {"rotation_age": "3d"}).execute("config show")[1].count("4320") == 1
    with pytest.raises(MirrorplaneError, match="SchemaError"):
        World.from_json("{}")
