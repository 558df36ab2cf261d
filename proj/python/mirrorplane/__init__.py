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

"""Python driver for the mirrorplane control-plane simulator."""

from ._core import MirrorplaneError, World, map_hdfs_path, parse_duration

__all__ = ["MirrorplaneError", "World", "map_hdfs_path", "parse_duration"]
__version__ = "0.1.0"
