# Copyright 2026 The k06sim Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the k06 three-stage protocol simulator."""

from ._core import (
    ConfigDomainError,
    ConfigParseError,
    Session,
    TruncationError,
    correlate,
    digest,
    leakage_vs_n,
    oracle,
    run_scenario,
    sweep,
    wilson_interval,
)

__all__ = [
    "ConfigDomainError",
    "ConfigParseError",
    "Session",
    "TruncationError",
    "correlate",
    "digest",
    "leakage_vs_n",
    "oracle",
    "run_scenario",
    "sweep",
    "wilson_interval",
]
