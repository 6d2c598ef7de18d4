# Copyright 2026 The phq Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Photonic QUBO annealing simulator.

States are bit strings, most significant bit first ("0110").  Structured
values (topologies, configs, reports) are plain dicts in the same layout as
the JSON files written by the ``phq`` tool.
"""

from ._core import (
    PhqError,
    apply_noise,
    brute_force_min,
    build_topology,
    compose_unitary,
    cost,
    cost_from_readout,
    decompose,
    default_config,
    derive_seed,
    fidelity,
    homodyne_readout,
    mzi_transfer,
    problem_from_transform,
    resolution_from_db,
    run_campaign,
    scale_factor,
    snr_and_resolution,
    solve_and_export,
    timing_report,
    unitarity_error,
    version,
    voltages_to_phases,
    wrong_acceptance_fraction,
)

__version__ = version()
