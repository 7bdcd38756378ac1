# Copyright 2026 The leakstack Authors
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

"""Python bindings for the leakstack simulator."""

import os as _os
import pathlib as _pathlib

# Bare config names such as "paper_device" resolve against the bundled data.
_DATA = _pathlib.Path(__file__).parent / "data"
if _DATA.is_dir():
    _os.environ.setdefault("LEAKSTACK_CONFIG_DIR", str(_DATA))

from ._leakstack import (  # noqa: E402
    CapacitanceNetwork,
    ConfigError,
    CouplingTopology,
    Device,
    NumericalError,
    __version__,
    classify_synthetic,
    closed_form_couplings,
    effective_parametric_coupling,
    fit_rb,
    load_device,
    markov_steady_state,
    maxwell_couplings,
    parse_device,
    run_stabilizer,
    sideband_coupling,
)

DEFAULT_CONFIG = "paper_device"

__all__ = [
    "CapacitanceNetwork",
    "ConfigError",
    "CouplingTopology",
    "DEFAULT_CONFIG",
    "Device",
    "NumericalError",
    "__version__",
    "classify_synthetic",
    "closed_form_couplings",
    "effective_parametric_coupling",
    "fit_rb",
    "load_device",
    "markov_steady_state",
    "maxwell_couplings",
    "parse_device",
    "run_stabilizer",
    "sideband_coupling",
]
