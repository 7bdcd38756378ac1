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

import math

import pytest

import leakstack as ls


def test_version():
    assert ls.__version__


def test_closed_form_coupling_matches_frozen_value():
    net = ls.CapacitanceNetwork(11.0, 20.0, 140.0, 150.0, 0.04)
    c = ls.closed_form_couplings(net, ls.CouplingTopology.Asymmetric, 4.2, 5.5)
    assert c["g_qc"] == pytest.approx(0.11375534175491618546, rel=1e-12)
    assert c["g_cc_direct"] == pytest.approx(0.014817989417989417989, rel=1e-12)


def test_maxwell_couplings_same_sign_and_order():
    net = ls.CapacitanceNetwork(11.0, 20.0, 140.0, 150.0, 0.04)
    closed = ls.closed_form_couplings(net, ls.CouplingTopology.Asymmetric, 4.2, 5.5)
    exact = ls.maxwell_couplings(net, ls.CouplingTopology.Asymmetric, 4.2, 5.5)
    assert exact["g_qc"] == pytest.approx(closed["g_qc"], rel=0.25)


def test_negative_capacitance_rejected():
    with pytest.raises(ValueError):
        ls.CapacitanceNetwork(-1.0, 20.0, 140.0, 150.0)


def test_parametric_coupling_bessel():
    g = ls.effective_parametric_coupling(1, 0.5, 1.0, 1, 0.1)
    assert g == pytest.approx(0.1 * 0.2422684576748739, rel=1e-12)
    assert ls.effective_parametric_coupling(2, 0.0, 1.0, 1, 0.1) == 0.0
    # Same law with the plain modulation index agrees at m = 1.
    assert ls.sideband_coupling(1, 0.5, 1.0, 1, 0.1) == pytest.approx(g, rel=1e-12)


def test_device_loads_and_round_trips():
    d = ls.load_device(ls.DEFAULT_CONFIG)
    labels = [q["label"] for q in d.qubits]
    assert {"D1", "A", "D2"} <= set(labels)
    assert d.qubit("A")["alpha"] < 0
    assert ls.parse_device(d.serialize()) == d
    f01 = d.transition_frequency("A", 0, 1)
    f12 = d.transition_frequency("A", 1, 2)
    assert f12 < f01


def test_missing_config_raises():
    with pytest.raises(ls.ConfigError):
        ls.load_device("no_such_device_config")


def test_rb_fit_exact():
    m = [1, 10, 20, 40, 80, 120]
    F = [0.5 * 0.99**k + 0.5 for k in m]
    fit = ls.fit_rb(m, F)
    assert fit["p"] == pytest.approx(0.99, abs=1e-9)
    assert fit["r"] == pytest.approx(0.005, abs=1e-9)


def test_markov_steady_state():
    assert ls.markov_steady_state(0.01, 0.09) == pytest.approx(0.1)


def test_stabilizer_noise_free_shape_and_determinism():
    a = ls.run_stabilizer(ls.DEFAULT_CONFIG, cycles=5, shots=500, seed=3)
    b = ls.run_stabilizer(ls.DEFAULT_CONFIG, cycles=5, shots=500, seed=3, workers=3)
    assert a == b
    assert a["qubits"] == ["D1", "A", "D2"]
    assert len(a["detection"]) == 5
    assert all(len(p) == 6 for p in a["P_f"])
    assert all(0.0 <= x <= 1.0 for x in a["detection"])


def test_classify_synthetic_tail_error():
    r = ls.classify_synthetic([(0.0, 0.0), (4.0, 0.0)], 1.0, shots_per_state=8192, seed=5)
    expected = 0.5 * math.erfc(2.0 / math.sqrt(2.0))
    for pii in r["P_ii"]:
        assert 1 - pii == pytest.approx(expected, abs=4 * math.sqrt(expected / 8192))
    assert r["epsilon_n"] == pytest.approx(expected, abs=0.005)
