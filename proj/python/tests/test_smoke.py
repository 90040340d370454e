# Copyright 2026 The dflin Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os
import sys

import numpy as np
import pytest

_module_dir = os.environ.get("DFLIN_MODULE_DIR")
if _module_dir:
    sys.path.insert(0, _module_dir)

try:
    import _dflin as dflin
except ImportError:  # installed package layout
    import dflin


def test_preset_names():
    assert "unicycle" in dflin.preset_names()


def test_flat_coordinates_roundtrip():
    xi0 = np.array([0.5, 0.2, 0.1, 0.2, 0.0])
    z0 = dflin.phi("unicycle", xi0)
    assert np.allclose(z0, [0.46, 0.2, 0.1, 0.2, 0.0], atol=1e-14)
    assert np.allclose(dflin.phi_inv("unicycle", z0), xi0, atol=1e-10)


def test_verify_linearization():
    rep = dflin.verify_linearization("unicycle")
    assert rep["passed"]
    assert rep["max_dynamics_residual"] <= 1e-9
    assert rep["max_input_residual"] <= 1e-9


def test_linearity_residual_is_exact():
    assert dflin.linearity_residual("unicycle", h=1e-2, steps=1000) <= 1e-9


def test_simulation_stabilizes_with_small_error():
    out = dflin.simulate("unicycle", lifted=True, h=1e-2, T=10.0)
    assert out["states"].shape == (1001, 5)
    assert out["controls"].shape == (1000, 2)
    assert 1e-3 <= out["max_error"] <= 1e-1
    assert out["final_norm_ratio"] <= 0.05


def test_audit_verdicts():
    euler = dflin.grizzle_audit("unicycle", lifted=False)
    assert euler["verdict"] == "NOT-LINEARIZABLE"
    assert euler["failing_stage"] == "Delta_1 + K involutive"
    lifted = dflin.grizzle_audit("unicycle", lifted=True)
    assert lifted["verdict"] == "LINEARIZABLE-CONSISTENT"


def test_static_fl_claims():
    assert not dflin.static_fl_check("unicycle", extended=False)["linearizable"]
    assert dflin.static_fl_check("unicycle", extended=True)["linearizable"]


def test_order_estimate():
    est = dflin.order_estimate("unicycle", lifted=True)
    assert 0.8 <= est["slope"] <= 1.2


def test_map_axioms():
    for kind in ("explicit-euler", "implicit-euler", "midpoint"):
        assert dflin.check_map_axioms(kind)["passed"]
    assert dflin.check_map_axioms("explicit-euler", lifted=True)["passed"]


def test_unknown_preset_raises():
    with pytest.raises(Exception):
        dflin.phi("rocket", np.zeros(5))
