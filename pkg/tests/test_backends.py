import os
import subprocess
import sys

import numpy as np
import pytest

from carrollkit import _rk4_py, backend
from carrollkit.dynamics import integrate
from carrollkit.fields import LinearField2D, LinearField3D
from carrollkit.scenarios import EvolutionPoint, Scenario, Tag

pytestmark = pytest.mark.skipif(
    not backend.COMPILED, reason="compiled extension not available"
)


CASES = [
    # (tag code, params, field params, state)
    (0, [1.3, 0, 0, 0, 0, 0, 0], np.zeros(15), [0.1, 0.2, 0.3, -0.1, 0.4, 0.0]),
    (2, [2.0, 0.7, 0, 0, 0, 0, 0],
     np.concatenate([[0.3, -0.2, 0.1], np.zeros(12)]),
     [0.1, 0.2, 0.3, -0.1, 0.4, 0.0]),
    (3, [1.0, 0.4, 0.8, 0, 0, 0, 0.5],
     np.concatenate([[0.1, 0.0, -0.2], [0.0, 0.0, 1.5], 0.2 * np.eye(3).reshape(-1)]),
     [0.1, 0.2, 0.3, -0.1, 0.4, 0.0, 0.0, 0.6, 0.8]),
    (4, [1.0, 0, 0, 0, 0.3, 0.2, 0], np.zeros(5), [0.1, -0.2, 0.3, 0.4]),
    (5, [1.0, 0.7, 0.4, 0.9, 0.2, 0.3, 0],
     [0.3, -0.2, 0.1, 0.2, 0.15], [0.1, -0.2, 0.3, 0.4]),
    (6, [0.0, 0.0, 0.9, 1.2, 0.8, 0.4, 0],
     [0.0, 0.0, 0.1, 0.5, -0.3], [0.1, -0.2, 0.3, 0.4]),
]


@pytest.mark.parametrize("tag,params,fp,state", CASES)
def test_compiled_matches_pure(tag, params, fp, state):
    args = (tag, np.asarray(params, float), np.asarray(fp, float),
            np.asarray(state, float), 0.0, 1e-3, 4000)
    out_c, done_c, drift_c = backend.kernels.run_flat(*args)
    out_p, done_p, drift_p = _rk4_py.run_flat(*args)
    assert done_c == done_p
    assert np.max(np.abs(out_c - out_p)) <= 1e-13
    assert abs(drift_c - drift_p) <= 1e-15


def test_degeneracy_truncation_agrees():
    args = (5, np.array([1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
            np.array([0.5, 0.0, 0.0, 0.0, 1.0]),
            np.array([0.0, 0.0, 0.0, 0.0]), 0.0, 1e-3, 2000)
    out_c, done_c, _ = backend.kernels.run_flat(*args)
    out_p, done_p, _ = _rk4_py.run_flat(*args)
    assert done_c == done_p < 2000
    assert np.max(np.abs(out_c[: done_c + 1] - out_p[: done_p + 1])) <= 1e-13


def test_state_dimension_validated():
    with pytest.raises(ValueError):
        backend.kernels.run_flat(0, np.zeros(7), np.zeros(15), np.zeros(4), 0.0, 1e-3, 1)
    with pytest.raises(ValueError):
        _rk4_py.run_flat(0, np.zeros(7), np.zeros(15), np.zeros(4), 0.0, 1e-3, 1)


def test_pure_env_override_selects_fallback():
    code = (
        "import carrollkit.backend as b; "
        "print(b.BACKEND_NAME, b.COMPILED)"
    )
    env = dict(os.environ, CARROLLKIT_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0
    assert out.stdout.split() == ["pure-python", "False"]


def test_integrate_uses_selected_backend():
    sc = Scenario(Tag.FREE2D_EXT, m=1.0, q1=0.1, q2=0.1)
    traj = integrate(EvolutionPoint([0, 0], [0, 0], 0, w=0, z=0), sc, (0, 0.01), 1e-3)
    assert traj.backend == backend.BACKEND_NAME


def test_trajectories_cross_backend_via_integrate():
    fld = LinearField3D(E=(0.1, 0.0, -0.2), B0=(0, 0, 1.5), B_jacobian=0.2 * np.eye(3))
    sc = Scenario(Tag.EM3D_SPIN, m=1.0, q=0.4, s_spin=0.5, mu=0.8, field=fld)
    u0 = np.array([0.0, 0.6, 0.8])
    y0 = EvolutionPoint([0.1, 0.2, 0.3], [-0.1, 0.4, 0.0], 0.0, u0)
    fast = integrate(y0, sc, (0.0, 1.0), 1e-3)
    slow = integrate(y0, sc, (0.0, 1.0), 1e-3, force_generic=True)
    assert np.max(np.abs(fast.v - slow.v)) <= 1e-12
    assert np.max(np.abs(fast.u - slow.u)) <= 1e-12
