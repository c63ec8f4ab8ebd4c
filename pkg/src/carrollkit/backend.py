"""Integrator backend selection.

At import time the compiled extension ``carrollkit._rk4`` is preferred;
the pure-Python twin ``carrollkit._rk4_py`` is used when the extension is
missing or when the environment variable ``CARROLLKIT_PURE`` is set to a
non-empty value.  Both expose the same ``run_flat`` entry point.
"""

from __future__ import annotations

import os

from . import _rk4_py

if os.environ.get("CARROLLKIT_PURE"):
    kernels = _rk4_py
    COMPILED = False
else:
    try:
        from . import _rk4 as _rk4_ext

        kernels = _rk4_ext
        COMPILED = True
    except ImportError:
        kernels = _rk4_py
        COMPILED = False

BACKEND_NAME = "compiled" if COMPILED else "pure-python"
PURE_KERNELS = _rk4_py


def run_flat(tag, params, field_params, state0, s0, h, n):
    return kernels.run_flat(tag, params, field_params, state0, s0, h, n)
