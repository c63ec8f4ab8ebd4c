"""Pure-Python RK4 kernels for the flat-space scenarios with preset fields.

This module is the fallback twin of the compiled extension ``_rk4``; both
expose ``run_flat`` with identical semantics.  States are packed as

    tag 0 FREE3D        state = (x[3], v[3])
    tag 1 FREE_SPIN3D   state = (x[3], v[3], u[3])
    tag 2 EM3D_SPINLESS state = (x[3], v[3])
    tag 3 EM3D_SPIN     state = (x[3], v[3], u[3])
    tag 4 FREE2D_EXT    state = (x[2], v[2])
    tag 5 EM2D_EXT      state = (x[2], v[2])
    tag 6 PHOTON2D      state = (x[2], v[2])

``params`` is (m, q, mu, theta, q1, q2, s_spin).  Planar field packing is
(E0x, E0y, B0, Bgx, Bgy) for B(x) = B0 + <Bg, x>; the 3d packing is
(E0[3], B0[3], G[9] row-major) for B(x) = B0 + G x.

Returns (states, steps_done, u_drift_max) where states has n+1 rows
(row k = state after k steps; rows past a degeneracy are left zero) and
steps_done < n signals a degenerate 2-form encountered mid-run.
"""

from __future__ import annotations

import numpy as np

FREE3D, FREE_SPIN3D, EM3D_SPINLESS, EM3D_SPIN = 0, 1, 2, 3
FREE2D_EXT, EM2D_EXT, PHOTON2D = 4, 5, 6

STATE_DIM = {
    FREE3D: 6,
    FREE_SPIN3D: 9,
    EM3D_SPINLESS: 6,
    EM3D_SPIN: 9,
    FREE2D_EXT: 4,
    EM2D_EXT: 4,
    PHOTON2D: 4,
}


def _rhs_2d(tag, p, fp, y, mt2_sign0=0.0):
    m, q, mu, theta, q1, q2 = p[0], p[1], p[2], p[3], p[4], p[5]
    dy = np.zeros(4)
    if tag == FREE2D_EXT:
        return dy
    gx, gy = fp[3], fp[4]
    f0 = q * fp[0] + mu * theta * gx
    f1 = q * fp[1] + mu * theta * gy
    if tag == PHOTON2D:
        k = mu * theta / (2.0 * q1)
        dy[0] = -k * gy
        dy[1] = k * gx
        return dy
    b = fp[2] + gx * y[0] + gy * y[1]
    mt2 = m * m + 4.0 * (q1 - 0.5 * q * b) * q2
    tol = 1e-12 * (1.0 + m * m + abs(4.0 * q1 * q2) + abs(2.0 * q * b * q2))
    # crossing the degenerate surface flips the sign of the effective mass
    if abs(mt2) < tol or mt2 * mt2_sign0 < 0.0:
        return None
    dy[0] = -2.0 * q2 * f1 / mt2
    dy[1] = 2.0 * q2 * f0 / mt2
    dy[2] = m * f0 / mt2
    dy[3] = m * f1 / mt2
    return dy


def _rhs_3d(tag, p, fp, y):
    m, q, mu = p[0], p[1], p[2]
    s_spin = p[6]
    dy = np.zeros(9 if tag in (FREE_SPIN3D, EM3D_SPIN) else 6)
    if tag in (FREE3D, FREE_SPIN3D):
        return dy
    e0 = fp[0:3]
    dy[3:6] = (q / m) * e0
    if tag == EM3D_SPIN:
        g = fp[6:15].reshape(3, 3)
        u = y[6:9]
        b = fp[3:6] + g @ y[0:3]
        dy[3:6] += (mu / m) * (g.T @ u)
        dy[6:9] = (mu / s_spin) * np.cross(u, b)
    return dy


def run_flat(tag, params, field_params, state0, s0, h, n):
    tag = int(tag)
    p = np.asarray(params, dtype=float)
    fp = np.asarray(field_params, dtype=float)
    dim = STATE_DIM[tag]
    y = np.asarray(state0, dtype=float).copy()
    if y.shape != (dim,):
        raise ValueError(f"state for tag {tag} must have {dim} entries")
    has_u = tag in (FREE_SPIN3D, EM3D_SPIN)

    sign0 = 0.0
    if tag == FREE2D_EXT:
        # constant 2-form: degenerate iff the effective mass vanishes
        mt2 = p[0] * p[0] + 4.0 * p[4] * p[5]
        if abs(mt2) < 1e-12 * (1.0 + p[0] * p[0] + abs(4.0 * p[4] * p[5])):
            out = np.zeros((n + 1, dim))
            out[0] = y
            return out, 0, 0.0
    if tag == EM2D_EXT:
        b0 = fp[2] + fp[3] * y[0] + fp[4] * y[1]
        sign0 = 1.0 if p[0] * p[0] + 4.0 * (p[4] - 0.5 * p[1] * b0) * p[5] >= 0.0 else -1.0

    if dim == 4:
        def rhs(t, pp, ff, yy):
            return _rhs_2d(t, pp, ff, yy, sign0)
    else:
        rhs = _rhs_3d

    out = np.zeros((n + 1, dim))
    out[0] = y
    drift_max = 0.0
    for k in range(n):
        k1 = rhs(tag, p, fp, y)
        if k1 is None:
            return out, k, drift_max
        k2 = rhs(tag, p, fp, y + 0.5 * h * k1)
        if k2 is None:
            return out, k, drift_max
        k3 = rhs(tag, p, fp, y + 0.5 * h * k2)
        if k3 is None:
            return out, k, drift_max
        k4 = rhs(tag, p, fp, y + h * k3)
        if k4 is None:
            return out, k, drift_max
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if has_u:
            nrm = float(np.linalg.norm(y[6:9]))
            drift = abs(nrm - 1.0)
            if drift > drift_max:
                drift_max = drift
            y[6:9] /= nrm
        out[k + 1] = y
    return out, n, drift_max
