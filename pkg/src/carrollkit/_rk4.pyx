# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernels for the flat-space scenarios with preset fields.

Twin of ``_rk4_py``; see that module for the state/parameter packing.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

DEF T_FREE3D = 0
DEF T_FREE_SPIN3D = 1
DEF T_EM3D_SPINLESS = 2
DEF T_EM3D_SPIN = 3
DEF T_FREE2D_EXT = 4
DEF T_EM2D_EXT = 5
DEF T_PHOTON2D = 6


cdef int _rhs_2d(int tag, double m, double q, double mu, double theta,
                 double q1, double q2, double e0x, double e0y, double b0,
                 double gx, double gy, double mt2_sign0, double* y,
                 double* dy) nogil:
    cdef double f0, f1, b, mt2, tol, k
    dy[0] = 0.0
    dy[1] = 0.0
    dy[2] = 0.0
    dy[3] = 0.0
    if tag == T_FREE2D_EXT:
        return 0
    f0 = q * e0x + mu * theta * gx
    f1 = q * e0y + mu * theta * gy
    if tag == T_PHOTON2D:
        k = mu * theta / (2.0 * q1)
        dy[0] = -k * gy
        dy[1] = k * gx
        return 0
    b = b0 + gx * y[0] + gy * y[1]
    mt2 = m * m + 4.0 * (q1 - 0.5 * q * b) * q2
    tol = 1e-12 * (1.0 + m * m + fabs(4.0 * q1 * q2) + fabs(2.0 * q * b * q2))
    # crossing the degenerate surface flips the sign of the effective mass
    if fabs(mt2) < tol or mt2 * mt2_sign0 < 0.0:
        return 1
    dy[0] = -2.0 * q2 * f1 / mt2
    dy[1] = 2.0 * q2 * f0 / mt2
    dy[2] = m * f0 / mt2
    dy[3] = m * f1 / mt2
    return 0


cdef int _rhs_3d(int tag, double m, double q, double mu, double s_spin,
                 double* fp, double* y, double* dy, int dim) nogil:
    cdef double bx, by, bz
    cdef int i
    for i in range(dim):
        dy[i] = 0.0
    if tag == T_FREE3D or tag == T_FREE_SPIN3D:
        return 0
    dy[3] = (q / m) * fp[0]
    dy[4] = (q / m) * fp[1]
    dy[5] = (q / m) * fp[2]
    if tag == T_EM3D_SPIN:
        # B = B0 + G x ; dv += (mu/m) G^T u ; du = (mu/s) u x B
        bx = fp[3] + fp[6] * y[0] + fp[7] * y[1] + fp[8] * y[2]
        by = fp[4] + fp[9] * y[0] + fp[10] * y[1] + fp[11] * y[2]
        bz = fp[5] + fp[12] * y[0] + fp[13] * y[1] + fp[14] * y[2]
        dy[3] += (mu / m) * (fp[6] * y[6] + fp[9] * y[7] + fp[12] * y[8])
        dy[4] += (mu / m) * (fp[7] * y[6] + fp[10] * y[7] + fp[13] * y[8])
        dy[5] += (mu / m) * (fp[8] * y[6] + fp[11] * y[7] + fp[14] * y[8])
        dy[6] = (mu / s_spin) * (y[7] * bz - y[8] * by)
        dy[7] = (mu / s_spin) * (y[8] * bx - y[6] * bz)
        dy[8] = (mu / s_spin) * (y[6] * by - y[7] * bx)
    return 0


def run_flat(tag, params, field_params, state0, s0, h, n):
    cdef int t = int(tag)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.ascontiguousarray(params, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fp = np.ascontiguousarray(field_params, dtype=np.float64)
    cdef int dim
    if t == T_FREE_SPIN3D or t == T_EM3D_SPIN:
        dim = 9
    elif t == T_FREE3D or t == T_EM3D_SPINLESS:
        dim = 6
    else:
        dim = 4
    y0 = np.ascontiguousarray(state0, dtype=np.float64)
    if y0.shape[0] != dim:
        raise ValueError(f"state for tag {t} must have {dim} entries")
    cdef int nn = int(n)
    cdef double step = float(h)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((nn + 1, dim))
    cdef double[9] y
    cdef double[9] yt
    cdef double[9] k1
    cdef double[9] k2
    cdef double[9] k3
    cdef double[9] k4
    cdef int i, k, bad
    cdef double m = p[0], q = p[1], mu = p[2], theta = p[3]
    cdef double q1 = p[4], q2 = p[5], s_spin = p[6]
    cdef double drift_max = 0.0, nrm, drift, mt2, b00
    cdef double sign0 = 0.0
    cdef int has_u = 1 if (t == T_FREE_SPIN3D or t == T_EM3D_SPIN) else 0
    cdef double* fpd = <double*> fp.data

    for i in range(dim):
        y[i] = y0[i]
        out[0, i] = y[i]

    if t == T_FREE2D_EXT:
        mt2 = m * m + 4.0 * q1 * q2
        if fabs(mt2) < 1e-12 * (1.0 + m * m + fabs(4.0 * q1 * q2)):
            return out, 0, 0.0
    if t == T_EM2D_EXT:
        b00 = fpd[2] + fpd[3] * y[0] + fpd[4] * y[1]
        sign0 = 1.0 if m * m + 4.0 * (q1 - 0.5 * q * b00) * q2 >= 0.0 else -1.0

    for k in range(nn):
        if dim == 4:
            bad = _rhs_2d(t, m, q, mu, theta, q1, q2, fpd[0], fpd[1], fpd[2], fpd[3], fpd[4], sign0, y, k1)
        else:
            bad = _rhs_3d(t, m, q, mu, s_spin, fpd, y, k1, dim)
        if bad:
            return out, k, drift_max
        for i in range(dim):
            yt[i] = y[i] + 0.5 * step * k1[i]
        if dim == 4:
            bad = _rhs_2d(t, m, q, mu, theta, q1, q2, fpd[0], fpd[1], fpd[2], fpd[3], fpd[4], sign0, yt, k2)
        else:
            bad = _rhs_3d(t, m, q, mu, s_spin, fpd, yt, k2, dim)
        if bad:
            return out, k, drift_max
        for i in range(dim):
            yt[i] = y[i] + 0.5 * step * k2[i]
        if dim == 4:
            bad = _rhs_2d(t, m, q, mu, theta, q1, q2, fpd[0], fpd[1], fpd[2], fpd[3], fpd[4], sign0, yt, k3)
        else:
            bad = _rhs_3d(t, m, q, mu, s_spin, fpd, yt, k3, dim)
        if bad:
            return out, k, drift_max
        for i in range(dim):
            yt[i] = y[i] + step * k3[i]
        if dim == 4:
            bad = _rhs_2d(t, m, q, mu, theta, q1, q2, fpd[0], fpd[1], fpd[2], fpd[3], fpd[4], sign0, yt, k4)
        else:
            bad = _rhs_3d(t, m, q, mu, s_spin, fpd, yt, k4, dim)
        if bad:
            return out, k, drift_max
        for i in range(dim):
            y[i] = y[i] + (step / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if has_u:
            nrm = sqrt(y[6] * y[6] + y[7] * y[7] + y[8] * y[8])
            drift = fabs(nrm - 1.0)
            if drift > drift_max:
                drift_max = drift
            y[6] /= nrm
            y[7] /= nrm
            y[8] /= nrm
        for i in range(dim):
            out[k + 1, i] = y[i]
    return out, nn, drift_max
