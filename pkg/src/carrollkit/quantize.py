"""Free Carroll wave functions: the quantum equation and its limits, the
unitary group representations in both polarizations, and the prequantum
1-form.

Wave functions are stored in separated form, profile times phase: the full
function is Psi = exp(i m s / hbar) phi(x) in the position polarization
and Psi = exp(i m s / hbar) exp(i <p, x> / hbar) phi(p) in the momentum
polarization.  The dependence on s is exactly a phase, so storing it
sampled would only add finite-difference noise.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .lie_core import GroupElement


class ClippedMassWarning(UserWarning):
    """Pulled-back profile support left the grid; norm is underestimated."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform rectangular spatial grid."""

    lo: object
    hi: object
    num: object

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).reshape(-1)
        hi = np.asarray(self.hi, dtype=float).reshape(-1)
        num = np.asarray(self.num, dtype=int).reshape(-1)
        if not (lo.shape == hi.shape == num.shape):
            raise ValueError("lo, hi, num must have matching lengths")
        if np.any(num < 2):
            raise ValueError("need at least 2 samples per axis")
        if np.any(hi <= lo):
            raise ValueError("need hi > lo per axis")
        for name, v in (("lo", lo), ("hi", hi), ("num", num)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def dim(self) -> int:
        return len(self.num)

    @property
    def spacing(self) -> np.ndarray:
        return (self.hi - self.lo) / (self.num - 1)

    def axes(self):
        return [np.linspace(self.lo[i], self.hi[i], self.num[i]) for i in range(self.dim)]

    def mesh(self):
        return np.meshgrid(*self.axes(), indexing="ij")

    def points(self) -> np.ndarray:
        """All grid points as an (N, dim) array in C order."""
        mesh = self.mesh()
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)


@dataclass(frozen=True)
class WaveFunction:
    polarization: str
    m: float
    profile: np.ndarray
    grid: GridSpec
    hbar: float = 1.0

    def __post_init__(self):
        if self.polarization not in ("position", "momentum"):
            raise ValueError("polarization must be 'position' or 'momentum'")
        prof = np.asarray(self.profile, dtype=complex).copy()
        if prof.shape != tuple(self.grid.num):
            raise ValueError("profile shape must match the grid")
        prof.setflags(write=False)
        object.__setattr__(self, "profile", prof)
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "hbar", float(self.hbar))

    def phase(self, s: float) -> complex:
        return np.exp(1j * self.m * s / self.hbar)

    def values(self, s: float, p=None, x=None) -> np.ndarray:
        """Full wave function on the grid at Carroll time s.

        For the momentum polarization ``x`` fixes the spatial point of the
        plane-wave factor; for the position polarization ``p`` is ignored
        (the function is constant along the momentum directions).
        """
        if self.polarization == "position":
            return self.phase(s) * self.profile
        x = np.zeros(self.grid.dim) if x is None else np.asarray(x, dtype=float)
        mesh = self.grid.mesh()
        px = sum(mesh[i] * x[i] for i in range(self.grid.dim))
        return self.phase(s) * np.exp(1j * px / self.hbar) * self.profile


def gaussian_profile(grid: GridSpec, center=None, width: float = 1.0) -> np.ndarray:
    center = np.zeros(grid.dim) if center is None else np.asarray(center, dtype=float)
    mesh = grid.mesh()
    r2 = sum((mesh[i] - center[i]) ** 2 for i in range(grid.dim))
    return np.exp(-r2 / (2.0 * width**2)).astype(complex)


def l2_norm(psi: WaveFunction) -> float:
    """Trapezoidal quadrature of |profile|^2 over the grid, square root."""
    dens = np.abs(psi.profile) ** 2
    for i in range(psi.grid.dim - 1, -1, -1):
        dens = np.trapezoid(dens, dx=psi.grid.spacing[i], axis=i)
    return float(np.sqrt(dens))


@dataclass(frozen=True)
class CarrollResidual:
    analytic: float
    finite_difference: float

    @property
    def max(self) -> float:
        return max(self.analytic, self.finite_difference)


def carroll_residual(psi: WaveFunction, s_samples=(0.0, 0.4, 1.3), fd_step: float = 1e-4) -> CarrollResidual:
    """Residual of (-i hbar d/ds - m) Psi.

    The analytic path differentiates the stored phase exactly; the
    finite-difference path evaluates Psi at s +/- fd_step, with the usual
    second-order error m^3 fd_step^2 / (6 hbar^2) per unit amplitude.
    """
    hb, m = psi.hbar, psi.m
    analytic = 0.0
    fd = 0.0
    for s in s_samples:
        vals = psi.values(s)
        dpsi = (1j * m / hb) * vals
        analytic = max(analytic, float(np.max(np.abs(-1j * hb * dpsi - m * vals))))
        dfd = (psi.values(s + fd_step) - psi.values(s - fd_step)) / (2.0 * fd_step)
        fd = max(fd, float(np.max(np.abs(-1j * hb * dfd - m * vals))))
    return CarrollResidual(analytic, fd)


def _laplacian(arr: np.ndarray, spacing) -> np.ndarray:
    """Second-order interior Laplacian (the boundary ring is dropped by
    the callers)."""
    out = np.zeros_like(arr)
    for ax in range(arr.ndim):
        h2 = spacing[ax] ** 2
        plus = np.roll(arr, -1, axis=ax)
        minus = np.roll(arr, 1, axis=ax)
        out += (plus - 2.0 * arr + minus) / h2
    return out


def _interior(arr: np.ndarray) -> np.ndarray:
    sl = tuple(slice(1, -1) for _ in range(arr.ndim))
    return arr[sl]


def kg_limit_residuals(psi: WaveFunction, c_sequence, s: float = 0.0) -> list[float]:
    """Residual of ((1/C^2) Lap - d^2/ds^2 - m^2/hbar^2) Psi per C.

    The s part cancels analytically, so the residual is the Laplacian term
    alone and decays exactly as 1/C^2; the C -> infinity limit is the
    Carroll wave equation residual, zero.
    """
    if psi.polarization != "position":
        raise ValueError("the limit check applies to position-polarized functions")
    c_sequence = [float(c) for c in c_sequence]
    if any(b <= a for a, b in zip(c_sequence, c_sequence[1:])):
        raise ValueError("C sequence must be increasing")
    vals = psi.values(s)
    lap = _laplacian(vals, psi.grid.spacing)
    dss = (1j * psi.m / psi.hbar) ** 2 * vals
    base = -dss - (psi.m**2 / psi.hbar**2) * vals
    out = []
    for c in c_sequence:
        res = lap / (c * c) + base
        out.append(float(np.max(np.abs(_interior(res)))))
    return out


def _multilinear(profile: np.ndarray, grid: GridSpec, pts: np.ndarray):
    """Multilinear interpolation at pts (N, dim); zero outside the grid.

    Returns (values, inside_mask).
    """
    t = (pts - grid.lo) / grid.spacing
    inside = np.all((t >= 0.0) & (t <= grid.num - 1), axis=1)
    t = np.clip(t, 0.0, np.asarray(grid.num - 1, dtype=float))
    i0 = np.minimum(t.astype(int), grid.num - 2)
    frac = t - i0
    vals = np.zeros(len(pts), dtype=complex)
    dim = grid.dim
    for corner in range(2**dim):
        idx = []
        weight = np.ones(len(pts))
        for ax in range(dim):
            bit = (corner >> ax) & 1
            idx.append(i0[:, ax] + bit)
            weight = weight * (frac[:, ax] if bit else 1.0 - frac[:, ax])
        vals += weight * profile[tuple(idx)]
    vals[~inside] = 0.0
    return vals, inside


def _check_plain(a: GroupElement, dim: int) -> None:
    if a.kind.extended:
        raise ValueError("representations take plain Carroll group elements")
    if a.kind.dim != dim:
        raise ValueError(f"group element dimension {a.kind.dim} != grid dimension {dim}")


def _warn_clipping(before2: float, after2: float, margin: float) -> None:
    if before2 > 0.0 and before2 - after2 > margin * before2:
        lost = before2 - after2
        warnings.warn(
            f"transformed support leaves the grid: clipped squared mass ~ {lost:.3e}",
            ClippedMassWarning,
            stacklevel=3,
        )


def rep_position(a: GroupElement, psi: WaveFunction, clip_margin: float = 1e-9) -> WaveFunction:
    """Unitary representation in the position polarization:

        (rho(a) Psi)(x, s) = exp(i (m/hbar)(s + <b, x - c> - f)) phi(A^-1 (x - c)).
    """
    if psi.polarization != "position":
        raise ValueError("expected a position-polarized wave function")
    _check_plain(a, psi.grid.dim)
    pts = psi.grid.points()
    pulled = (pts - a.c) @ a.A  # rows (x - c) A = A^-1 (x - c) for orthogonal A
    vals, _ = _multilinear(psi.profile, psi.grid, pulled)
    phase = np.exp(
        1j * (psi.m / psi.hbar) * ((pts - a.c) @ a.b - a.f)
    )
    new = (phase * vals).reshape(psi.profile.shape)
    out = WaveFunction("position", psi.m, new, psi.grid, psi.hbar)
    _warn_clipping(l2_norm(psi) ** 2, l2_norm(out) ** 2, clip_margin)
    return out


def rep_momentum(a: GroupElement, psi: WaveFunction, clip_margin: float = 1e-9) -> WaveFunction:
    """Unitary representation in the momentum polarization:

        (rho(a) Psi)(x, p, s) = exp(i (m/hbar)(s - f)) exp(i <p, x - c>/hbar)
                                phi(A^-1 (p - m b)).
    """
    if psi.polarization != "momentum":
        raise ValueError("expected a momentum-polarized wave function")
    _check_plain(a, psi.grid.dim)
    pts = psi.grid.points()
    pulled = (pts - psi.m * a.b) @ a.A
    vals, _ = _multilinear(psi.profile, psi.grid, pulled)
    phase = np.exp(-1j * (psi.m * a.f + pts @ a.c) / psi.hbar)
    new = (phase * vals).reshape(psi.profile.shape)
    out = WaveFunction("momentum", psi.m, new, psi.grid, psi.hbar)
    _warn_clipping(l2_norm(psi) ** 2, l2_norm(out) ** 2, clip_margin)
    return out


def rep(a: GroupElement, psi: WaveFunction, clip_margin: float = 1e-9) -> WaveFunction:
    if psi.polarization == "position":
        return rep_position(a, psi, clip_margin)
    return rep_momentum(a, psi, clip_margin)


# ---------------------------------------------------------------------------
# prequantum 1-form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrequantumForm:
    """Components of alpha = (1/hbar) <p, dx> + d(chi) on the circle chart
    z = exp(i chi)."""

    x_part: np.ndarray
    p_part: np.ndarray
    phase_part: float


def prequantum_one_form(x, p, z: complex, hbar: float = 1.0) -> PrequantumForm:
    if abs(abs(z) - 1.0) > 1e-12:
        raise ValueError("the circle coordinate must have |z| = 1")
    p = np.asarray(p, dtype=float)
    return PrequantumForm(p / hbar, np.zeros_like(p), 1.0)


def curvature_residual(x, p, hbar: float = 1.0, h: float = 1e-4) -> float:
    """Stencil check of d(alpha) = omega / hbar on coordinate bivectors.

    omega = d p-bar wedge d x, so d(alpha) on (d/dp_i, d/dx_j) must be
    delta_ij / hbar and the x-x, p-p and phase blocks must vanish.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    d = len(x)

    def alpha(xx, pp):
        form = prequantum_one_form(xx, pp, 1.0 + 0.0j, hbar)
        return np.concatenate([form.x_part, form.p_part, [form.phase_part]])

    n = 2 * d + 1

    def shifted(mu, sign):
        xx = x.copy()
        pp = p.copy()
        if mu < d:
            xx[mu] += sign * h
        elif mu < 2 * d:
            pp[mu - d] += sign * h
        return xx, pp

    dmat = np.zeros((n, n))
    for mu in range(n):
        ap, am = alpha(*shifted(mu, +1)), alpha(*shifted(mu, -1))
        dmat[mu] = (ap - am) / (2.0 * h)
    dalpha = dmat - dmat.T
    want = np.zeros((n, n))
    for i in range(d):
        want[d + i, i] = 1.0 / hbar
        want[i, d + i] = -1.0 / hbar
    return float(np.max(np.abs(dalpha - want)))


def fiber_pullback_integral(m: float, hbar: float, x0, p0, delta_s: float, n: int = 200) -> float:
    """Line integral of alpha along s -> (x0, p0, exp(i m s / hbar)).

    Equals (m / hbar) delta_s: the fiber velocity has d(chi)/ds = m/hbar
    and the base point does not move.
    """
    svals = np.linspace(0.0, delta_s, n + 1)
    integrand = np.full(n + 1, m / hbar)  # alpha(dgamma/ds); <p, dx/ds> = 0
    return float(np.trapezoid(integrand, svals))


def potential_pullback_residual(m: float, hbar: float, x0, p0) -> float:
    """Check hbar * (pullback of alpha along z = exp(i m s/hbar)) against
    the flat potential <p, dx> + m ds, componentwise."""
    p0 = np.asarray(p0, dtype=float)
    form = prequantum_one_form(x0, p0, 1.0 + 0.0j, hbar)
    ds_component = hbar * form.phase_part * (m / hbar)
    dx_component = hbar * form.x_part
    return float(
        max(np.max(np.abs(dx_component - p0)), abs(ds_component - m))
    )
