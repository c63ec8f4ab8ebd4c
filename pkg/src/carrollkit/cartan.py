"""Carroll Cartan geometry on a 2+1 chart: tetrads, connection, structure
residuals, and the gravitational equations of motion of the extended
planar particle, with and without exotic curvature sources.

Chart conventions: points are x = (x^0, x^1, x^2) with x^0 the fiber
("time") coordinate, xi = e_0 the degenerate direction, frame indices
a = 0 (time) and A = 1, 2 (space).  The tetrad closure returns e with
columns e[:, a]; the cotetrad is its inverse, rows theta^a.  Connection
coefficients are Gamma[mu, nu, lam] = Gamma^mu_{nu lam}.

The exotic curvature 2-forms attached to the two central directions are
declared through their decomposition into a magnetic scalar (o1, o2) and
an electric frame covector (t1, t2); geometries may additionally carry the
central connection potentials w1, w2, in which case structure residuals
cross-check the declared decomposition against d(w1), d(w2).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lie_core import EPS2

FD_H = 1e-5


def _zero_scalar(x):
    return 0.0


def _zero_cov2(x):
    return np.zeros(2)


@dataclass(frozen=True)
class CarrollGeometry:
    """Analytic closures describing a Carroll spacetime with connection."""

    name: str
    tetrad: Callable
    gamma: Callable
    o1: Callable = _zero_scalar
    o2: Callable = _zero_scalar
    t1: Callable = _zero_cov2
    t2: Callable = _zero_cov2
    w1: Callable | None = None
    w2: Callable | None = None
    metric: Callable | None = None

    def cotetrad(self, x) -> np.ndarray:
        return np.linalg.inv(self.tetrad(np.asarray(x, dtype=float)))

    def xi(self, x) -> np.ndarray:
        return self.tetrad(np.asarray(x, dtype=float))[:, 0]


def momentum_covector(geom: CarrollGeometry, x, boost=(0.0, 0.0)) -> np.ndarray:
    """theta^0 + b_A theta^A at x: the momentum state with boost b.

    In the flat geometry this is ds + b_A dx^A, so the covector satisfies
    v(xi) = 1 by construction.
    """
    th = geom.cotetrad(x)
    b = np.asarray(boost, dtype=float)
    return th[0] + b[0] * th[1] + b[1] * th[2]


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def flat_geometry(o1=0.0, o2=0.0, t1=(0.0, 0.0), t2=(0.0, 0.0)) -> CarrollGeometry:
    """Flat chart with optional constant exotic sources.

    The central potentials are included so that the declared source
    decomposition is verifiable:  w1 = (o1 - 1)(x^1 dx^2 - x^2 dx^1)
    - (t1 . x) dx^0  and  w2 = o2 (x^1 dx^2 - x^2 dx^1) - (t2 . x) dx^0.
    """
    o1 = float(o1)
    o2 = float(o2)
    t1 = np.asarray(t1, dtype=float).reshape(2)
    t2 = np.asarray(t2, dtype=float).reshape(2)

    def w1(x):
        return np.array(
            [-(t1[0] * x[1] + t1[1] * x[2]), -(o1 - 1.0) * x[2], (o1 - 1.0) * x[1]]
        )

    def w2(x):
        return np.array([-(t2[0] * x[1] + t2[1] * x[2]), -o2 * x[2], o2 * x[1]])

    return CarrollGeometry(
        name="flat",
        tetrad=lambda x: np.eye(3),
        gamma=lambda x: np.zeros((3, 3, 3)),
        o1=lambda x: o1,
        o2=lambda x: o2,
        t1=lambda x: t1,
        t2=lambda x: t2,
        w1=w1,
        w2=w2,
        metric=lambda x: np.diag([0.0, 1.0, 1.0]),
    )


@dataclass(frozen=True)
class HorizonReport:
    """Structure check of a horizon geometry: the metric must annihilate
    xi, have a one-dimensional kernel away from the poles, and be
    invariant along xi."""

    r_plus: float
    xi_in_kernel: float
    kernel_dims: tuple
    lie_derivative: float

    @property
    def ok(self) -> bool:
        return (
            self.xi_in_kernel < 1e-12
            and all(k == 1 for k in self.kernel_dims)
            and self.lie_derivative < 1e-10
        )


def kerr_newman_horizon(M: float, a: float, Q: float):
    """Outer-horizon geometry of a Kerr-Newman black hole.

    Chart (s, theta, phi) with the degenerate metric

        g = Sigma dtheta^2 + (r+^2 + a^2)^2 sin^2(theta) / Sigma dphi^2,
        Sigma = r+^2 + a^2 cos^2(theta),  xi = d/ds,

    r+ = M + sqrt(M^2 - a^2 - Q^2).  The connection is the Levi-Civita
    connection of the spatial metric extended by zero on the fiber index,
    so that the xi-compatibility and torsion conditions hold.  Returns the
    geometry together with a structure check report.
    """
    M, a, Q = float(M), float(a), float(Q)
    disc = M * M - a * a - Q * Q
    if disc < 0.0:
        raise ValueError("naked singularity: need M^2 >= a^2 + Q^2")
    rp = M + math.sqrt(disc)
    r2a2 = rp * rp + a * a

    def sigma_of(th):
        return rp * rp + a * a * math.cos(th) ** 2

    def gphi_of(th):
        return r2a2 * r2a2 * math.sin(th) ** 2 / sigma_of(th)

    def metric(x):
        th = float(x[1])
        return np.diag([0.0, sigma_of(th), gphi_of(th)])

    def tetrad(x):
        th = float(x[1])
        e = np.zeros((3, 3))
        e[0, 0] = 1.0
        e[1, 1] = 1.0 / math.sqrt(sigma_of(th))
        e[2, 2] = 1.0 / math.sqrt(gphi_of(th))
        return e

    def gamma(x):
        th = float(x[1])
        sig = sigma_of(th)
        gph = gphi_of(th)
        dsig = -2.0 * a * a * math.cos(th) * math.sin(th)
        dgph = r2a2 * r2a2 * math.sin(th) * (2.0 * math.cos(th) * sig - math.sin(th) * dsig) / (sig * sig)
        G = np.zeros((3, 3, 3))
        G[1, 1, 1] = dsig / (2.0 * sig)
        G[1, 2, 2] = -dgph / (2.0 * sig)
        G[2, 1, 2] = G[2, 2, 1] = dgph / (2.0 * gph)
        return G

    geom = CarrollGeometry(
        name="kerr_newman", tetrad=tetrad, gamma=gamma, metric=metric
    )

    thetas = np.linspace(0.1, math.pi - 0.1, 7)
    xi_res = 0.0
    dims = []
    lie = 0.0
    h = FD_H
    for th in thetas:
        for s in (0.0, 0.7):
            x = np.array([s, th, 0.3])
            g = metric(x)
            xi_res = max(xi_res, float(np.max(np.abs(g @ geom.xi(x)))))
            sv = np.linalg.svd(g, compute_uv=False)
            dims.append(int(np.sum(sv < 1e-10 * max(sv[0], 1e-300))))
            dg = (metric(x + [h, 0, 0]) - metric(x - [h, 0, 0])) / (2 * h)
            lie = max(lie, float(np.max(np.abs(dg))))
    return geom, HorizonReport(rp, xi_res, tuple(dims), lie)


# ---------------------------------------------------------------------------
# structure residuals
# ---------------------------------------------------------------------------

def _d_tetrad(geom, x, h=FD_H):
    """de[mu, b, lam] = d e^mu_b / d x^lam by central differences."""
    out = np.zeros((3, 3, 3))
    for lam in range(3):
        dx = np.zeros(3)
        dx[lam] = h
        out[:, :, lam] = (geom.tetrad(x + dx) - geom.tetrad(x - dx)) / (2 * h)
    return out


def _d_cotetrad(geom, x, h=FD_H):
    out = np.zeros((3, 3, 3))
    for lam in range(3):
        dx = np.zeros(3)
        dx[lam] = h
        out[:, :, lam] = (geom.cotetrad(x + dx) - geom.cotetrad(x - dx)) / (2 * h)
    return out


def _connection_form(geom, x, h=FD_H):
    """w[a, b, lam]: the frame-bundle connection pulled to the chart."""
    th = geom.cotetrad(x)
    de = _d_tetrad(geom, x, h)
    G = geom.gamma(x)
    cov = de + np.einsum("mnl,nb->mbl", G, geom.tetrad(x))
    return np.einsum("am,mbl->abl", th, cov)


def _d_oneform(fn, x, h=FD_H):
    """(da)[mu, nu] = d_mu a_nu - d_nu a_mu for a covector closure."""
    grad = np.zeros((3, 3))
    for mu in range(3):
        dx = np.zeros(3)
        dx[mu] = h
        grad[mu] = (np.asarray(fn(x + dx), dtype=float) - np.asarray(fn(x - dx), dtype=float)) / (2 * h)
    return grad - grad.T


def _wedge11(aU, aV, bU, bV):
    return aU * bV - aV * bU


@dataclass(frozen=True)
class StructureResiduals:
    duality: float
    connection_constraints: float
    torsion: float
    central_1: float | None
    central_2: float | None

    def max_residual(self) -> float:
        vals = [self.duality, self.connection_constraints, self.torsion]
        vals += [v for v in (self.central_1, self.central_2) if v is not None]
        return max(vals)


def structure_residuals(geom: CarrollGeometry, x, probes=None, h=FD_H) -> StructureResiduals:
    """Evaluate the structure equations at x on probe vector pairs.

    Checks cotetrad/tetrad duality, the Carroll connection constraints
    (the frame components w^a_0 must vanish), the vanishing of the torsion
    2-forms, and, when the central potentials are declared, the
    consistency of the exotic source decomposition.
    """
    x = np.asarray(x, dtype=float)
    e = geom.tetrad(x)
    if abs(np.linalg.det(e)) < 1e-14:
        raise ValueError("singular tetrad")
    th = geom.cotetrad(x)
    if probes is None:
        basis = np.eye(3)
        probes = [(basis[0], basis[1]), (basis[0], basis[2]), (basis[1], basis[2])]

    duality = float(np.max(np.abs(th @ e - np.eye(3))))
    w = _connection_form(geom, x, h)
    constraints = float(np.max(np.abs(w[:, 0, :])))

    dth = _d_cotetrad(geom, x, h)
    torsion = 0.0
    for U, V in probes:
        thU = th @ U
        thV = th @ V
        wU = np.einsum("abl,l->ab", w, U)
        wV = np.einsum("abl,l->ab", w, V)
        for a_idx in range(3):
            # dth[a, nu, lam] = d_lam theta^a_nu; (d theta^a)(U, V)
            dtheta = 0.0
            for mu in range(3):
                for nu in range(3):
                    dtheta += (dth[a_idx, nu, mu] - dth[a_idx, mu, nu]) * U[mu] * V[nu]
            # w already carries the boost-row sign of the group pattern, so
            # every torsion 2-form is d theta^a + w^a_C wedge theta^C.
            term = sum(
                _wedge11(wU[a_idx, C], wV[a_idx, C], thU[C], thV[C]) for C in (1, 2)
            )
            torsion = max(torsion, abs(dtheta + term))

    central_1 = central_2 = None
    if geom.w1 is not None:
        dw1 = _d_oneform(geom.w1, x, h)
        o1 = float(geom.o1(x))
        t1 = np.asarray(geom.t1(x), dtype=float)
        central_1 = 0.0
        for U, V in probes:
            thU = th @ U
            thV = th @ V
            val = float(U @ dw1 @ V)
            val += 2.0 * _wedge11(thU[1], thV[1], thU[2], thV[2])
            want = 2.0 * o1 * _wedge11(thU[1], thV[1], thU[2], thV[2])
            want += sum(t1[B] * _wedge11(thU[0], thV[0], thU[B + 1], thV[B + 1]) for B in range(2))
            central_1 = max(central_1, abs(val - want))
    if geom.w2 is not None:
        dw2 = _d_oneform(geom.w2, x, h)
        o2 = float(geom.o2(x))
        t2 = np.asarray(geom.t2(x), dtype=float)
        central_2 = 0.0
        for U, V in probes:
            thU = th @ U
            thV = th @ V
            wU = np.einsum("abl,l->ab", w, U)
            wV = np.einsum("abl,l->ab", w, V)
            val = float(U @ dw2 @ V)
            val -= 2.0 * _wedge11(wU[0, 1], wV[0, 1], wU[0, 2], wV[0, 2])
            want = 2.0 * o2 * _wedge11(thU[1], thV[1], thU[2], thV[2])
            want += sum(t2[B] * _wedge11(thU[0], thV[0], thU[B + 1], thV[B + 1]) for B in range(2))
            central_2 = max(central_2, abs(val - want))

    return StructureResiduals(duality, constraints, torsion, central_1, central_2)


# ---------------------------------------------------------------------------
# equations of motion and integration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GravityEom:
    dx: np.ndarray | None
    dv: np.ndarray | None
    regime: str | None
    degenerate: bool = False
    reason: str | None = None


def exotic_t(geom: CarrollGeometry, x, q1: float, q2: float) -> np.ndarray:
    """Combined electric exotic source T_A = q1 t1_A + q2 t2_A."""
    return q1 * np.asarray(geom.t1(x), dtype=float) + q2 * np.asarray(
        geom.t2(x), dtype=float
    )


def q1_effective(geom: CarrollGeometry, x, q1: float, q2: float) -> float:
    """Magnetic sources only shift the first central charge:
    q1 -> q1 - (q1 o1 + q2 o2)."""
    return q1 - (q1 * float(geom.o1(x)) + q2 * float(geom.o2(x)))


def eom_gravity(x, v, geom: CarrollGeometry, params) -> GravityEom:
    """Tangent of the gravitational motion at (x, v).

    With vanishing electric sources the velocity is xi itself (time gauge
    dx^mu/dtau = xi^mu) and the momentum is parallel-transported.  With
    electric sources T != 0:

        dx/dtau = (m_eff^2 / 2 q2) xi + e_A eps^{AB} T_B
        Dv_mu/dtau = (m / 2 q2) T_A theta^A_mu
    """
    m, q1, q2 = (float(p) for p in params)
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    e = geom.tetrad(x)
    th = np.linalg.inv(e)
    xi = e[:, 0]
    T = exotic_t(geom, x, q1, q2)
    q1e = q1_effective(geom, x, q1, q2)
    mt2 = m * m + 4.0 * q1e * q2
    tnorm = float(np.max(np.abs(T)))
    if tnorm <= 1e-14 * (1.0 + abs(q1) + abs(q2)):
        if abs(mt2) < 1e-12 * (1.0 + m * m + abs(4.0 * q1e * q2)):
            return GravityEom(None, None, None, True, "vanishing effective mass")
        dx = xi.copy()
        source = np.zeros(3)
        regime = "xi"
    else:
        if abs(q2) < 1e-14:
            return GravityEom(None, None, None, True, "electric sources need q2 != 0")
        dx = (mt2 / (2.0 * q2)) * xi + e[:, 1:] @ (EPS2 @ T)
        source = (m / (2.0 * q2)) * (T[0] * th[1] + T[1] * th[2])
        regime = "electric"
    dv = np.einsum("lmn,n,l->m", geom.gamma(x), dx, v) + source
    return GravityEom(dx, dv, regime)


@dataclass
class GravityTrajectory:
    geometry: str
    tau: np.ndarray
    x: np.ndarray
    v: np.ndarray
    regime: str
    step: float = 0.0
    truncated: bool = False
    diagnostic: str | None = None

    def to_csv(self, f) -> None:
        if isinstance(f, (str, bytes)):
            with open(f, "w") as fh:
                self.to_csv(fh)
            return
        f.write("tau,x0,x1,x2,v0,v1,v2\n")
        for k in range(len(self.tau)):
            row = [self.tau[k], *self.x[k], *self.v[k]]
            f.write(",".join(repr(float(val)) for val in row) + "\n")

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def integrate_gravity(x0, v0, geom: CarrollGeometry, params, tau_span, step=1e-3) -> GravityTrajectory:
    """RK4 on (x, v) with covariant momentum transport.

    The initial momentum must satisfy the frame constraint v(xi) = 1 (use
    :func:`momentum_covector` to build one); the constraint is preserved
    by the transport.
    """
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    t0, t1 = float(tau_span[0]), float(tau_span[1])
    if not (t1 > t0) or step <= 0.0:
        raise ValueError("need tau1 > tau0 and step > 0")
    pairing = float(v0 @ geom.xi(x0))
    if abs(pairing - 1.0) > 1e-6:
        raise ValueError(f"initial momentum has v(xi) = {pairing!r}, expected 1")
    n = max(1, int(round((t1 - t0) / step)))
    state = np.concatenate([x0, v0])
    out = np.zeros((n + 1, 6))
    out[0] = state
    regime = None
    truncated = False
    diagnostic = None

    def rhs(st):
        res = eom_gravity(st[:3], st[3:], geom, params)
        if res.degenerate:
            return None, res.reason
        return np.concatenate([res.dx, res.dv]), res.regime

    done = n
    for k in range(n):
        k1, reg = rhs(state)
        if k1 is None:
            done, truncated, diagnostic = k, True, reg
            break
        regime = regime or reg
        k2, _ = rhs(state + 0.5 * step * k1)
        k3, _ = rhs(state + 0.5 * step * k2) if k2 is not None else (None, None)
        k4, _ = rhs(state + step * k3) if k3 is not None else (None, None)
        if k2 is None or k3 is None or k4 is None:
            done, truncated, diagnostic = k, True, "degenerate mid-step"
            break
        state = state + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = state
    out = out[: done + 1]
    return GravityTrajectory(
        geometry=geom.name,
        tau=t0 + step * np.arange(done + 1),
        x=out[:, :3],
        v=out[:, 3:],
        regime=regime or "xi",
        step=step,
        truncated=truncated,
        diagnostic=diagnostic,
    )
