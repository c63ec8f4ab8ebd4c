"""Dual-space machinery: pairing, adjoint/coadjoint actions, Casimirs,
and the moment map of the free models.

Moments pair with algebra elements through

    mu . Z = l omega - <beta, g> + <gamma, p> + m phi + alpha1 q1 + alpha2 q2

(note the minus sign on the boost block).  The coadjoint action is defined
by Coad(a) mu . Z = mu . Ad(a^-1) Z; for the extended planar group it is
implemented in closed form and, independently, through the matrix
representation, and the two paths are cross-checked in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lie_core import (
    EPS2,
    AlgebraElement,
    GroupElement,
    Kind,
    _check_kind,
    algebra_from_matrix,
    cross2,
    inverse,
    to_matrix,
    to_matrix_group,
)
from .scenarios import EvolutionPoint, Scenario, Tag


@dataclass(frozen=True)
class Moment:
    """Point (l, g, p, m, q1, q2) of the dual algebra.

    ``l`` is the angular momentum (scalar for planar kinds, 3-vector in 3d),
    ``g`` the boost moment, ``p`` the linear momentum, ``m`` the mass and
    ``q1``/``q2`` the central charges (extended planar kind only; q1 has
    dimensions of mass/time and q2 of mass*time).
    """

    kind: Kind
    l: object = None
    g: object = None
    p: object = None
    m: float = 0.0
    q1: float = 0.0
    q2: float = 0.0

    def __post_init__(self):
        d = self.kind.dim
        if self.kind is Kind.CARROLL_3D:
            l = np.zeros(3) if self.l is None else np.asarray(self.l, dtype=float)
            l = l.copy()
            l.setflags(write=False)
        else:
            l = 0.0 if self.l is None else float(self.l)
        object.__setattr__(self, "l", l)
        for name in ("g", "p"):
            v = getattr(self, name)
            v = np.zeros(d) if v is None else np.asarray(v, dtype=float).copy()
            if v.shape != (d,):
                raise ValueError(f"{name} must have shape ({d},)")
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "q1", float(self.q1))
        object.__setattr__(self, "q2", float(self.q2))
        if not self.kind.extended and (self.q1 != 0.0 or self.q2 != 0.0):
            raise ValueError("central charges require the extended planar kind")

    def to_flat(self) -> np.ndarray:
        l = self.l if self.kind is Kind.CARROLL_3D else [self.l]
        parts = [np.atleast_1d(l), self.g, self.p, [self.m]]
        if self.kind.extended:
            parts.append([self.q1, self.q2])
        return np.concatenate([np.asarray(p, dtype=float) for p in parts])

    @staticmethod
    def from_flat(kind: Kind, vec) -> "Moment":
        vec = np.asarray(vec, dtype=float)
        r, d = kind.rot_dim, kind.dim
        l = vec[:r] if kind is Kind.CARROLL_3D else float(vec[0])
        g = vec[r : r + d]
        p = vec[r + d : r + 2 * d]
        m = float(vec[r + 2 * d])
        q1 = float(vec[r + 2 * d + 1]) if kind.extended else 0.0
        q2 = float(vec[r + 2 * d + 2]) if kind.extended else 0.0
        return Moment(kind, l, g, p, m, q1, q2)


@dataclass(frozen=True)
class CasimirSet:
    """The four coadjoint invariants of the extended planar group.

    ``c2`` is the renormalized anyonic spin; it is undefined (None) for
    massless moments.
    """

    c1: float
    c2: float | None
    c3: float
    c4: float


def pair(mu: Moment, z: AlgebraElement) -> float:
    """Dual pairing mu . Z (bilinear)."""
    _check_kind(mu, z)
    lw = float(np.dot(np.atleast_1d(mu.l), np.atleast_1d(z.omega)))
    out = (
        lw
        - float(np.dot(z.beta, mu.g))
        + float(np.dot(z.gamma, mu.p))
        + mu.m * z.phi
    )
    if mu.kind.extended:
        out += z.alpha1 * mu.q1 + z.alpha2 * mu.q2
    return out


def adjoint(a: GroupElement, z: AlgebraElement) -> AlgebraElement:
    """Adjoint action Ad(a) Z, computed by matrix conjugation."""
    _check_kind(a, z)
    G = to_matrix_group(a)
    M = G @ to_matrix(z) @ to_matrix_group(inverse(a))
    return algebra_from_matrix(a.kind, M)


def _pairing_signs(kind: Kind) -> np.ndarray:
    # diagonal of the pairing form in flat coordinates: +l.omega, -beta.g,
    # +gamma.p, +m.phi, +q.alpha
    r, d = kind.rot_dim, kind.dim
    s = np.ones(kind.coord_dim)
    s[r : r + d] = -1.0
    return s


def adjoint_matrix(a: GroupElement) -> np.ndarray:
    """Matrix of Ad(a) on flat algebra coordinates."""
    kind = a.kind
    n = kind.coord_dim
    out = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        out[:, j] = adjoint(a, AlgebraElement.from_flat(kind, e)).to_flat()
    return out


def coadjoint_dual(a: GroupElement, mu: Moment) -> Moment:
    """Coadjoint action computed dually, via Ad(a^-1) and the pairing.

    Works for every kind; for the extended planar kind it serves as the
    independent cross-check of the closed form in :func:`coadjoint`.
    """
    _check_kind(a, mu)
    s = _pairing_signs(a.kind)
    ad_inv = adjoint_matrix(inverse(a))
    # <Coad(a)mu, Z> = <mu, Ad(a^-1) Z>  with <.,.> = sum_i s_i mu_i Z_i
    vec = (ad_inv.T @ (s * mu.to_flat())) / s
    return Moment.from_flat(a.kind, vec)


def coadjoint(a: GroupElement, mu: Moment) -> Moment:
    """Coadjoint action.

    Extended planar closed form:

        l' = l + b x A g - c x A p + m b x c + q1 c^2 - q2 b^2
        g' = A g + m c + 2 q2 eps b
        p' = A p + m b + 2 q1 eps c
        m, q1, q2 unchanged.

    Plain kinds are handled through the matrix representation.
    """
    _check_kind(a, mu)
    if not a.kind.extended:
        return coadjoint_dual(a, mu)
    Ag = a.A @ mu.g
    Ap = a.A @ mu.p
    l = (
        mu.l
        + cross2(a.b, Ag)
        - cross2(a.c, Ap)
        + mu.m * cross2(a.b, a.c)
        + mu.q1 * float(a.c @ a.c)
        - mu.q2 * float(a.b @ a.b)
    )
    g = Ag + mu.m * a.c + 2.0 * mu.q2 * (EPS2 @ a.b)
    p = Ap + mu.m * a.b + 2.0 * mu.q1 * (EPS2 @ a.c)
    return Moment(a.kind, l, g, p, mu.m, mu.q1, mu.q2)


def casimirs(mu: Moment) -> CasimirSet:
    """Casimir invariants of a planar moment.

    C1 = m, C3 = q1, C4 = q2 and, for m != 0,

        C2 = (1 + 4 q1 q2 / m^2) l + (g x p)/m + q1 g^2/m^2 - q2 p^2/m^2.

    For m = 0 the C2 slot is None.  The formula is planar; 3d moments are
    rejected.
    """
    if mu.kind is Kind.CARROLL_3D:
        raise ValueError("casimirs are implemented for the planar kinds only")
    if mu.m == 0.0:
        c2 = None
    else:
        m2 = mu.m * mu.m
        c2 = (
            (1.0 + 4.0 * mu.q1 * mu.q2 / m2) * mu.l
            + cross2(mu.g, mu.p) / mu.m
            + mu.q1 * float(mu.g @ mu.g) / m2
            - mu.q2 * float(mu.p @ mu.p) / m2
        )
    return CasimirSet(mu.m, c2, mu.q1, mu.q2)


def moment_map(y: EvolutionPoint, scenario: Scenario) -> Moment:
    """Conserved moment of a free trajectory through y.

    Extended planar free model:

        l = m v x x + q1 x^2 - q2 v^2 + theta
        g = m x + 2 q2 eps v
        p = m v + 2 q1 eps x

    3d free models: l = x x p + s_spin u, g = m x, p = m v.
    """
    scenario.check_point(y)
    m = scenario.m
    if scenario.tag is Tag.FREE2D_EXT:
        q1, q2 = scenario.q1, scenario.q2
        l = (
            m * cross2(y.v, y.x)
            + q1 * float(y.x @ y.x)
            - q2 * float(y.v @ y.v)
            + scenario.theta
        )
        g = m * y.x + 2.0 * q2 * (EPS2 @ y.v)
        p = m * y.v + 2.0 * q1 * (EPS2 @ y.x)
        return Moment(Kind.EXT_CARROLL_2D, l, g, p, m, q1, q2)
    if scenario.tag in (Tag.FREE3D, Tag.FREE_SPIN3D):
        p = m * y.v
        l = np.cross(y.x, p)
        if scenario.tag is Tag.FREE_SPIN3D:
            l = l + scenario.s_spin * y.u
        return Moment(Kind.CARROLL_3D, l, m * y.x, p, m)
    raise ValueError(f"moment map is defined for free scenarios, not {scenario.tag}")
