"""Carroll groups and algebras in coordinate and matrix form.

Three kinds are supported: the Carroll group of 3+1 and 2+1 dimensional
flat Carroll spacetimes, and the doubly centrally extended planar Carroll
group.  Elements are immutable coordinate records.  Every coordinate-level
operation (bracket, exponential, composition, inverse) is backed by a
faithful block matrix representation, and the test suite asserts the two
levels agree; the matrix representation is therefore the sign/normalization
authority for all structure constants used here.

Conventions
-----------
* ``EPS2`` is the planar skew matrix with ``EPS2[0, 1] = +1``; the planar
  cross product is ``cross2(a, b) = a . EPS2 b = a1*b2 - a2*b1``.
* The planar rotation generator is ``j(omega) = omega * EPS2``; in 3d,
  ``j(omega) x = omega x x``.
* Brackets are matrix commutators ``[Z1, Z2] = Z1 Z2 - Z2 Z1`` of the
  block representation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

EPS2 = np.array([[0.0, 1.0], [-1.0, 0.0]])

# Coordinate tolerance used when extracting algebra/group coordinates from
# a raw matrix: anything that deviates more from the block pattern is not
# an element of the represented (sub)algebra/(sub)group.
PATTERN_TOL = 1e-10


class KindMismatchError(ValueError):
    """Raised when operands belong to different algebra/group kinds."""


class MatrixPatternError(ValueError):
    """Raised when a matrix does not fit the expected block pattern."""


class Kind(enum.Enum):
    """Which Carroll algebra/group a value belongs to."""

    CARROLL_3D = "carroll3+1"
    CARROLL_2D = "carroll2+1"
    EXT_CARROLL_2D = "ext-carroll2+1"

    @property
    def dim(self) -> int:
        return 3 if self is Kind.CARROLL_3D else 2

    @property
    def rot_dim(self) -> int:
        return 3 if self is Kind.CARROLL_3D else 1

    @property
    def extended(self) -> bool:
        return self is Kind.EXT_CARROLL_2D

    @property
    def matrix_size(self) -> int:
        # plain kinds act on R^{d+1} x {1}; the extended planar group needs
        # two more central columns.
        return 6 if self.extended else self.dim + 2

    @property
    def coord_dim(self) -> int:
        # omega, beta, gamma, phi (+ alpha1, alpha2 when extended)
        n = self.rot_dim + 2 * self.dim + 1
        return n + 2 if self.extended else n


def cross2(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def skew3(w: np.ndarray) -> np.ndarray:
    """Matrix j(w) with j(w) x = w x x."""
    return np.array(
        [
            [0.0, -w[2], w[1]],
            [w[2], 0.0, -w[0]],
            [-w[1], w[0], 0.0],
        ]
    )


def _as_vec(x, n: int, name: str) -> np.ndarray:
    v = np.zeros(n) if x is None else np.asarray(x, dtype=float).reshape(-1)
    if v.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},), got {v.shape}")
    v = v.copy()
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class AlgebraElement:
    """Element of carr(d+1) or of the extended planar algebra.

    ``omega`` is the rotation coefficient (a 3-vector for the 3d kind, a
    scalar for planar kinds), ``beta`` the boost, ``gamma`` the space
    translation, ``phi`` the time translation and ``alpha1``/``alpha2`` the
    two central coefficients (extended planar kind only).
    """

    kind: Kind
    omega: object = None
    beta: object = None
    gamma: object = None
    phi: float = 0.0
    alpha1: float = 0.0
    alpha2: float = 0.0

    def __post_init__(self):
        d = self.kind.dim
        if self.kind is Kind.CARROLL_3D:
            om = _as_vec(self.omega, 3, "omega")
        else:
            om = 0.0 if self.omega is None else float(self.omega)
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "beta", _as_vec(self.beta, d, "beta"))
        object.__setattr__(self, "gamma", _as_vec(self.gamma, d, "gamma"))
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "alpha1", float(self.alpha1))
        object.__setattr__(self, "alpha2", float(self.alpha2))
        if not self.kind.extended and (self.alpha1 != 0.0 or self.alpha2 != 0.0):
            raise ValueError("central coefficients require the extended planar kind")

    def scaled(self, t: float) -> "AlgebraElement":
        return AlgebraElement(
            self.kind,
            omega=t * self.omega,
            beta=t * self.beta,
            gamma=t * self.gamma,
            phi=t * self.phi,
            alpha1=t * self.alpha1,
            alpha2=t * self.alpha2,
        )

    def add(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_kind(self, other)
        return AlgebraElement(
            self.kind,
            omega=self.omega + other.omega,
            beta=self.beta + other.beta,
            gamma=self.gamma + other.gamma,
            phi=self.phi + other.phi,
            alpha1=self.alpha1 + other.alpha1,
            alpha2=self.alpha2 + other.alpha2,
        )

    def to_flat(self) -> np.ndarray:
        """Flat record: omega, beta, gamma, phi[, alpha1, alpha2]."""
        om = self.omega if self.kind is Kind.CARROLL_3D else [self.omega]
        parts = [np.atleast_1d(om), self.beta, self.gamma, [self.phi]]
        if self.kind.extended:
            parts.append([self.alpha1, self.alpha2])
        return np.concatenate([np.asarray(p, dtype=float) for p in parts])

    @staticmethod
    def from_flat(kind: Kind, vec) -> "AlgebraElement":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (kind.coord_dim,):
            raise ValueError(f"expected {kind.coord_dim} coordinates for {kind}")
        r, d = kind.rot_dim, kind.dim
        om = vec[:r] if kind is Kind.CARROLL_3D else float(vec[0])
        beta = vec[r : r + d]
        gamma = vec[r + d : r + 2 * d]
        phi = float(vec[r + 2 * d])
        a1 = float(vec[r + 2 * d + 1]) if kind.extended else 0.0
        a2 = float(vec[r + 2 * d + 2]) if kind.extended else 0.0
        return AlgebraElement(kind, om, beta, gamma, phi, a1, a2)


@dataclass(frozen=True)
class GroupElement:
    """Group element (A, b, c, f[, a1, a2])."""

    kind: Kind
    A: object = None
    b: object = None
    c: object = None
    f: float = 0.0
    a1: float = 0.0
    a2: float = 0.0

    def __post_init__(self):
        d = self.kind.dim
        A = np.eye(d) if self.A is None else np.asarray(self.A, dtype=float)
        if A.shape != (d, d):
            raise ValueError(f"A must be {d}x{d}")
        A = A.copy()
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", _as_vec(self.b, d, "b"))
        object.__setattr__(self, "c", _as_vec(self.c, d, "c"))
        object.__setattr__(self, "f", float(self.f))
        object.__setattr__(self, "a1", float(self.a1))
        object.__setattr__(self, "a2", float(self.a2))
        if not self.kind.extended and (self.a1 != 0.0 or self.a2 != 0.0):
            raise ValueError("central parameters require the extended planar kind")

    @staticmethod
    def identity(kind: Kind) -> "GroupElement":
        return GroupElement(kind)

    def to_flat(self) -> np.ndarray:
        """Flat record: A row-major, b, c, f[, a1, a2]."""
        parts = [self.A.reshape(-1), self.b, self.c, [self.f]]
        if self.kind.extended:
            parts.append([self.a1, self.a2])
        return np.concatenate([np.asarray(p, dtype=float) for p in parts])

    @staticmethod
    def from_flat(kind: Kind, vec) -> "GroupElement":
        vec = np.asarray(vec, dtype=float)
        d = kind.dim
        n = d * d + 2 * d + 1 + (2 if kind.extended else 0)
        if vec.shape != (n,):
            raise ValueError(f"expected {n} entries for {kind}")
        A = vec[: d * d].reshape(d, d)
        b = vec[d * d : d * d + d]
        c = vec[d * d + d : d * d + 2 * d]
        f = float(vec[d * d + 2 * d])
        a1 = float(vec[d * d + 2 * d + 1]) if kind.extended else 0.0
        a2 = float(vec[d * d + 2 * d + 2]) if kind.extended else 0.0
        return GroupElement(kind, A, b, c, f, a1, a2)


def _check_kind(x, y):
    if x.kind is not y.kind:
        raise KindMismatchError(f"kind mismatch: {x.kind} vs {y.kind}")


def orthogonality_defect(a: GroupElement) -> float:
    """max(|A^T A - I|, |det A - 1|); the rotation-block sanity measure."""
    d = a.kind.dim
    return max(
        float(np.max(np.abs(a.A.T @ a.A - np.eye(d)))),
        abs(float(np.linalg.det(a.A)) - 1.0),
    )


# ---------------------------------------------------------------------------
# bracket
# ---------------------------------------------------------------------------

def bracket(z1: AlgebraElement, z2: AlgebraElement) -> AlgebraElement:
    """Lie bracket, matching the matrix commutator of :func:`to_matrix`.

    Planar structure constants (extended kind; the plain planar kind drops
    the central outputs):

        [J, P_i] = -eps_ij P_j      [P_i, P_j] = 2 eps_ij A1
        [J, K_i] = -eps_ij K_j      [K_i, K_j] = -2 eps_ij A2
        [K_i, P_j] = -delta_ij M

    In 3d: [J_i, J_j] = eps_ijk J_k, [J_i, P_j] = eps_ijk P_k,
    [J_i, K_j] = eps_ijk K_k, [K_i, P_j] = -delta_ij M.
    """
    _check_kind(z1, z2)
    kind = z1.kind
    phi = float(np.dot(z2.beta, z1.gamma) - np.dot(z1.beta, z2.gamma))
    if kind is Kind.CARROLL_3D:
        return AlgebraElement(
            kind,
            omega=np.cross(z1.omega, z2.omega),
            beta=np.cross(z1.omega, z2.beta) - np.cross(z2.omega, z1.beta),
            gamma=np.cross(z1.omega, z2.gamma) - np.cross(z2.omega, z1.gamma),
            phi=phi,
        )
    beta = z1.omega * (EPS2 @ z2.beta) - z2.omega * (EPS2 @ z1.beta)
    gamma = z1.omega * (EPS2 @ z2.gamma) - z2.omega * (EPS2 @ z1.gamma)
    if kind.extended:
        a1 = 2.0 * cross2(z1.gamma, z2.gamma)
        a2 = -2.0 * cross2(z1.beta, z2.beta)
        return AlgebraElement(kind, 0.0, beta, gamma, phi, a1, a2)
    return AlgebraElement(kind, 0.0, beta, gamma, phi)


# ---------------------------------------------------------------------------
# matrix representations
# ---------------------------------------------------------------------------

def to_matrix(z: AlgebraElement) -> np.ndarray:
    """Block matrix representation of an algebra element."""
    kind = z.kind
    n = kind.matrix_size
    M = np.zeros((n, n))
    d = kind.dim
    if kind is Kind.CARROLL_3D:
        M[:d, :d] = skew3(z.omega)
        M[:d, d + 1] = z.gamma
        M[d, :d] = -z.beta
        M[d, d + 1] = z.phi
        return M
    j = z.omega * EPS2
    if not kind.extended:
        M[:2, :2] = j
        M[:2, 3] = z.gamma
        M[2, :2] = -z.beta
        M[2, 3] = z.phi
        return M
    M[:2, :2] = j
    M[:2, 3] = z.gamma
    M[:2, 5] = EPS2 @ z.beta
    M[2, :2] = -z.beta
    M[2, 3] = z.phi
    M[2, 5] = z.alpha2
    M[4, :2] = EPS2.T @ z.gamma  # row (gamma^T eps)
    M[4, 3] = z.alpha1
    M[4, 5] = -z.phi
    return M


def to_matrix_group(a: GroupElement) -> np.ndarray:
    """Block matrix representation of a group element."""
    kind = a.kind
    n = kind.matrix_size
    M = np.eye(n)
    d = kind.dim
    if not kind.extended:
        M[:d, :d] = a.A
        M[:d, d + 1] = a.c
        M[d, :d] = -a.b @ a.A
        M[d, d + 1] = a.f
        return M
    M[:2, :2] = a.A
    M[:2, 3] = a.c
    M[:2, 5] = EPS2 @ a.b
    M[2, :2] = -a.b @ a.A
    M[2, 3] = a.f
    M[2, 5] = a.a2
    M[4, :2] = -(EPS2 @ a.c) @ a.A
    M[4, 3] = a.a1
    M[4, 5] = -(a.f + float(np.dot(a.b, a.c)))
    return M


def algebra_from_matrix(kind: Kind, M: np.ndarray, tol: float = PATTERN_TOL) -> AlgebraElement:
    """Extract coordinates from a matrix; error if off the block pattern."""
    M = np.asarray(M, dtype=float)
    if M.shape != (kind.matrix_size,) * 2:
        raise MatrixPatternError(f"wrong matrix size for {kind}")
    d = kind.dim
    if kind is Kind.CARROLL_3D:
        J = M[:d, :d]
        om = np.array([J[2, 1], J[0, 2], J[1, 0]])
        z = AlgebraElement(kind, om, -M[d, :d], M[:d, d + 1], M[d, d + 1])
    elif not kind.extended:
        z = AlgebraElement(kind, M[0, 1], -M[2, :2], M[:2, 3], M[2, 3])
    else:
        z = AlgebraElement(
            kind,
            M[0, 1],
            -M[2, :2],
            M[:2, 3],
            M[2, 3],
            alpha1=M[4, 3],
            alpha2=M[2, 5],
        )
    resid = float(np.max(np.abs(to_matrix(z) - M)))
    if resid > tol:
        raise MatrixPatternError(f"matrix off the algebra block pattern by {resid:.3e}")
    return z


def group_from_matrix(kind: Kind, M: np.ndarray, tol: float = PATTERN_TOL) -> GroupElement:
    M = np.asarray(M, dtype=float)
    if M.shape != (kind.matrix_size,) * 2:
        raise MatrixPatternError(f"wrong matrix size for {kind}")
    d = kind.dim
    A = M[:d, :d]
    if not kind.extended:
        c = M[:d, d + 1]
        b = -A @ M[d, :d]
        g = GroupElement(kind, A, b, c, M[d, d + 1])
    else:
        b = -A @ M[2, :2]
        g = GroupElement(kind, A, b, M[:2, 3], M[2, 3], a1=M[4, 3], a2=M[2, 5])
    resid = float(np.max(np.abs(to_matrix_group(g) - M)))
    if resid > tol:
        raise MatrixPatternError(f"matrix off the group block pattern by {resid:.3e}")
    return g


# ---------------------------------------------------------------------------
# exponential, composition, inverse, spacetime action
# ---------------------------------------------------------------------------

def _rot_coeffs(theta: float):
    """Series-safe coefficients sin(t)/t, (1-cos t)/t^2, (t-sin t)/t^3,
    (t^2/2 - 1 + cos t)/t^4."""
    if abs(theta) < 1e-3:
        t2 = theta * theta
        s1 = 1.0 - t2 / 6.0 + t2 * t2 / 120.0
        c2 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
        s3 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
        c4 = 1.0 / 24.0 - t2 / 720.0 + t2 * t2 / 40320.0
        return s1, c2, s3, c4
    s, c = math.sin(theta), math.cos(theta)
    t2 = theta * theta
    return s / theta, (1.0 - c) / t2, (theta - s) / (t2 * theta), (t2 / 2.0 - 1.0 + c) / (t2 * t2)


def group_exp(z: AlgebraElement) -> GroupElement:
    """Group exponential, in closed form per block.

    The rotation block is exponentiated by trigonometry; the remaining
    coordinates follow from integrating g(t + dt) = g(t) exp(dt Z) in
    coordinates: A' = A j(omega), b' = A beta, c' = A gamma,
    f' = phi - <b, A gamma>, a1' = alpha1 - <eps c, A gamma>,
    a2' = alpha2 - <b, A eps beta>.  The nested rotation integrals all have
    closed-form coefficients.
    """
    kind = z.kind
    if kind is Kind.CARROLL_3D:
        theta = float(np.linalg.norm(z.omega))
        J = skew3(z.omega)
        s1, c2, s3, c4 = _rot_coeffs(theta)
        A = np.eye(3) + s1 * J + c2 * (J @ J)
        D = np.eye(3) + c2 * J + s3 * (J @ J)
        E = 0.5 * np.eye(3) + s3 * J + c4 * (J @ J)
        b = D @ z.beta
        c = D @ z.gamma
        f = z.phi - float(z.beta @ (E @ z.gamma))
        return GroupElement(kind, A, b, c, f)
    w = float(z.omega)
    s1, c2, s3, _ = _rot_coeffs(w)
    A = math.cos(w) * np.eye(2) + math.sin(w) * EPS2
    D = s1 * np.eye(2) + (c2 * w) * EPS2      # integral of exp(t w eps)
    E = c2 * np.eye(2) + (s3 * w) * EPS2      # double integral coefficients
    b = D @ z.beta
    c = D @ z.gamma
    f = z.phi - float(z.beta @ (E @ z.gamma))
    if not kind.extended:
        return GroupElement(kind, A, b, c, f)
    e2 = s3 * w  # (w - sin w)/w^2
    a1 = z.alpha1 - e2 * float(z.gamma @ z.gamma)
    a2 = z.alpha2 + e2 * float(z.beta @ z.beta)
    return GroupElement(kind, A, b, c, f, a1, a2)


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    """Group law.  For the extended planar group:

        (A, b, c, f, a1, a2) (A', b', c', f', a1', a2') =
        (A A', A b' + b, A c' + c, f + f' - <b, A c'>,
         a1 + a1' - <eps c, A c'>, a2 + a2' - <b, A eps b'>)

    Plain kinds drop the central entries.
    """
    _check_kind(a, b)
    kind = a.kind
    Ac = a.A @ b.c
    f = a.f + b.f - float(np.dot(a.b, Ac))
    if not kind.extended:
        return GroupElement(kind, a.A @ b.A, a.A @ b.b + a.b, Ac + a.c, f)
    a1 = a.a1 + b.a1 - float(np.dot(EPS2 @ a.c, Ac))
    a2 = a.a2 + b.a2 - float(np.dot(a.b, a.A @ (EPS2 @ b.b)))
    return GroupElement(kind, a.A @ b.A, a.A @ b.b + a.b, Ac + a.c, f, a1, a2)


def inverse(a: GroupElement) -> GroupElement:
    """Group inverse, solved from the group law."""
    At = a.A.T
    f = -a.f - float(np.dot(a.b, a.c))
    if not a.kind.extended:
        return GroupElement(a.kind, At, -(At @ a.b), -(At @ a.c), f)
    return GroupElement(a.kind, At, -(At @ a.b), -(At @ a.c), f, -a.a1, -a.a2)


def act_event(a: GroupElement, x, s: float):
    """Action on a spacetime event: x' = A x + c, s' = s - <b, A x> + f."""
    x = np.asarray(x, dtype=float)
    Ax = a.A @ x
    return Ax + a.c, float(s) - float(np.dot(a.b, Ax)) + a.f
