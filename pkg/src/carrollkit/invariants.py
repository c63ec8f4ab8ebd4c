"""Randomized verification sweeps.

Each suite draws seeded random inputs, evaluates one algebraic or
dynamical identity through two independent routes, and reports the worst
residual against a fixed tolerance.  The CLI ``invariants`` verb and the
acceptance tests both run these.

The matrix-series exponential and the matrix product/commutator used here
are deliberately naive: they are the oracles against which the closed-form
implementations are judged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dynamics
from .coadjoint import (
    Moment,
    adjoint,
    casimirs,
    coadjoint,
    coadjoint_dual,
    moment_map,
    pair,
)
from .fields import LinearField2D, LinearField3D, UniformField3D
from .lie_core import (
    EPS2,
    AlgebraElement,
    GroupElement,
    Kind,
    act_event,
    bracket,
    compose,
    group_exp,
    inverse,
    orthogonality_defect,
    to_matrix,
    to_matrix_group,
)
from .scenarios import EvolutionPoint, Scenario, Tag


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    tolerance: float
    residual: float
    count: int

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "tolerance": self.tolerance,
            "residual": self.residual,
            "count": self.count,
        }


def truncated_matrix_exp(M: np.ndarray, terms: int = 20) -> np.ndarray:
    """Plain truncated series sum_{k<=terms} M^k / k!."""
    out = np.eye(M.shape[0])
    term = np.eye(M.shape[0])
    for k in range(1, terms + 1):
        term = term @ M / k
        out = out + term
    return out


def random_algebra_element(rng, kind: Kind, scale: float = 1.0, integer: bool = False) -> AlgebraElement:
    n = kind.coord_dim
    if integer:
        vec = rng.integers(-6, 7, size=n).astype(float)
    else:
        vec = rng.uniform(-scale, scale, size=n)
    return AlgebraElement.from_flat(kind, vec)


def random_group_element(rng, kind: Kind, scale: float = 1.0) -> GroupElement:
    a = group_exp(random_algebra_element(rng, kind, scale))
    b = group_exp(random_algebra_element(rng, kind, scale))
    return compose(a, b)


def random_moment(rng, kind: Kind, scale: float = 1.0) -> Moment:
    n = kind.coord_dim
    return Moment.from_flat(kind, rng.uniform(-scale, scale, size=n))


ALL_KINDS = (Kind.CARROLL_3D, Kind.CARROLL_2D, Kind.EXT_CARROLL_2D)


# ---------------------------------------------------------------------------
# algebra / group suite
# ---------------------------------------------------------------------------

def check_jacobi(rng, n: int = 1000) -> CheckResult:
    """Jacobi identity, exactly, on integer-coordinate triples.

    Integer draws keep every product exact in floating point, so the
    rational structure constants must cancel to literal zero; this is the
    closure certificate of the central extension.
    """
    worst = 0.0
    for kind in ALL_KINDS:
        for _ in range(n):
            z1 = random_algebra_element(rng, kind, integer=True)
            z2 = random_algebra_element(rng, kind, integer=True)
            z3 = random_algebra_element(rng, kind, integer=True)
            total = (
                bracket(z1, bracket(z2, z3))
                .add(bracket(z2, bracket(z3, z1)))
                .add(bracket(z3, bracket(z1, z2)))
            )
            worst = max(worst, float(np.max(np.abs(total.to_flat()))))
    return CheckResult("jacobi_identity_exact", worst == 0.0, 0.0, worst, 3 * n)


def check_bracket_vs_commutator(rng, n: int = 1000, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for kind in ALL_KINDS:
        for _ in range(n):
            z1 = random_algebra_element(rng, kind)
            z2 = random_algebra_element(rng, kind)
            m1, m2 = to_matrix(z1), to_matrix(z2)
            worst = max(
                worst,
                float(np.max(np.abs(to_matrix(bracket(z1, z2)) - (m1 @ m2 - m2 @ m1)))),
            )
    return CheckResult("bracket_equals_matrix_commutator", worst <= tol, tol, worst, 3 * n)


def check_group_law_vs_product(rng, n: int = 1000, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for kind in ALL_KINDS:
        for _ in range(n):
            a = random_group_element(rng, kind)
            b = random_group_element(rng, kind)
            worst = max(
                worst,
                float(
                    np.max(
                        np.abs(
                            to_matrix_group(compose(a, b))
                            - to_matrix_group(a) @ to_matrix_group(b)
                        )
                    )
                ),
            )
    return CheckResult("group_law_equals_matrix_product", worst <= tol, tol, worst, 3 * n)


def check_exp_vs_series(rng, n: int = 300, tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for kind in ALL_KINDS:
        for _ in range(n):
            z = random_algebra_element(rng, kind)
            ref = truncated_matrix_exp(to_matrix(z), terms=24)
            worst = max(worst, float(np.max(np.abs(to_matrix_group(group_exp(z)) - ref))))
    return CheckResult("exp_equals_matrix_series", worst <= tol, tol, worst, 3 * n)


def check_inverse(rng, n: int = 300, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for kind in ALL_KINDS:
        e = GroupElement.identity(kind)
        for _ in range(n):
            a = random_group_element(rng, kind)
            for g in (compose(a, inverse(a)), compose(inverse(a), a)):
                worst = max(worst, float(np.max(np.abs(g.to_flat() - e.to_flat()))))
            worst = max(
                worst,
                float(
                    np.max(
                        np.abs(
                            to_matrix_group(inverse(a))
                            - np.linalg.inv(to_matrix_group(a))
                        )
                    )
                ),
            )
    return CheckResult("inverse_law", worst <= tol, tol, worst, 3 * n)


def check_associativity(rng, n: int = 300, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for kind in ALL_KINDS:
        for _ in range(n):
            a, b, c = (random_group_element(rng, kind) for _ in range(3))
            lhs = compose(compose(a, b), c)
            rhs = compose(a, compose(b, c))
            worst = max(worst, float(np.max(np.abs(lhs.to_flat() - rhs.to_flat()))))
    return CheckResult("associativity", worst <= tol, tol, worst, 3 * n)


def check_exp_one_parameter(rng, n: int = 300, tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for kind in ALL_KINDS:
        for _ in range(n):
            z = random_algebra_element(rng, kind)
            t, u = rng.uniform(-1.5, 1.5, size=2)
            lhs = group_exp(z.scaled(t + u))
            rhs = compose(group_exp(z.scaled(t)), group_exp(z.scaled(u)))
            worst = max(worst, float(np.max(np.abs(lhs.to_flat() - rhs.to_flat()))))
    return CheckResult("exp_one_parameter_subgroup", worst <= tol, tol, worst, 3 * n)


def check_orthogonality(rng, n: int = 300, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for kind in ALL_KINDS:
        for _ in range(n):
            worst = max(worst, orthogonality_defect(random_group_element(rng, kind)))
    return CheckResult("rotation_block_orthogonal", worst <= tol, tol, worst, 3 * n)


def check_event_action(rng, n: int = 300, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for kind in ALL_KINDS:
        d = kind.dim
        for _ in range(n):
            a = random_group_element(rng, kind)
            b = random_group_element(rng, kind)
            x = rng.uniform(-2, 2, size=d)
            s = float(rng.uniform(-2, 2))
            x1, s1 = act_event(compose(a, b), x, s)
            xb, sb = act_event(b, x, s)
            x2, s2 = act_event(a, xb, sb)
            worst = max(worst, float(np.max(np.abs(x1 - x2))), abs(s1 - s2))
    return CheckResult("event_action_homomorphism", worst <= tol, tol, worst, 3 * n)


def run_algebra_suite(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_jacobi(rng),
        check_bracket_vs_commutator(rng),
        check_group_law_vs_product(rng),
        check_exp_vs_series(rng),
        check_inverse(rng),
        check_associativity(rng),
        check_exp_one_parameter(rng),
        check_orthogonality(rng),
        check_event_action(rng),
    ]


# ---------------------------------------------------------------------------
# coadjoint suite
# ---------------------------------------------------------------------------

def check_coadjoint_closed_vs_dual(rng, n: int = 1000, tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    kind = Kind.EXT_CARROLL_2D
    for _ in range(n):
        a = random_group_element(rng, kind)
        mu = random_moment(rng, kind)
        lhs = coadjoint(a, mu).to_flat()
        rhs = coadjoint_dual(a, mu).to_flat()
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckResult("coadjoint_closed_form_equals_dual", worst <= tol, tol, worst, n)


def check_duality_identity(rng, n: int = 400, tol: float = 1e-10) -> CheckResult:
    """pair(Coad(a) mu, Z) = pair(mu, Ad(a^-1) Z)."""
    worst = 0.0
    for kind in ALL_KINDS:
        for _ in range(n):
            a = random_group_element(rng, kind)
            mu = random_moment(rng, kind)
            z = random_algebra_element(rng, kind)
            lhs = pair(coadjoint(a, mu), z)
            rhs = pair(mu, adjoint(inverse(a), z))
            worst = max(worst, abs(lhs - rhs))
    return CheckResult("coadjoint_duality_identity", worst <= tol, tol, worst, 3 * n)


def check_adjoint_homomorphism(rng, n: int = 300, tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for kind in ALL_KINDS:
        for _ in range(n):
            a = random_group_element(rng, kind)
            z1 = random_algebra_element(rng, kind)
            z2 = random_algebra_element(rng, kind)
            lhs = adjoint(a, bracket(z1, z2)).to_flat()
            rhs = bracket(adjoint(a, z1), adjoint(a, z2)).to_flat()
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckResult("adjoint_bracket_homomorphism", worst <= tol, tol, worst, 3 * n)


def check_casimir_invariance(rng, n: int = 1000, tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    kind = Kind.EXT_CARROLL_2D
    for _ in range(n):
        mu = random_moment(rng, kind)
        if abs(mu.m) < 0.1:
            mu = Moment(kind, mu.l, mu.g, mu.p, mu.m + 0.5, mu.q1, mu.q2)
        a = random_group_element(rng, kind)
        c0 = casimirs(mu)
        c1 = casimirs(coadjoint(a, mu))
        worst = max(
            worst,
            abs(c0.c1 - c1.c1),
            abs(c0.c2 - c1.c2),
            abs(c0.c3 - c1.c3),
            abs(c0.c4 - c1.c4),
        )
    return CheckResult("casimir_invariance", worst <= tol, tol, worst, n)


def check_moment_equivariance(rng, n: int = 400, tol: float = 1e-10) -> CheckResult:
    """moment_map(a . y) = Coad(a) moment_map(y) on the extended free model."""
    worst = 0.0
    for _ in range(n):
        m = float(rng.uniform(0.3, 2.0))
        q1 = float(rng.uniform(-1.0, 1.0))
        q2 = float(rng.uniform(-1.0, 1.0))
        sc = Scenario(Tag.FREE2D_EXT, m=m, q1=q1, q2=q2)
        a = random_group_element(rng, Kind.EXT_CARROLL_2D)
        x = rng.uniform(-2, 2, size=2)
        v = rng.uniform(-2, 2, size=2)
        s = float(rng.uniform(-1, 1))
        w = float(rng.uniform(-1, 1))
        z = float(rng.uniform(-1, 1))
        y = EvolutionPoint(x, v, s, w=w, z=z)
        # extended action on the evolution space
        Ax = a.A @ x
        y2 = EvolutionPoint(
            Ax + a.c,
            a.A @ v + a.b,
            s + a.f - float(a.b @ Ax),
            w=w + a.a1 - float((EPS2 @ a.c) @ Ax),
            z=z + a.a2 - float(a.b @ (a.A @ (EPS2 @ v))),
        )
        lhs = moment_map(y2, sc).to_flat()
        rhs = coadjoint(a, moment_map(y, sc)).to_flat()
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckResult("moment_map_equivariance", worst <= tol, tol, worst, n)


def run_coadjoint_suite(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_coadjoint_closed_vs_dual(rng),
        check_duality_identity(rng),
        check_adjoint_homomorphism(rng),
        check_casimir_invariance(rng),
        check_moment_equivariance(rng),
    ]


# ---------------------------------------------------------------------------
# dynamics suite
# ---------------------------------------------------------------------------

def random_scenario_point(rng, tag: Tag):
    """Nondegenerate random scenario of the given tag with a linear preset
    field, plus an evolution point."""
    m = float(rng.uniform(0.4, 2.0))
    q = float(rng.uniform(-1.5, 1.5))
    mu = float(rng.uniform(-1.0, 1.0))
    theta = float(rng.uniform(-1.0, 1.0))
    s_spin = float(rng.uniform(0.4, 2.0)) * (1 if rng.uniform() < 0.5 else -1)
    if tag.dim == 3:
        fld = LinearField3D(
            E=rng.uniform(-1, 1, size=3),
            B0=rng.uniform(-1, 1, size=3),
            B_jacobian=rng.uniform(-0.5, 0.5, size=(3, 3)),
        )
        if tag is Tag.FREE3D:
            sc = Scenario(tag, m=m)
        elif tag is Tag.FREE_SPIN3D:
            sc = Scenario(tag, m=m, s_spin=s_spin)
        elif tag is Tag.EM3D_SPINLESS:
            sc = Scenario(tag, m=m, q=q, field=fld)
        else:
            sc = Scenario(tag, m=m, q=q, s_spin=s_spin, mu=mu, field=fld)
        u = None
        if tag.has_spin:
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
        y = EvolutionPoint(
            rng.uniform(-1, 1, size=3),
            rng.uniform(-1, 1, size=3),
            float(rng.uniform(-1, 1)),
            u,
        )
        return sc, y

    q1 = float(rng.uniform(-1.0, 1.0))
    q2 = float(rng.uniform(-1.0, 1.0))
    fld = LinearField2D(
        E=rng.uniform(-1, 1, size=2),
        B0=rng.uniform(-0.5, 0.5),
        B_gradient=rng.uniform(-0.5, 0.5, size=2),
    )
    y = EvolutionPoint(
        rng.uniform(-1, 1, size=2),
        rng.uniform(-1, 1, size=2),
        float(rng.uniform(-1, 1)),
        w=float(rng.uniform(-1, 1)),
        z=float(rng.uniform(-1, 1)),
    )
    if tag is Tag.FREE2D_EXT:
        while abs(m * m + 4 * q1 * q2) < 0.1:
            q1 = float(rng.uniform(-1.0, 1.0))
            q2 = float(rng.uniform(-1.0, 1.0))
        return Scenario(tag, m=m, q1=q1, q2=q2, theta=theta), y
    if tag is Tag.EM2D_EXT:
        while True:
            b = fld.magnetic(y.x, y.s)
            if abs(dynamics.effective_mass_sq(m, q1, q2, q * b)) > 0.1:
                break
            q1 = float(rng.uniform(-1.0, 1.0))
            q2 = float(rng.uniform(-1.0, 1.0))
        return Scenario(tag, m=m, q=q, q1=q1, q2=q2, theta=theta, mu=mu, field=fld), y
    while abs(q1) < 0.1:
        q1 = float(rng.uniform(-1.0, 1.0))
    return Scenario(tag, q1=q1, q2=q2, theta=theta, mu=mu, field=fld), y


def check_eom_vs_kernel(rng, n: int = 1000, tol: float = 1e-9) -> CheckResult:
    tags = list(Tag)
    worst = 0.0
    for k in range(n):
        tag = tags[k % len(tags)]
        sc, y = random_scenario_point(rng, tag)
        a = dynamics.eom(y, sc)
        b = dynamics.eom_from_kernel(y, sc)
        if a.degenerate or b.degenerate:
            return CheckResult("eom_equals_kernel_direction", False, tol, np.inf, n)
        worst = max(worst, float(np.max(np.abs(a.dx - b.dx))))
        worst = max(worst, float(np.max(np.abs(a.dv - b.dv))))
        if a.du is not None:
            worst = max(worst, float(np.max(np.abs(a.du - b.du))))
    return CheckResult("eom_equals_kernel_direction", worst <= tol, tol, worst, n)


def check_sigma_antisymmetry(rng, n: int = 200) -> CheckResult:
    tags = list(Tag)
    worst = 0.0
    for k in range(n):
        sc, y = random_scenario_point(rng, tags[k % len(tags)])
        sig = dynamics.presymplectic_matrix(y, sc)
        worst = max(worst, float(np.max(np.abs(sig + sig.T))))
    return CheckResult("two_form_antisymmetry_exact", worst == 0.0, 0.0, worst, n)


def check_kernel_dimensions() -> CheckResult:
    y2 = EvolutionPoint([0.3, -0.2], [0.1, 0.4], 0.0, w=0.2, z=-0.1)
    sc_reg = Scenario(Tag.FREE2D_EXT, m=1.0, q1=0.4, q2=-0.3)
    sc_deg = Scenario(Tag.FREE2D_EXT, m=2.0, q1=1.0, q2=-1.0)  # m^2 + 4 q1 q2 = 0
    y3 = EvolutionPoint([0.1, 0.2, -0.4], [0.5, -0.1, 0.3], 0.0)
    sc3 = Scenario(Tag.FREE3D, m=1.3)
    ok = True
    dims = []
    for sc, y, want in ((sc_reg, y2, 3), (sc_deg, y2, 5), (sc3, y3, 1)):
        k = dynamics.kernel_basis(dynamics.presymplectic_matrix(y, sc)).shape[1]
        dims.append(k)
        ok = ok and (k == want)
    zero_dim = dynamics.kernel_basis(np.zeros((7, 7))).shape[1]
    ok = ok and zero_dim == 7
    residual = 0.0 if ok else float(max(dims))
    return CheckResult("kernel_dimensions", ok, 0.0, residual, 4)


def check_free_conservation(tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    sc = Scenario(Tag.FREE2D_EXT, m=1.0, q1=0.3, q2=0.2, theta=0.7)
    y0 = EvolutionPoint([0.4, -1.0], [0.3, 0.8], 0.0, w=0.1, z=0.2)
    traj = dynamics.integrate(y0, sc, (0.0, 10.0), step=1e-3)
    worst = max(worst, max(dynamics.conserved_drift(traj).values()))
    sc3 = Scenario(Tag.FREE_SPIN3D, m=1.2, s_spin=0.5)
    u0 = np.array([0.0, 0.6, 0.8])
    y3 = EvolutionPoint([0.2, 0.1, -0.3], [1.0, 0.0, 0.5], 0.0, u0)
    traj3 = dynamics.integrate(y3, sc3, (0.0, 10.0), step=1e-3)
    worst = max(worst, max(dynamics.conserved_drift(traj3).values()))
    return CheckResult("free_moment_conservation", worst <= tol, tol, worst, 2)


def check_magnetic_transparency(tol: float = 0.0) -> CheckResult:
    """3d spinless trajectories do not depend on B at all."""
    y0 = EvolutionPoint([0.1, 0.2, 0.3], [0.0, 0.1, -0.2], 0.0)
    base = Scenario(
        Tag.EM3D_SPINLESS, m=1.0, q=0.7, field=UniformField3D(E=(0.2, -0.1, 0.4))
    )
    with_b = Scenario(
        Tag.EM3D_SPINLESS,
        m=1.0,
        q=0.7,
        field=UniformField3D(E=(0.2, -0.1, 0.4), B=(3.0, -2.0, 1.0)),
    )
    t1 = dynamics.integrate(y0, base, (0.0, 1.0), step=1e-3)
    t2 = dynamics.integrate(y0, with_b, (0.0, 1.0), step=1e-3)
    worst = max(
        float(np.max(np.abs(t1.x - t2.x))), float(np.max(np.abs(t1.v - t2.v)))
    )
    return CheckResult("magnetic_field_transparent_3d", worst <= tol, tol, worst, 2)


def photon_limit_errors(ms=None):
    """Tangent-field distance between the massive planar model at
    (m, q) = (m_k, m_k) and the massless member, per m_k."""
    if ms is None:
        ms = [10.0 ** (-k) for k in range(1, 7)]
    fld = LinearField2D(E=(0.8, -0.3), B0=0.2, B_gradient=(0.5, -0.7))
    q1, q2, theta, mu = 0.9, 0.6, 1.1, 0.8
    y = EvolutionPoint([0.3, -0.2], [0.0, 0.0], 0.0, w=0.0, z=0.0)
    photon = Scenario(Tag.PHOTON2D, q1=q1, q2=q2, theta=theta, mu=mu, field=fld)
    ref = dynamics.eom(y, photon)
    errs = []
    for m in ms:
        sc = Scenario(
            Tag.EM2D_EXT, m=m, q=m, q1=q1, q2=q2, theta=theta, mu=mu, field=fld
        )
        res = dynamics.eom(y, sc)
        errs.append(
            max(
                float(np.max(np.abs(res.dx - ref.dx))),
                float(np.max(np.abs(m * res.dv - 0.0))),  # d(mv)/ds -> 0
            )
        )
    return ms, errs


def check_photon_limit(tol_ratio: tuple = (7.0, 13.0)) -> CheckResult:
    ms, errs = photon_limit_errors()
    ok = all(e > 0 for e in errs)
    worst = 0.0
    for k in range(1, len(errs)):
        ratio = errs[k - 1] / errs[k]
        worst = max(worst, abs(ratio - 10.0))
        ok = ok and (tol_ratio[0] <= ratio <= tol_ratio[1])
    return CheckResult("massless_limit_linear", ok, tol_ratio[1] - 10.0, worst, len(ms))


def check_unextended_reduction(tol: float = 1e-12) -> CheckResult:
    """q1 = q2 = 0 planar model reproduces the unextended equations."""
    fld = LinearField2D(E=(0.4, 0.9), B0=0.7, B_gradient=(0.2, -0.3))
    sc = Scenario(Tag.EM2D_EXT, m=1.3, q=0.8, q1=0.0, q2=0.0, field=fld)
    y = EvolutionPoint([0.2, -0.5], [0.1, 0.3], 0.2, w=0.0, z=0.0)
    res = dynamics.eom(y, sc)
    want_dv = (sc.q / sc.m) * np.asarray(fld.electric(y.x, y.s))
    worst = max(
        float(np.max(np.abs(res.dx))), float(np.max(np.abs(res.dv - want_dv)))
    )
    return CheckResult("unextended_reduction", worst <= tol, tol, worst, 1)


def run_dynamics_suite(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_sigma_antisymmetry(rng),
        check_kernel_dimensions(),
        check_eom_vs_kernel(rng),
        check_free_conservation(),
        check_magnetic_transparency(),
        check_photon_limit(),
        check_unextended_reduction(),
    ]


def run_all(seed: int = 0) -> dict:
    suites = {
        "algebra": run_algebra_suite(seed),
        "coadjoint": run_coadjoint_suite(seed),
        "dynamics": run_dynamics_suite(seed),
    }
    return {
        "seed": seed,
        "passed": all(c.passed for cs in suites.values() for c in cs),
        "suites": {
            name: [c.as_dict() for c in checks] for name, checks in suites.items()
        },
    }
