import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carrollkit.invariants import (
    random_algebra_element,
    random_group_element,
    truncated_matrix_exp,
)
from carrollkit.lie_core import (
    EPS2,
    AlgebraElement,
    GroupElement,
    Kind,
    KindMismatchError,
    MatrixPatternError,
    act_event,
    algebra_from_matrix,
    bracket,
    compose,
    group_exp,
    group_from_matrix,
    inverse,
    orthogonality_defect,
    to_matrix,
    to_matrix_group,
)

ALL_KINDS = [Kind.CARROLL_3D, Kind.CARROLL_2D, Kind.EXT_CARROLL_2D]
EXT = Kind.EXT_CARROLL_2D


def basis_element(kind, name, i=0):
    kw = {}
    if name == "J":
        kw["omega"] = np.eye(3)[i] if kind is Kind.CARROLL_3D else 1.0
    elif name == "K":
        kw["beta"] = np.eye(kind.dim)[i]
    elif name == "P":
        kw["gamma"] = np.eye(kind.dim)[i]
    elif name == "M":
        kw["phi"] = 1.0
    return AlgebraElement(kind, **kw)


# ---------------------------------------------------------------------------
# bracket
# ---------------------------------------------------------------------------

def test_bracket_structure_constants_match_matrix_rep():
    # sign/normalization conventions are pinned by the 6x6 representation:
    # [J, P_1] = -P_2, [K_i, P_j] = -delta_ij M, [P_1, P_2] = 2 A_1,
    # [K_1, K_2] = -2 A_2
    j = basis_element(EXT, "J")
    p1, p2 = basis_element(EXT, "P", 0), basis_element(EXT, "P", 1)
    k1, k2 = basis_element(EXT, "K", 0), basis_element(EXT, "K", 1)

    jp = bracket(j, p1)
    assert np.allclose(jp.gamma, [0.0, -1.0]) and jp.alpha1 == jp.alpha2 == 0.0
    jk = bracket(j, k1)
    assert np.allclose(jk.beta, [0.0, -1.0])
    kp = bracket(k1, p1)
    assert kp.phi == -1.0 and not np.any(kp.beta) and not np.any(kp.gamma)
    assert bracket(k1, p2).phi == 0.0
    pp = bracket(p1, p2)
    assert pp.alpha1 == 2.0 and pp.alpha2 == 0.0 and pp.phi == 0.0
    kk = bracket(k1, k2)
    assert kk.alpha2 == -2.0 and kk.alpha1 == 0.0


def test_bracket_3d_rotation_constants():
    for i, jidx, want in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        out = bracket(
            basis_element(Kind.CARROLL_3D, "J", i), basis_element(Kind.CARROLL_3D, "J", jidx)
        )
        assert np.allclose(out.omega, np.eye(3)[want])
        outp = bracket(
            basis_element(Kind.CARROLL_3D, "J", i), basis_element(Kind.CARROLL_3D, "P", jidx)
        )
        assert np.allclose(outp.gamma, np.eye(3)[want])


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_bracket_self_is_zero(kind):
    rng = np.random.default_rng(3)
    for _ in range(20):
        z = random_algebra_element(rng, kind)
        assert np.all(bracket(z, z).to_flat() == 0.0)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_bracket_equals_matrix_commutator(kind):
    rng = np.random.default_rng(4)
    for _ in range(100):
        z1 = random_algebra_element(rng, kind)
        z2 = random_algebra_element(rng, kind)
        m1, m2 = to_matrix(z1), to_matrix(z2)
        assert np.max(np.abs(to_matrix(bracket(z1, z2)) - (m1 @ m2 - m2 @ m1))) <= 1e-12


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_jacobi_identity_exact_on_integer_draws(kind):
    rng = np.random.default_rng(5)
    for _ in range(200):
        z1, z2, z3 = (random_algebra_element(rng, kind, integer=True) for _ in range(3))
        total = (
            bracket(z1, bracket(z2, z3))
            .add(bracket(z2, bracket(z3, z1)))
            .add(bracket(z3, bracket(z1, z2)))
        )
        assert np.all(total.to_flat() == 0.0)


def test_bracket_kind_mismatch():
    with pytest.raises(KindMismatchError):
        bracket(
            AlgebraElement(Kind.CARROLL_2D, omega=1.0),
            AlgebraElement(EXT, omega=1.0),
        )


# ---------------------------------------------------------------------------
# matrix representations
# ---------------------------------------------------------------------------

def test_zero_and_identity_matrices():
    for kind in ALL_KINDS:
        assert np.all(to_matrix(AlgebraElement(kind)) == 0.0)
        assert np.array_equal(
            to_matrix_group(GroupElement.identity(kind)), np.eye(kind.matrix_size)
        )


def test_extended_group_matrix_blocks():
    a = GroupElement(EXT, A=np.eye(2), b=(0.3, -0.2), c=(1.0, 2.0), f=0.7, a1=0.4, a2=-0.9)
    M = to_matrix_group(a)
    assert np.allclose(M[0:2, 5], EPS2 @ np.array([0.3, -0.2]))
    assert M[4, 3] == 0.4 and M[2, 5] == -0.9
    assert M[4, 5] == -(0.7 + np.dot([0.3, -0.2], [1.0, 2.0]))
    # fixed zeros and ones of the pattern
    assert M[2, 2] == M[3, 3] == M[5, 5] == 1.0
    assert np.all(M[3, [0, 1, 2, 4, 5]] == 0.0) and np.all(M[5, :5] == 0.0)


def test_matrix_round_trips_and_pattern_guard():
    rng = np.random.default_rng(6)
    for kind in ALL_KINDS:
        z = random_algebra_element(rng, kind)
        assert np.allclose(algebra_from_matrix(kind, to_matrix(z)).to_flat(), z.to_flat())
        a = random_group_element(rng, kind)
        assert np.allclose(group_from_matrix(kind, to_matrix_group(a)).to_flat(), a.to_flat())
    bad = to_matrix(AlgebraElement(EXT, omega=1.0)) + 1e-6
    with pytest.raises(MatrixPatternError):
        algebra_from_matrix(EXT, bad)


# ---------------------------------------------------------------------------
# exponential
# ---------------------------------------------------------------------------

def test_exp_zero_is_identity():
    for kind in ALL_KINDS:
        e = group_exp(AlgebraElement(kind))
        assert np.allclose(e.to_flat(), GroupElement.identity(kind).to_flat())


def test_exp_pure_rotation_is_planar_rotation():
    w = 0.9
    g = group_exp(AlgebraElement(Kind.CARROLL_2D, omega=w))
    want = np.array([[np.cos(w), np.sin(w)], [-np.sin(w), np.cos(w)]])
    assert np.allclose(g.A, want, atol=1e-15)
    assert not np.any(g.b) and not np.any(g.c) and g.f == 0.0


def test_exp_matches_truncated_series_12_terms():
    # coordinates capped so that 12 series terms reach 1e-12
    rng = np.random.default_rng(7)
    for _ in range(50):
        z = random_algebra_element(rng, EXT, scale=0.6)
        ref = truncated_matrix_exp(to_matrix(z), terms=12)
        assert np.max(np.abs(to_matrix_group(group_exp(z)) - ref)) <= 1e-12


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_exp_matches_series_generic(kind):
    rng = np.random.default_rng(8)
    for _ in range(60):
        z = random_algebra_element(rng, kind, scale=1.2)
        ref = truncated_matrix_exp(to_matrix(z), terms=26)
        assert np.max(np.abs(to_matrix_group(group_exp(z)) - ref)) <= 1e-10


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_exp_one_parameter_subgroup(kind):
    rng = np.random.default_rng(9)
    for _ in range(40):
        z = random_algebra_element(rng, kind)
        t, u = rng.uniform(-1.5, 1.5, size=2)
        lhs = group_exp(z.scaled(t + u)).to_flat()
        rhs = compose(group_exp(z.scaled(t)), group_exp(z.scaled(u))).to_flat()
        assert np.max(np.abs(lhs - rhs)) <= 1e-10


# ---------------------------------------------------------------------------
# composition, inverse, action
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("kind", ALL_KINDS)
def test_identity_laws(kind):
    rng = np.random.default_rng(10)
    e = GroupElement.identity(kind)
    a = random_group_element(rng, kind)
    assert np.allclose(compose(e, a).to_flat(), a.to_flat())
    assert np.allclose(compose(a, e).to_flat(), a.to_flat())
    assert np.max(np.abs(compose(a, inverse(a)).to_flat() - e.to_flat())) <= 1e-12
    assert np.max(np.abs(compose(inverse(a), a).to_flat() - e.to_flat())) <= 1e-12


def test_inverse_of_pure_translation():
    a = GroupElement(EXT, c=(0.4, -0.7))
    inv = inverse(a)
    assert np.allclose(inv.c, [-0.4, 0.7])
    assert not np.any(inv.b) and inv.f == 0.0 and inv.a1 == 0.0 and inv.a2 == 0.0


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_inverse_matches_matrix_inverse(kind):
    rng = np.random.default_rng(11)
    for _ in range(40):
        a = random_group_element(rng, kind)
        assert (
            np.max(
                np.abs(to_matrix_group(inverse(a)) - np.linalg.inv(to_matrix_group(a)))
            )
            <= 1e-12
        )


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_compose_matches_matrix_product(kind):
    rng = np.random.default_rng(12)
    for _ in range(60):
        a = random_group_element(rng, kind)
        b = random_group_element(rng, kind)
        assert (
            np.max(
                np.abs(
                    to_matrix_group(compose(a, b))
                    - to_matrix_group(a) @ to_matrix_group(b)
                )
            )
            <= 1e-12
        )


small = st.floats(-1.5, 1.5, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(vals=st.lists(small, min_size=24, max_size=24))
def test_associativity_property(vals):
    vals = np.asarray(vals)
    els = [
        group_exp(AlgebraElement.from_flat(EXT, vals[8 * i : 8 * (i + 1)]))
        for i in range(3)
    ]
    lhs = compose(compose(els[0], els[1]), els[2]).to_flat()
    rhs = compose(els[0], compose(els[1], els[2])).to_flat()
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_orthogonality_of_produced_rotations():
    rng = np.random.default_rng(13)
    for kind in ALL_KINDS:
        a = GroupElement.identity(kind)
        for _ in range(200):
            a = compose(a, random_group_element(rng, kind, scale=0.5))
        assert orthogonality_defect(a) <= 1e-12


def test_act_event_examples():
    kind = Kind.CARROLL_3D
    e = GroupElement.identity(kind)
    x, s = np.array([0.3, -0.2, 1.0]), 0.7
    x1, s1 = act_event(e, x, s)
    assert np.array_equal(x1, x) and s1 == s
    boost = GroupElement(kind, b=(0.5, 0.1, -0.3))
    x2, s2 = act_event(boost, x, s)
    assert np.array_equal(x2, x)
    assert s2 == pytest.approx(s - np.dot([0.5, 0.1, -0.3], x), abs=1e-15)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_act_event_homomorphism(kind):
    rng = np.random.default_rng(14)
    for _ in range(40):
        a = random_group_element(rng, kind)
        b = random_group_element(rng, kind)
        x = rng.uniform(-2, 2, size=kind.dim)
        s = float(rng.uniform(-2, 2))
        x1, s1 = act_event(compose(a, b), x, s)
        xb, sb = act_event(b, x, s)
        x2, s2 = act_event(a, xb, sb)
        assert np.max(np.abs(x1 - x2)) <= 1e-12 and abs(s1 - s2) <= 1e-12


# ---------------------------------------------------------------------------
# records and validation
# ---------------------------------------------------------------------------

def test_flat_record_round_trip():
    rng = np.random.default_rng(15)
    for kind in ALL_KINDS:
        z = random_algebra_element(rng, kind)
        assert np.array_equal(AlgebraElement.from_flat(kind, z.to_flat()).to_flat(), z.to_flat())
        a = random_group_element(rng, kind)
        assert np.array_equal(GroupElement.from_flat(kind, a.to_flat()).to_flat(), a.to_flat())


def test_central_coordinates_rejected_for_plain_kinds():
    with pytest.raises(ValueError):
        AlgebraElement(Kind.CARROLL_2D, alpha1=1.0)
    with pytest.raises(ValueError):
        GroupElement(Kind.CARROLL_3D, a2=0.5)


def test_values_are_immutable():
    z = AlgebraElement(EXT, beta=(1.0, 2.0))
    with pytest.raises(ValueError):
        z.beta[0] = 5.0
