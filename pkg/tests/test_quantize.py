import warnings

import numpy as np
import pytest

from carrollkit import quantize as qz
from carrollkit.lie_core import AlgebraElement, GroupElement, Kind, compose, group_exp


@pytest.fixture(scope="module")
def grid():
    return qz.GridSpec([-8.0, -8.0], [8.0, 8.0], [256, 256])


@pytest.fixture(scope="module")
def psi(grid):
    return qz.WaveFunction("position", 1.0, qz.gaussian_profile(grid, width=1.2), grid)


def grid_rotation(grid, quarter_turns, b=(0.0, 0.0), c_steps=(0, 0), f=0.0):
    """Group element whose pullback maps the square grid onto itself."""
    h = grid.spacing
    rot = group_exp(AlgebraElement(Kind.CARROLL_2D, omega=quarter_turns * np.pi / 2))
    A = np.round(rot.A)
    c = (c_steps[0] * h[0], c_steps[1] * h[1])
    return GroupElement(Kind.CARROLL_2D, A, b, c, f)


# ---------------------------------------------------------------------------
# grids and wave functions
# ---------------------------------------------------------------------------

def test_grid_validation():
    with pytest.raises(ValueError):
        qz.GridSpec([0.0], [1.0], [1])
    with pytest.raises(ValueError):
        qz.GridSpec([0.0], [-1.0], [8])
    g = qz.GridSpec([-1.0], [1.0], [5])
    assert g.spacing[0] == 0.5 and g.dim == 1


def test_wave_function_shape_checked(grid):
    with pytest.raises(ValueError):
        qz.WaveFunction("position", 1.0, np.zeros((4, 4)), grid)
    with pytest.raises(ValueError):
        qz.WaveFunction("sideways", 1.0, np.zeros((256, 256)), grid)


def test_probability_density_time_independent(psi):
    v0 = np.abs(psi.values(0.0)) ** 2
    v1 = np.abs(psi.values(7.3)) ** 2
    assert np.max(np.abs(v0 - v1)) <= 1e-14


# ---------------------------------------------------------------------------
# the Carroll wave equation
# ---------------------------------------------------------------------------

def test_carroll_residual_analytic_zero(psi):
    res = qz.carroll_residual(psi)
    assert res.analytic == 0.0


def test_carroll_residual_fd_second_order(psi):
    res = qz.carroll_residual(psi, fd_step=1e-4)
    assert res.finite_difference <= 1e-7
    # second-order error model: m^3 ds^2 / 6
    assert res.finite_difference == pytest.approx(1e-8 / 6.0, rel=1e-3)


def test_wrong_phase_detected(grid):
    # a doubled-mass phase must leave residual |m| max|phi|
    prof = qz.gaussian_profile(grid, width=1.2)
    m = 1.0
    s = 0.41
    vals = np.exp(2j * m * s) * prof
    dpsi = 2j * m * vals
    resid = np.max(np.abs(-1j * dpsi - m * vals))
    assert resid == pytest.approx(abs(m) * np.max(np.abs(prof)), rel=1e-12)


def test_eigen_relation_exact(psi):
    # (hbar/i) L_xi Psi = m Psi along the analytic phase
    s = 0.9
    vals = psi.values(s)
    lie = (1j * psi.m / psi.hbar) * vals
    assert np.max(np.abs((psi.hbar / 1j) * lie - psi.m * vals)) == 0.0


def test_kg_limit_constant_profile(grid):
    prof = np.ones(tuple(grid.num), dtype=complex)
    psi_c = qz.WaveFunction("position", 1.0, prof, grid)
    res = qz.kg_limit_residuals(psi_c, [10.0, 100.0])
    assert max(res) <= 1e-12


def test_kg_limit_scaling(psi):
    res = qz.kg_limit_residuals(psi, [10.0, 100.0, 1000.0])
    assert res[0] / res[1] == pytest.approx(100.0, rel=0.05)
    assert res[1] / res[2] == pytest.approx(100.0, rel=0.05)


def test_kg_limit_infinite_c(psi):
    res = qz.kg_limit_residuals(psi, [1e9])
    assert res[0] <= 1e-15


def test_kg_requires_increasing_sequence(psi):
    with pytest.raises(ValueError):
        qz.kg_limit_residuals(psi, [100.0, 10.0])


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def test_l2_norm_of_unit_bump():
    grid = qz.GridSpec([-1.0], [2.0], [3001])
    prof = np.where(np.abs(grid.axes()[0] - 0.5) <= 0.5, 1.0, 0.0).astype(complex)
    psi = qz.WaveFunction("position", 1.0, prof, grid)
    assert qz.l2_norm(psi) == pytest.approx(1.0, abs=1e-3)


def test_l2_norm_homogeneous(psi):
    doubled = qz.WaveFunction("position", psi.m, 2.0 * psi.profile, psi.grid)
    assert qz.l2_norm(doubled) == pytest.approx(2.0 * qz.l2_norm(psi), rel=1e-14)


# ---------------------------------------------------------------------------
# group representations
# ---------------------------------------------------------------------------

def test_rep_identity(psi):
    out = qz.rep_position(GroupElement.identity(Kind.CARROLL_2D), psi)
    assert np.max(np.abs(out.profile - psi.profile)) <= 1e-14


def test_rep_translation_shifts_profile(grid, psi):
    a = grid_rotation(grid, 0, c_steps=(16, -8))
    out = qz.rep_position(a, psi)
    # with b = 0 there is no x-dependent phase, only the shift
    shifted = np.roll(psi.profile, (16, -8), axis=(0, 1))
    interior = (slice(32, -32),) * 2
    assert np.max(np.abs(out.profile[interior] - shifted[interior])) <= 1e-13


def test_rep_boost_is_phase_only(psi):
    a = GroupElement(Kind.CARROLL_2D, b=(0.4, -0.9))
    out = qz.rep_position(a, psi)
    assert np.max(np.abs(np.abs(out.profile) - np.abs(psi.profile))) <= 1e-14
    assert abs(qz.l2_norm(out) - qz.l2_norm(psi)) <= 1e-12


def test_rep_momentum_boost_shifts_by_mb(grid):
    m = 2.0
    prof = qz.gaussian_profile(grid, width=1.2)
    psi_p = qz.WaveFunction("momentum", m, prof, grid)
    h = grid.spacing
    b = (8 * h[0] / m, -4 * h[1] / m)  # m b lands on grid nodes
    out = qz.rep_momentum(GroupElement(Kind.CARROLL_2D, b=b), psi_p)
    shifted = np.roll(prof, (8, -4), axis=(0, 1))
    interior = (slice(16, -16),) * 2
    assert np.max(np.abs(out.profile[interior] - shifted[interior])) <= 1e-13


def test_rep_property_grid_aligned(grid, psi):
    a = grid_rotation(grid, 1, b=(0.7, -0.4), c_steps=(16, -8), f=0.3)
    b = grid_rotation(grid, 2, b=(-0.2, 0.9), c_steps=(8, 24), f=-1.1)
    lhs = qz.rep(compose(a, b), psi)
    rhs = qz.rep(a, qz.rep(b, psi))
    assert np.max(np.abs(lhs.profile - rhs.profile)) <= 1e-6


def test_rep_property_momentum(grid):
    psi_p = qz.WaveFunction("momentum", 1.0, qz.gaussian_profile(grid, width=1.2), grid)
    h = grid.spacing
    a = GroupElement(Kind.CARROLL_2D, b=(8 * h[0], 0.0), c=(0.3, -0.6), f=0.2)
    b = GroupElement(Kind.CARROLL_2D, b=(0.0, -8 * h[1]), c=(1.1, 0.4), f=-0.7)
    lhs = qz.rep(compose(a, b), psi_p)
    rhs = qz.rep(a, qz.rep(b, psi_p))
    assert np.max(np.abs(lhs.profile - rhs.profile)) <= 1e-6


def test_unitarity_rigid_motion(grid, psi):
    a = grid_rotation(grid, 3, c_steps=(-12, 4), f=0.8)
    out = qz.rep_position(a, psi)
    assert abs(qz.l2_norm(out) - qz.l2_norm(psi)) <= 1e-6


def test_generic_rotation_approximately_unitary(grid, psi):
    # off-lattice rotations interpolate; the norm error is the guard
    rot = group_exp(AlgebraElement(Kind.CARROLL_2D, omega=0.37))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", qz.ClippedMassWarning)
        out = qz.rep_position(GroupElement(Kind.CARROLL_2D, rot.A), psi)
    assert abs(qz.l2_norm(out) - qz.l2_norm(psi)) <= 1e-3


def test_clipped_mass_warning(grid):
    prof = qz.gaussian_profile(grid, center=(6.0, 6.0), width=1.2)
    psi_edge = qz.WaveFunction("position", 1.0, prof, grid)
    with pytest.warns(qz.ClippedMassWarning):
        qz.rep_position(GroupElement(Kind.CARROLL_2D, c=(4.0, 4.0)), psi_edge)


def test_rep_rejects_extended_elements(psi):
    with pytest.raises(ValueError):
        qz.rep_position(GroupElement.identity(Kind.EXT_CARROLL_2D), psi)


def test_polarization_constancy():
    grid = qz.GridSpec([-6.0, -6.0], [6.0, 6.0], [64, 64])
    m, hbar = 1.3, 1.0
    prof = qz.gaussian_profile(grid, width=1.5)
    psi_p = qz.WaveFunction("momentum", m, prof, grid, hbar)
    # momentum-polarized functions are constant along d_i - (p_i/m) d_s
    p = np.array([0.75, -0.5])
    idx = tuple(int(np.argmin(np.abs(ax - pi))) for ax, pi in zip(grid.axes(), p))
    p = np.array([grid.axes()[0][idx[0]], grid.axes()[1][idx[1]]])
    phi0 = prof[idx]
    delta = 1e-4

    def full_value(x, s):
        return (
            np.exp(1j * m * s / hbar) * np.exp(1j * (p @ x) / hbar) * phi0
        )

    x0, s0 = np.array([0.3, -0.4]), 0.2
    for i in range(2):
        e = np.eye(2)[i]
        fp = full_value(x0 + delta * e, s0 - delta * p[i] / m)
        fm = full_value(x0 - delta * e, s0 + delta * p[i] / m)
        assert abs(fp - fm) / (2 * delta) <= 1e-7


# ---------------------------------------------------------------------------
# prequantum 1-form
# ---------------------------------------------------------------------------

def test_prequantum_alpha_at_zero_momentum():
    form = qz.prequantum_one_form([0.3, 0.1, -0.2], [0.0, 0.0, 0.0], 1.0 + 0.0j)
    assert np.all(form.x_part == 0.0) and np.all(form.p_part == 0.0)
    assert form.phase_part == 1.0


def test_prequantum_requires_unit_circle():
    with pytest.raises(ValueError):
        qz.prequantum_one_form([0.0], [0.0], 0.5 + 0.0j)


def test_curvature_residual_stencil():
    for hbar in (1.0, 0.7):
        r = qz.curvature_residual([0.2, 0.3, -0.1], [0.5, -0.2, 0.8], hbar)
        assert r <= 1e-8


def test_fiber_pullback_line_integral():
    m, hbar, ds = 1.3, 0.9, 0.7
    got = qz.fiber_pullback_integral(m, hbar, [0.1, 0.2], [0.4, -0.5], ds)
    assert got == pytest.approx((m / hbar) * ds, rel=1e-12)


def test_potential_pullback_matches_flat_potential():
    assert qz.potential_pullback_residual(1.7, 1.0, [0.0, 0.0], [0.3, -0.8]) <= 1e-12
