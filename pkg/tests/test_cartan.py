import numpy as np
import pytest

from carrollkit import cartan
from carrollkit.cartan import (
    CarrollGeometry,
    eom_gravity,
    exotic_t,
    flat_geometry,
    integrate_gravity,
    kerr_newman_horizon,
    momentum_covector,
    q1_effective,
    structure_residuals,
)
from carrollkit.dynamics import eom
from carrollkit.lie_core import EPS2, cross2
from carrollkit.scenarios import EvolutionPoint, Scenario, Tag

X0 = np.array([0.2, 0.3, -0.4])


# ---------------------------------------------------------------------------
# structure residuals
# ---------------------------------------------------------------------------

def test_flat_geometry_all_residuals_vanish():
    r = structure_residuals(flat_geometry(), X0)
    assert r.duality == 0.0
    assert r.connection_constraints == 0.0
    assert r.torsion == 0.0
    assert r.central_1 <= 1e-8 and r.central_2 <= 1e-8


def test_sourced_flat_geometry_consistent():
    g = flat_geometry(o1=0.3, o2=-0.2, t1=(0.1, 0.2), t2=(0.5, -0.3))
    r = structure_residuals(g, X0)
    assert r.torsion == 0.0
    assert r.central_1 <= 1e-8 and r.central_2 <= 1e-8


def test_perturbed_connection_detected():
    # antisymmetric part of Gamma is torsion; perturb one slot
    def gamma(x):
        G = np.zeros((3, 3, 3))
        G[1, 1, 2] = 0.1
        return G

    g = CarrollGeometry(name="perturbed", tetrad=lambda x: np.eye(3), gamma=gamma)
    r = structure_residuals(g, X0)
    assert r.torsion > 1e-3


def test_singular_tetrad_rejected():
    g = CarrollGeometry(
        name="bad", tetrad=lambda x: np.zeros((3, 3)), gamma=lambda x: np.zeros((3, 3, 3))
    )
    with pytest.raises(ValueError):
        structure_residuals(g, X0)


def test_declared_source_mismatch_detected():
    # declare a nonzero electric source but keep the flat potentials
    base = flat_geometry()
    g = CarrollGeometry(
        name="lying",
        tetrad=base.tetrad,
        gamma=base.gamma,
        t1=lambda x: np.array([0.4, 0.0]),
        w1=base.w1,
        w2=base.w2,
    )
    r = structure_residuals(g, X0)
    assert r.central_1 > 0.1


# ---------------------------------------------------------------------------
# Kerr-Newman horizon
# ---------------------------------------------------------------------------

def test_kerr_newman_structure_report():
    geom, rep = kerr_newman_horizon(1.0, 0.4, 0.3)
    assert rep.ok
    assert rep.xi_in_kernel <= 1e-12
    assert set(rep.kernel_dims) == {1}
    assert rep.lie_derivative <= 1e-10
    assert rep.r_plus == pytest.approx(1.0 + np.sqrt(1.0 - 0.16 - 0.09), abs=1e-15)


def test_kerr_newman_torsion_small():
    geom, _ = kerr_newman_horizon(1.0, 0.4, 0.3)
    for th in (0.5, 1.1, 2.3):
        r = structure_residuals(geom, np.array([0.0, th, 0.7]))
        assert r.duality <= 1e-12
        assert r.connection_constraints <= 1e-10
        assert r.torsion <= 1e-8


def test_schwarzschild_round_sphere():
    geom, rep = kerr_newman_horizon(1.0, 0.0, 0.0)
    assert rep.r_plus == pytest.approx(2.0, abs=1e-15)
    for th in (0.3, 0.9, 2.0):
        g = geom.metric(np.array([0.0, th, 1.0]))
        want = np.diag([0.0, 4.0, 4.0 * np.sin(th) ** 2])
        assert np.max(np.abs(g - want)) <= 1e-12


def test_metric_annihilates_xi_identically():
    geom, _ = kerr_newman_horizon(1.2, 0.5, 0.2)
    for th in np.linspace(0.1, np.pi - 0.1, 5):
        x = np.array([0.4, th, 2.0])
        assert np.max(np.abs(geom.metric(x) @ geom.xi(x))) == 0.0


def test_naked_singularity_rejected():
    with pytest.raises(ValueError):
        kerr_newman_horizon(1.0, 0.9, 0.9)


# ---------------------------------------------------------------------------
# equations of motion
# ---------------------------------------------------------------------------

def test_flat_no_sources_moves_along_xi():
    g = flat_geometry()
    v0 = momentum_covector(g, X0, (0.4, -0.1))
    res = eom_gravity(X0, v0, g, (1.0, 0.3, 0.2))
    assert res.regime == "xi"
    assert np.allclose(res.dx, [1.0, 0.0, 0.0])
    assert np.all(res.dv == 0.0)


def test_flat_limit_reproduces_flat_model():
    g = flat_geometry()
    v0 = momentum_covector(g, X0, (0.0, 0.0))
    res = eom_gravity(X0, v0, g, (1.0, 0.3, 0.2))
    flat = eom(
        EvolutionPoint([0.1, 0.2], [0.0, 0.0], 0.0, w=0.0, z=0.0),
        Scenario(Tag.FREE2D_EXT, m=1.0, q1=0.3, q2=0.2),
    )
    # spatial velocity and momentum rate both vanish, ds/dtau = 1
    assert np.all(res.dx[1:] == 0.0) and np.all(flat.dx == 0.0)
    assert np.all(res.dv == 0.0) and np.all(flat.dv == 0.0)


def test_momentum_covector_is_flat_theta0():
    g = flat_geometry()
    v = momentum_covector(g, X0, (0.7, -0.2))
    assert np.allclose(v, [1.0, 0.7, -0.2])


def test_electric_sources_worked_example():
    t0 = 0.8
    q2 = 0.5
    g = flat_geometry(t2=(t0 / q2, 0.0))
    params = (1.0, 0.0, q2)
    assert np.allclose(exotic_t(g, X0, *params[1:]), [t0, 0.0])
    v0 = momentum_covector(g, X0, (0.0, 0.0))
    res = eom_gravity(X0, v0, g, params)
    assert res.regime == "electric"
    # mt2 = m^2 = 1, spatial velocity eps T, momentum rate (m / 2 q2) T
    assert np.allclose(res.dx, [1.0 / (2 * q2), 0.0, -t0])
    assert np.allclose(res.dv, [0.0, t0, 0.0])


def test_electric_regime_invariants_along_trajectory():
    g = flat_geometry(t1=(0.2, -0.1), t2=(0.6, 0.3))
    params = (1.0, 0.4, 0.7)
    x0 = np.array([0.0, 0.1, -0.3])
    v0 = momentum_covector(g, x0, (0.2, 0.1))
    traj = integrate_gravity(x0, v0, g, params, (0.0, 1.5), 1e-3)
    assert traj.regime == "electric" and not traj.truncated
    th = g.cotetrad(x0)
    for k in range(0, len(traj.tau), 150):
        res = eom_gravity(traj.x[k], traj.v[k], g, params)
        T = exotic_t(g, traj.x[k], params[1], params[2])
        vsp = np.array([th[1] @ res.dx, th[2] @ res.dx])
        assert abs(float(vsp @ T)) <= 1e-10
        # covariant momentum rate in frame components is parallel to T
        w = np.array([res.dv[1], res.dv[2]])  # flat chart: transport term 0
        assert abs(cross2(w, T)) <= 1e-10


def test_constant_t_closed_form_trajectory():
    g = flat_geometry(t2=(1.2, -0.4))
    params = (1.0, 0.0, 0.5)
    x0 = np.array([0.0, 0.1, -0.3])
    v0 = momentum_covector(g, x0, (0.2, 0.1))
    res = eom_gravity(x0, v0, g, params)
    traj = integrate_gravity(x0, v0, g, params, (0.0, 2.0), 1e-3)
    assert np.max(np.abs(traj.x[-1] - (x0 + 2.0 * res.dx))) <= 1e-12
    assert np.max(np.abs(traj.v[-1] - (v0 + 2.0 * res.dv))) <= 1e-12


def test_kerr_newman_no_sources_stays_on_fiber():
    geom, _ = kerr_newman_horizon(1.0, 0.4, 0.3)
    x0 = np.array([0.0, 1.2, 0.7])
    v0 = momentum_covector(geom, x0, (0.3, -0.2))
    traj = integrate_gravity(x0, v0, geom, (1.0, 0.2, 0.3), (0.0, 1.0), 1e-3)
    assert traj.regime == "xi"
    assert np.max(np.abs(traj.x[:, 1:] - traj.x[0, 1:])) <= 1e-8
    assert np.max(np.abs(traj.v - traj.v[0])) <= 1e-8
    assert traj.x[-1, 0] == pytest.approx(1.0, abs=1e-12)


def test_magnetic_sources_equal_q1_shift():
    o1, o2 = 0.25, -0.4
    t2 = (0.9, 0.2)
    q1, q2, m = 0.6, 0.8, 1.0
    ga = flat_geometry(o1=o1, o2=o2, t2=t2)
    gb = flat_geometry(t2=t2)
    q1_shift = q1 - (q1 * o1 + q2 * o2)
    assert q1_effective(ga, X0, q1, q2) == q1_shift
    x0 = np.array([0.0, 0.1, 0.2])
    v0 = momentum_covector(ga, x0, (0.1, -0.3))
    ta = integrate_gravity(x0, v0, ga, (m, q1, q2), (0.0, 1.0), 1e-3)
    tb = integrate_gravity(x0, v0, gb, (m, q1_shift, q2), (0.0, 1.0), 1e-3)
    assert np.max(np.abs(ta.x - tb.x)) <= 1e-9
    assert np.max(np.abs(ta.v - tb.v)) <= 1e-9


def test_degenerate_cases_flagged():
    g = flat_geometry()
    v0 = momentum_covector(g, X0, (0.0, 0.0))
    # vanishing effective mass with no sources
    res = eom_gravity(X0, v0, g, (2.0, 1.0, -1.0))
    assert res.degenerate
    # electric sources with q2 = 0
    g2 = flat_geometry(t1=(0.5, 0.0))
    res2 = eom_gravity(X0, v0, g2, (1.0, 0.3, 0.0))
    assert res2.degenerate


def test_initial_momentum_constraint_enforced():
    g = flat_geometry()
    with pytest.raises(ValueError):
        integrate_gravity(X0, np.array([0.5, 0.0, 0.0]), g, (1.0, 0.0, 0.1), (0, 1), 1e-3)


def test_gravity_csv():
    g = flat_geometry()
    v0 = momentum_covector(g, X0, (0.0, 0.0))
    traj = integrate_gravity(X0, v0, g, (1.0, 0.1, 0.1), (0.0, 0.01), 1e-3)
    text = traj.csv_text()
    lines = text.strip().split("\n")
    assert lines[0] == "tau,x0,x1,x2,v0,v1,v2"
    assert len(lines) == len(traj.tau) + 1
