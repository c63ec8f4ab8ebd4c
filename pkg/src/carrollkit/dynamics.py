"""Flat-space presymplectic dynamics.

Every scenario's 2-form is assembled as a skew matrix at an evolution
point, its kernel is extracted numerically by SVD, and the equations of
motion come in two independent routes: closed form, and the kernel
direction normalized to ds = 1.  The fixed coordinate bases are

    3d spinless:   (x1, x2, x3, v1, v2, v3, s)
    3d spin:       (x1, x2, x3, v1, v2, v3, s, a1, a2)
    planar ext.:   (x1, x2, v1, v2, s, w, z)

where (a1, a2) are components in an orthonormal tangent chart of the unit
sphere at u (recomputed at every evaluation; there is no global chart) and
(w, z) are the central fiber coordinates, which never enter the 2-form.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .lie_core import EPS2, skew3
from .scenarios import EvolutionPoint, Scenario, Tag

_TAG_CODES = {
    Tag.FREE3D: 0,
    Tag.FREE_SPIN3D: 1,
    Tag.EM3D_SPINLESS: 2,
    Tag.EM3D_SPIN: 3,
    Tag.FREE2D_EXT: 4,
    Tag.EM2D_EXT: 5,
    Tag.PHOTON2D: 6,
}

KERNEL_TOL = 1e-10
DEGENERACY_NOTE = (
    "vanishing effective mass: the kernel constraints reduce to "
    "m dx = -2 q2 eps dv together with (q E + mu theta grad B) ds = 0; "
    "the motion is underdetermined and is not integrated"
)


def effective_mass_sq(m: float, q1: float, q2: float, qB: float = 0.0) -> float:
    """m^2 + 4 (q1 - qB/2) q2; with qB = 0 this is the free effective mass."""
    return m * m + 4.0 * (q1 - 0.5 * qB) * q2


def spin_chart(u: np.ndarray):
    """Orthonormal basis (e1, e2) of the tangent plane at u with e1 x e2 = u."""
    u = np.asarray(u, dtype=float)
    h = np.array([0.0, 0.0, 1.0]) if abs(u[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = h - float(h @ u) * u
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(u, e1)


def coordinate_labels(scenario: Scenario) -> list[str]:
    if scenario.dim == 3:
        labels = ["x1", "x2", "x3", "v1", "v2", "v3", "s"]
        if scenario.tag.has_spin:
            labels += ["a1", "a2"]
        return labels
    return ["x1", "x2", "v1", "v2", "s", "w", "z"]


def presymplectic_matrix(y: EvolutionPoint, scenario: Scenario) -> np.ndarray:
    """The 2-form at y as an exactly antisymmetric matrix.

    Convention: sigma(delta, delta') = delta^T Sigma delta' in the fixed
    basis of :func:`coordinate_labels`.
    """
    scenario.check_point(y)
    tag = scenario.tag
    m = scenario.m
    if scenario.dim == 3:
        n = 9 if tag.has_spin else 7
        sig = np.zeros((n, n))
        for i in range(3):
            sig[3 + i, i] = m
            sig[i, 3 + i] = -m
        if tag.has_field:
            fld = scenario.field
            e = scenario.q * fld.electric(y.x, y.s)
            if tag is Tag.EM3D_SPIN:
                b = fld.magnetic(y.x, y.s)
                sig[:3, :3] += -scenario.q * skew3(b)
                e = e + scenario.mu * fld.spin_gradient(y.x, y.s, y.u)
            sig[:3, 6] = e
            sig[6, :3] = -e
        if tag.has_spin:
            sig[7, 8] = -scenario.s_spin
            sig[8, 7] = scenario.s_spin
            if tag is Tag.EM3D_SPIN:
                e1, e2 = spin_chart(y.u)
                b = scenario.field.magnetic(y.x, y.s)
                mb = scenario.mu * np.array([float(b @ e1), float(b @ e2)])
                sig[7:9, 6] = mb
                sig[6, 7:9] = -mb
        return sig

    # planar extended family; the photon is the m = q = 0 member
    sig = np.zeros((7, 7))
    b = 0.0
    grad = np.zeros(2)
    e = np.zeros(2)
    if tag.has_field:
        fld = scenario.field
        b = float(fld.magnetic(y.x, y.s))
        grad = np.asarray(fld.magnetic_gradient(y.x, y.s), dtype=float)
        e = scenario.q * np.asarray(fld.electric(y.x, y.s), dtype=float)
    for i in range(2):
        sig[2 + i, i] = m
        sig[i, 2 + i] = -m
    q1_eff = scenario.q1 - 0.5 * scenario.q * b
    sig[0, 1] = -2.0 * q1_eff
    sig[1, 0] = 2.0 * q1_eff
    sig[2, 3] = 2.0 * scenario.q2
    sig[3, 2] = -2.0 * scenario.q2
    col = e + scenario.mu * scenario.theta * grad
    sig[:2, 4] = col
    sig[4, :2] = -col
    return sig


def kernel_basis(sigma: np.ndarray, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal basis of ker(sigma), as columns.

    Singular values below tol * max(s_max, 1e-300) count as zero.
    """
    sigma = np.asarray(sigma, dtype=float)
    asym = float(np.max(np.abs(sigma + sigma.T))) if sigma.size else 0.0
    if asym > 1e-12:
        raise ValueError(f"matrix is not antisymmetric (defect {asym:.3e})")
    _, s, vh = np.linalg.svd(sigma)
    thr = tol * max(float(s[0]) if s.size else 0.0, 1e-300)
    k = int(np.sum(s < thr))
    if k == 0:
        return np.zeros((sigma.shape[0], 0))
    return vh[-k:].T.copy()


@dataclass(frozen=True)
class EomResult:
    """Tangent (dx/ds, dv/ds[, du/ds]) or a degeneracy flag."""

    dx: np.ndarray | None
    dv: np.ndarray | None
    du: np.ndarray | None = None
    degenerate: bool = False
    reason: str | None = None

    @staticmethod
    def flagged(reason: str) -> "EomResult":
        return EomResult(None, None, None, True, reason)


def eom(y: EvolutionPoint, scenario: Scenario) -> EomResult:
    """Closed-form equations of motion.

    Free models: dx/ds = dv/ds = 0 (and du/ds = 0).  Electromagnetic
    3d models: dx/ds = 0, d(mv)/ds = q E (+ mu grad<u,B> with spin), and
    du/ds = (mu/s_spin) u x B.  Planar extended model with fields on:

        dx/ds = -(2 q2 / m_eff^2) eps (q E + mu theta grad B)
        d(mv)/ds = (m^2 / m_eff^2) (q E + mu theta grad B)

    and the massless chargeless member dx/ds = -(mu theta / 2 q1) eps grad B,
    d(mv)/ds = 0.
    """
    scenario.check_point(y)
    return _eom_raw(y, scenario)


def _eom_raw(y: EvolutionPoint, scenario: Scenario) -> EomResult:
    # layout/unit-sphere validation skipped: RK4 stage points carry a spin
    # direction slightly off the sphere, and the vector field extends
    # smoothly off it
    tag = scenario.tag
    m = scenario.m
    if scenario.dim == 3:
        if m == 0.0:
            return EomResult.flagged("3d models need m != 0")
        zero = np.zeros(3)
        if tag is Tag.FREE3D:
            return EomResult(zero, zero.copy())
        if tag is Tag.FREE_SPIN3D:
            return EomResult(zero, zero.copy(), np.zeros(3))
        fld = scenario.field
        dv = (scenario.q / m) * np.asarray(fld.electric(y.x, y.s), dtype=float)
        if tag is Tag.EM3D_SPINLESS:
            return EomResult(zero, dv)
        dv = dv + (scenario.mu / m) * fld.spin_gradient(y.x, y.s, y.u)
        b = np.asarray(fld.magnetic(y.x, y.s), dtype=float)
        du = (scenario.mu / scenario.s_spin) * np.cross(y.u, b)
        return EomResult(zero, dv, du)

    if tag is Tag.PHOTON2D:
        if scenario.q1 == 0.0:
            return EomResult.flagged("the massless planar model needs q1 != 0")
        grad = np.asarray(scenario.field.magnetic_gradient(y.x, y.s), dtype=float)
        dx = -(scenario.mu * scenario.theta / (2.0 * scenario.q1)) * (EPS2 @ grad)
        return EomResult(dx, np.zeros(2))

    b = 0.0
    force = np.zeros(2)
    if tag is Tag.EM2D_EXT:
        fld = scenario.field
        b = float(fld.magnetic(y.x, y.s))
        force = scenario.q * np.asarray(fld.electric(y.x, y.s), dtype=float)
        force = force + scenario.mu * scenario.theta * np.asarray(
            fld.magnetic_gradient(y.x, y.s), dtype=float
        )
    mt2 = effective_mass_sq(m, scenario.q1, scenario.q2, scenario.q * b)
    scale = 1.0 + m * m + abs(4.0 * scenario.q1 * scenario.q2) + abs(
        2.0 * scenario.q * b * scenario.q2
    )
    if abs(mt2) < 1e-12 * scale:
        return EomResult.flagged(DEGENERACY_NOTE)
    dx = -(2.0 * scenario.q2 / mt2) * (EPS2 @ force)
    dv = (m / mt2) * force
    return EomResult(dx, dv)


def eom_from_kernel(y: EvolutionPoint, scenario: Scenario, tol: float = KERNEL_TOL) -> EomResult:
    """Equations of motion read off the kernel of the 2-form.

    Takes the minimum-norm kernel vector with ds = 1; components along
    kernel directions of zero ds (the central fibers dw, dz and, in
    degenerate members, free momentum directions) are thereby projected
    out, which matches the closed-form gauge dw/ds = dz/ds = 0.
    """
    scenario.check_point(y)
    sig = presymplectic_matrix(y, scenario)
    basis = kernel_basis(sig, tol)
    labels = coordinate_labels(scenario)
    i_s = labels.index("s")
    coeff = basis[i_s, :]
    nrm2 = float(coeff @ coeff)
    if nrm2 < 1e-20:
        return EomResult.flagged("no kernel direction with ds != 0")
    # the motion is well defined only if kernel directions with ds = 0 are
    # pure fiber (dw, dz): any x/v/spin content there means the 2-form has
    # degenerated and the quotient is not parametrized by s
    span_ds0 = np.linalg.svd(coeff.reshape(1, -1))[2][1:].T
    state_rows = [i for i, lab in enumerate(labels) if lab not in ("s", "w", "z")]
    leak = basis[state_rows, :] @ span_ds0
    if leak.size and float(np.max(np.abs(leak))) > 1e-8:
        return EomResult.flagged(DEGENERACY_NOTE)
    vec = basis @ (coeff / nrm2)
    d = scenario.dim
    dx = vec[:d]
    dv = vec[d : 2 * d]
    du = None
    if scenario.tag.has_spin:
        e1, e2 = spin_chart(y.u)
        du = vec[i_s + 1] * e1 + vec[i_s + 2] * e2
    return EomResult(dx, dv, du)


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    """Fixed-step RK4 trajectory with a conserved-quantity log."""

    scenario: Scenario
    s: np.ndarray
    x: np.ndarray
    v: np.ndarray
    u: np.ndarray | None = None
    w: np.ndarray | None = None
    z: np.ndarray | None = None
    conserved: dict = field(default_factory=dict)
    step: float = 0.0
    method: str = "rk4"
    backend: str = backend.BACKEND_NAME
    truncated: bool = False
    diagnostic: str | None = None
    u_drift_max: float = 0.0

    def __len__(self) -> int:
        return len(self.s)

    def columns(self):
        d = self.scenario.dim
        cols = [("s", self.s)]
        cols += [(f"x{i+1}", self.x[:, i]) for i in range(d)]
        cols += [(f"v{i+1}", self.v[:, i]) for i in range(d)]
        if self.w is not None:
            cols += [("w", self.w), ("z", self.z)]
        if self.u is not None:
            cols += [(f"u{i+1}", self.u[:, i]) for i in range(3)]
        cols += list(self.conserved.items())
        return cols

    def to_csv(self, f) -> None:
        """Write the sample table; floats use round-trip decimal form."""
        if isinstance(f, (str, bytes)):
            with open(f, "w") as fh:
                self.to_csv(fh)
            return
        cols = self.columns()
        f.write(",".join(name for name, _ in cols) + "\n")
        data = [np.asarray(vals) for _, vals in cols]
        for k in range(len(self.s)):
            f.write(",".join(repr(float(d[k])) for d in data) + "\n")

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def conserved_drift(traj: Trajectory) -> dict:
    """Max |c(s) - c(s0)| per logged conserved quantity."""
    return {
        name: float(np.max(np.abs(np.asarray(vals) - vals[0])))
        for name, vals in traj.conserved.items()
    }


def _conserved_log(scenario, s, x, v, u):
    tag = scenario.tag
    out: dict = {}
    m = scenario.m
    if tag is Tag.FREE2D_EXT:
        q1, q2 = scenario.q1, scenario.q2
        cross = v[:, 0] * x[:, 1] - v[:, 1] * x[:, 0]
        out["l"] = m * cross + q1 * np.sum(x * x, axis=1) - q2 * np.sum(v * v, axis=1) + scenario.theta
        g = m * x + 2.0 * q2 * (v @ EPS2.T)
        p = m * v + 2.0 * q1 * (x @ EPS2.T)
        out.update({"g1": g[:, 0], "g2": g[:, 1], "p1": p[:, 0], "p2": p[:, 1]})
        return out
    if tag in (Tag.FREE3D, Tag.FREE_SPIN3D):
        p = m * v
        l = np.cross(x, p)
        if tag is Tag.FREE_SPIN3D:
            l = l + scenario.s_spin * u
        for i in range(3):
            out[f"l{i+1}"] = l[:, i]
        for i in range(3):
            out[f"g{i+1}"] = m * x[:, i]
        for i in range(3):
            out[f"p{i+1}"] = p[:, i]
        if tag is Tag.FREE_SPIN3D:
            out["u_norm"] = np.linalg.norm(u, axis=1)
        return out
    if tag is Tag.EM3D_SPIN:
        out["u_norm"] = np.linalg.norm(u, axis=1)
        b0 = np.asarray(scenario.field.magnetic(x[0], float(s[0])), dtype=float)
        nb = float(np.linalg.norm(b0))
        if nb > 0.0:
            bhat = b0 / nb
            e1, e2 = spin_chart(bhat)
            out["u_dot_Bhat"] = u @ bhat
            ang = np.arctan2(u @ e2, u @ e1)
            out["precession_angle"] = np.unwrap(ang)
        return out
    return out


def _pack_state(y: EvolutionPoint, scenario: Scenario) -> np.ndarray:
    parts = [y.x, y.v]
    if scenario.tag.has_spin:
        parts.append(y.u)
    return np.concatenate(parts)


def _mt2_sign(scenario, x, s) -> float:
    b = float(scenario.field.magnetic(x, s))
    mt2 = effective_mass_sq(scenario.m, scenario.q1, scenario.q2, scenario.q * b)
    return 1.0 if mt2 >= 0.0 else -1.0


def _rhs_generic(scenario, state, s, mt2_sign0=0.0):
    d = scenario.dim
    if (
        scenario.tag is Tag.EM2D_EXT
        and mt2_sign0 != 0.0
        and _mt2_sign(scenario, state[:d], s) != mt2_sign0
    ):
        return None
    u = state[2 * d : 2 * d + 3] if scenario.tag.has_spin else None
    y = EvolutionPoint(state[:d], state[d : 2 * d], s, u)
    res = _eom_raw(y, scenario)
    if res.degenerate:
        return None
    parts = [res.dx, res.dv]
    if scenario.tag.has_spin:
        parts.append(res.du)
    return np.concatenate(parts)


def _run_generic(scenario, state0, s0, h, n):
    dim = state0.shape[0]
    out = np.zeros((n + 1, dim))
    out[0] = state0
    y = state0.copy()
    drift_max = 0.0
    has_u = scenario.tag.has_spin
    d = scenario.dim
    sign0 = 0.0
    if scenario.tag is Tag.EM2D_EXT:
        sign0 = _mt2_sign(scenario, state0[:d], s0)
    for k in range(n):
        s = s0 + k * h
        k1 = _rhs_generic(scenario, y, s, sign0)
        if k1 is None:
            return out, k, drift_max
        k2 = _rhs_generic(scenario, y + 0.5 * h * k1, s + 0.5 * h, sign0)
        if k2 is None:
            return out, k, drift_max
        k3 = _rhs_generic(scenario, y + 0.5 * h * k2, s + 0.5 * h, sign0)
        if k3 is None:
            return out, k, drift_max
        k4 = _rhs_generic(scenario, y + h * k3, s + h, sign0)
        if k4 is None:
            return out, k, drift_max
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if has_u:
            nrm = float(np.linalg.norm(y[2 * d : 2 * d + 3]))
            drift_max = max(drift_max, abs(nrm - 1.0))
            y[2 * d : 2 * d + 3] /= nrm
        out[k + 1] = y
    return out, n, drift_max


def integrate(
    y0: EvolutionPoint,
    scenario: Scenario,
    s_span,
    step: float = 1e-3,
    force_generic: bool = False,
) -> Trajectory:
    """Classical fixed-step RK4 over s_span = (s0, s1).

    Preset fields run on the selected backend kernel; user-supplied field
    callables use the generic Python path.  The spin direction is
    renormalized after every step and the worst pre-renormalization drift
    is recorded.  A degeneracy encountered mid-run truncates the
    trajectory and attaches a diagnostic.
    """
    scenario.check_point(y0)
    s0, s1 = float(s_span[0]), float(s_span[1])
    if not (s1 > s0) or step <= 0.0:
        raise ValueError("need s1 > s0 and step > 0")
    n = max(1, int(round((s1 - s0) / step)))
    state0 = _pack_state(y0, scenario)

    fld = getattr(scenario, "field", None)
    use_kernel = not force_generic and (fld is None or getattr(fld, "preset", False))
    if use_kernel:
        params = np.array(
            [
                scenario.m,
                scenario.q,
                scenario.mu,
                scenario.theta,
                scenario.q1,
                scenario.q2,
                scenario.s_spin,
            ]
        )
        if fld is None:
            fp = np.zeros(5) if scenario.dim == 2 else np.zeros(15)
        else:
            fp = fld.pack()
        states, done, drift = backend.run_flat(
            _TAG_CODES[scenario.tag], params, fp, state0, s0, step, n
        )
        backend_name = backend.BACKEND_NAME
    else:
        states, done, drift = _run_generic(scenario, state0, s0, step, n)
        backend_name = "generic-python"

    truncated = done < n
    states = states[: done + 1]
    s = s0 + step * np.arange(done + 1)
    d = scenario.dim
    x = states[:, :d]
    v = states[:, d : 2 * d]
    u = states[:, 2 * d : 2 * d + 3] if scenario.tag.has_spin else None
    w = z = None
    if d == 2:
        w = np.full(done + 1, y0.w)
        z = np.full(done + 1, y0.z)
    diagnostic = None
    if truncated:
        diagnostic = f"degenerate 2-form at step {done}: " + DEGENERACY_NOTE
    return Trajectory(
        scenario=scenario,
        s=s,
        x=x,
        v=v,
        u=u,
        w=w,
        z=z,
        conserved=_conserved_log(scenario, s, x, v, u),
        step=step,
        backend=backend_name,
        truncated=truncated,
        diagnostic=diagnostic,
        u_drift_max=float(drift),
    )
