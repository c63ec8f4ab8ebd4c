"""Batch front end.

Verbs:
    carrollkit run <config.json>       execute a job, write CSV + report
    carrollkit check <config.json>     validate the config only
    carrollkit invariants --seed N     run the randomized invariant sweeps

One scenario per config file.  Exit codes: 0 success, 1 validation error,
2 runtime degeneracy (partial outputs are flushed).  The output directory
of relative paths can be overridden with the CARROLLKIT_OUTDIR environment
variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import backend, cartan, dynamics, invariants, quantize
from .coadjoint import casimirs, moment_map
from .fields import LinearField2D, LinearField3D, UniformField2D, UniformField3D
from .lie_core import GroupElement, Kind, group_exp, AlgebraElement
from .scenarios import EvolutionPoint, Scenario, Tag

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DEGENERATE = 2


class ConfigError(ValueError):
    pass


_COMMON_KEYS = {"job", "seed", "out_csv", "out_report"}
_JOB_KEYS = {
    "dynamics": _COMMON_KEYS
    | {
        "scenario",
        "m",
        "q",
        "mu",
        "theta",
        "q1",
        "q2",
        "s_spin",
        "field",
        "x0",
        "v0",
        "u0",
        "w0",
        "z0",
        "span",
        "step",
    },
    "gravity": _COMMON_KEYS
    | {"geometry", "m", "q1", "q2", "x0", "v0", "boost0", "span", "step"},
    "quantize": _COMMON_KEYS
    | {
        "polarization",
        "m",
        "hbar",
        "grid",
        "profile",
        "element",
        "fd_step",
        "c_sequence",
        "out_profile",
    },
    "invariants": _COMMON_KEYS,
}

_SCENARIO_TAGS = {t.value: t for t in Tag}


@dataclass
class RunConfig:
    job: str
    options: dict = field(default_factory=dict)
    seed: int = 0

    def to_json(self) -> str:
        payload = {"job": self.job, "seed": self.seed}
        payload.update(self.options)
        return json.dumps(payload, indent=2, sort_keys=True)


def _require(data: dict, key: str, job: str):
    if key not in data:
        raise ConfigError(f"missing key '{key}' for job '{job}'")
    return data[key]


def parse_config(text: str) -> RunConfig:
    """Parse and validate a config document (JSON, one job per file)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    job = data.get("job")
    if job not in _JOB_KEYS:
        raise ConfigError(f"unknown or missing job kind: {job!r}")
    unknown = set(data) - _JOB_KEYS[job]
    if unknown:
        raise ConfigError(
            f"unknown keys for job '{job}': {', '.join(sorted(unknown))}"
        )
    seed = int(data.get("seed", 0))
    options = {k: v for k, v in data.items() if k not in ("job", "seed")}
    cfg = RunConfig(job=job, options=options, seed=seed)
    # eager validation of the expensive-to-misspell parts
    if job == "dynamics":
        _build_dynamics_job(cfg)
    elif job == "gravity":
        _build_gravity_job(cfg)
    elif job == "quantize":
        _build_quantize_job(cfg)
    return cfg


def _build_field(tag: Tag, spec, job: str):
    if spec is None:
        return None
    if not isinstance(spec, dict):
        raise ConfigError("field must be an object")
    if tag.dim == 2:
        allowed = {"E", "B", "B_gradient"}
        unknown = set(spec) - allowed
        if unknown:
            raise ConfigError(f"unknown field keys: {', '.join(sorted(unknown))}")
        e = spec.get("E", (0.0, 0.0))
        b = float(spec.get("B", 0.0))
        grad = spec.get("B_gradient")
        if grad is None:
            return UniformField2D(E=e, B=b)
        return LinearField2D(E=e, B0=b, B_gradient=grad)
    allowed = {"E", "B", "B_jacobian"}
    unknown = set(spec) - allowed
    if unknown:
        raise ConfigError(f"unknown field keys: {', '.join(sorted(unknown))}")
    e = spec.get("E", (0.0, 0.0, 0.0))
    b = spec.get("B", (0.0, 0.0, 0.0))
    jac = spec.get("B_jacobian")
    if jac is None:
        return UniformField3D(E=e, B=b)
    return LinearField3D(E=e, B0=b, B_jacobian=jac)


def _build_dynamics_job(cfg: RunConfig):
    opts = cfg.options
    tag_name = _require(opts, "scenario", "dynamics")
    if tag_name not in _SCENARIO_TAGS:
        raise ConfigError(f"unknown scenario tag: {tag_name!r}")
    tag = _SCENARIO_TAGS[tag_name]
    fld = _build_field(tag, opts.get("field"), "dynamics") if tag.has_field else None
    if not tag.has_field and "field" in opts:
        raise ConfigError(f"scenario {tag_name} takes no field")
    try:
        sc = Scenario(
            tag,
            m=float(opts.get("m", 0.0)),
            q=float(opts.get("q", 0.0)),
            mu=float(opts.get("mu", 0.0)),
            theta=float(opts.get("theta", 0.0)),
            q1=float(opts.get("q1", 0.0)),
            q2=float(opts.get("q2", 0.0)),
            s_spin=float(opts.get("s_spin", 0.0)),
            field=fld,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid scenario parameters: {exc}") from exc
    span = _require(opts, "span", "dynamics")
    if not (isinstance(span, (list, tuple)) and len(span) == 2 and span[1] > span[0]):
        raise ConfigError("span must be [s0, s1] with s1 > s0")
    step = float(opts.get("step", 1e-3))
    if step <= 0:
        raise ConfigError("step must be positive")
    x0 = _require(opts, "x0", "dynamics")
    v0 = _require(opts, "v0", "dynamics")
    try:
        y0 = EvolutionPoint(
            x0,
            v0,
            float(span[0]),
            opts.get("u0"),
            w=float(opts.get("w0", 0.0)),
            z=float(opts.get("z0", 0.0)),
        )
        sc.check_point(y0)
    except ValueError as exc:
        raise ConfigError(f"invalid initial conditions: {exc}") from exc
    return sc, y0, (float(span[0]), float(span[1])), step


def _build_gravity_job(cfg: RunConfig):
    opts = cfg.options
    geo = _require(opts, "geometry", "gravity")
    horizon_report = None
    if geo == "flat":
        geom = cartan.flat_geometry()
    elif isinstance(geo, dict) and geo.get("name") == "kerr_newman":
        unknown = set(geo) - {"name", "M", "a", "Q"}
        if unknown:
            raise ConfigError(f"unknown geometry keys: {', '.join(sorted(unknown))}")
        try:
            geom, hrep = cartan.kerr_newman_horizon(
                float(geo.get("M", 1.0)), float(geo.get("a", 0.0)), float(geo.get("Q", 0.0))
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        horizon_report = {
            "r_plus": hrep.r_plus,
            "xi_in_kernel": hrep.xi_in_kernel,
            "kernel_dims": list(hrep.kernel_dims),
            "lie_derivative": hrep.lie_derivative,
            "ok": hrep.ok,
        }
    elif isinstance(geo, dict) and geo.get("name") == "flat_with_T":
        unknown = set(geo) - {"name", "T"}
        if unknown:
            raise ConfigError(f"unknown geometry keys: {', '.join(sorted(unknown))}")
        t = geo.get("T", (0.0, 0.0))
        # constant electric source on the second extension channel: the
        # particle then sees T_A = q2 * T
        geom = cartan.flat_geometry(t2=t)
    else:
        raise ConfigError(f"unknown geometry: {geo!r}")
    params = (
        float(opts.get("m", 1.0)),
        float(opts.get("q1", 0.0)),
        float(opts.get("q2", 0.0)),
    )
    x0 = np.asarray(_require(opts, "x0", "gravity"), dtype=float)
    if x0.shape != (3,):
        raise ConfigError("x0 must have 3 chart components")
    if "v0" in opts and "boost0" in opts:
        raise ConfigError("give either v0 or boost0, not both")
    if "v0" in opts:
        v0 = np.asarray(opts["v0"], dtype=float)
        if v0.shape != (3,):
            raise ConfigError("v0 must have 3 components")
    else:
        v0 = cartan.momentum_covector(geom, x0, opts.get("boost0", (0.0, 0.0)))
    span = _require(opts, "span", "gravity")
    if not (isinstance(span, (list, tuple)) and len(span) == 2 and span[1] > span[0]):
        raise ConfigError("span must be [tau0, tau1] with tau1 > tau0")
    step = float(opts.get("step", 1e-3))
    if step <= 0:
        raise ConfigError("step must be positive")
    return geom, params, x0, v0, (float(span[0]), float(span[1])), step, horizon_report


def _build_quantize_job(cfg: RunConfig):
    opts = cfg.options
    pol = opts.get("polarization", "position")
    if pol not in ("position", "momentum"):
        raise ConfigError("polarization must be 'position' or 'momentum'")
    m = float(_require(opts, "m", "quantize"))
    hbar = float(opts.get("hbar", 1.0))
    gspec = _require(opts, "grid", "quantize")
    unknown = set(gspec) - {"lo", "hi", "num"}
    if unknown:
        raise ConfigError(f"unknown grid keys: {', '.join(sorted(unknown))}")
    try:
        grid = quantize.GridSpec(gspec["lo"], gspec["hi"], gspec["num"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid grid: {exc}") from exc
    prof_spec = opts.get("profile", {"type": "gaussian"})
    if prof_spec.get("type") != "gaussian":
        raise ConfigError("only gaussian profiles are supported in configs")
    profile = quantize.gaussian_profile(
        grid, prof_spec.get("center"), float(prof_spec.get("width", 1.0))
    )
    psi = quantize.WaveFunction(pol, m, profile, grid, hbar)
    el = opts.get("element", {})
    unknown = set(el) - {"angle", "omega", "b", "c", "f"}
    if unknown:
        raise ConfigError(f"unknown element keys: {', '.join(sorted(unknown))}")
    kind = Kind.CARROLL_3D if grid.dim == 3 else Kind.CARROLL_2D
    rot = el.get("omega", el.get("angle", 0.0))
    a = group_exp(AlgebraElement(kind, omega=rot))
    a = GroupElement(kind, a.A, el.get("b"), el.get("c"), float(el.get("f", 0.0)))
    fd_step = float(opts.get("fd_step", 1e-4))
    c_seq = [float(c) for c in opts.get("c_sequence", (10.0, 100.0, 1000.0))]
    return psi, a, fd_step, c_seq


def _out_path(path: str) -> str:
    outdir = os.environ.get("CARROLLKIT_OUTDIR")
    if outdir and not os.path.isabs(path):
        os.makedirs(outdir, exist_ok=True)
        return os.path.join(outdir, path)
    return path


def _write_report(opts: dict, report: dict) -> None:
    path = opts.get("out_report")
    if path:
        with open(_out_path(path), "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _run_dynamics(cfg: RunConfig) -> int:
    sc, y0, span, step = _build_dynamics_job(cfg)
    traj = dynamics.integrate(y0, sc, span, step)
    if cfg.options.get("out_csv"):
        traj.to_csv(_out_path(cfg.options["out_csv"]))

    sig = dynamics.presymplectic_matrix(y0, sc)
    kdim = dynamics.kernel_basis(sig).shape[1]
    b0 = 0.0
    if sc.tag.has_field and sc.dim == 2:
        b0 = float(sc.field.magnetic(y0.x, y0.s))
    report: dict = {
        "job": "dynamics",
        "scenario": sc.tag.value,
        "backend": traj.backend,
        "kernel_dim": kdim,
        "effective_mass_sq": dynamics.effective_mass_sq(sc.m, sc.q1, sc.q2, sc.q * b0)
        if sc.dim == 2
        else sc.m**2,
        "samples": len(traj),
        "truncated": traj.truncated,
        "diagnostic": traj.diagnostic,
        "u_drift_max": traj.u_drift_max,
    }
    if sc.tag.planar_extended:
        if sc.tag.free:
            mu0 = moment_map(y0, sc)
        else:
            # moment of the matching free particle at y0
            free_sc = Scenario(
                Tag.FREE2D_EXT, m=sc.m, q1=sc.q1, q2=sc.q2, theta=sc.theta
            )
            mu0 = moment_map(y0, free_sc)
        cset = casimirs(mu0)
        report["casimirs"] = {
            "C1": cset.c1,
            "C2": cset.c2,
            "C3": cset.c3,
            "C4": cset.c4,
        }
    eom_closed = dynamics.eom(y0, sc)
    eom_kernel = dynamics.eom_from_kernel(y0, sc)
    agree = None
    if not (eom_closed.degenerate or eom_kernel.degenerate):
        agree = float(
            max(
                np.max(np.abs(eom_closed.dx - eom_kernel.dx)),
                np.max(np.abs(eom_closed.dv - eom_kernel.dv)),
            )
        )
    report["checks"] = {
        "two_form_antisymmetry": float(np.max(np.abs(sig + sig.T))),
        "eom_vs_kernel_at_y0": agree,
        "conserved_drift": dynamics.conserved_drift(traj),
    }
    _write_report(cfg.options, report)
    return EXIT_DEGENERATE if traj.truncated else EXIT_OK


def _run_gravity(cfg: RunConfig) -> int:
    geom, params, x0, v0, span, step, horizon_report = _build_gravity_job(cfg)
    traj = cartan.integrate_gravity(x0, v0, geom, params, span, step)
    if cfg.options.get("out_csv"):
        traj.to_csv(_out_path(cfg.options["out_csv"]))
    res = cartan.structure_residuals(geom, x0)
    report: dict = {
        "job": "gravity",
        "geometry": geom.name,
        "regime": traj.regime,
        "samples": len(traj.tau),
        "truncated": traj.truncated,
        "diagnostic": traj.diagnostic,
        "structure_residuals": {
            "duality": res.duality,
            "connection_constraints": res.connection_constraints,
            "torsion": res.torsion,
            "central_1": res.central_1,
            "central_2": res.central_2,
        },
    }
    if horizon_report is not None:
        report["horizon"] = horizon_report
    _write_report(cfg.options, report)
    return EXIT_DEGENERATE if traj.truncated else EXIT_OK


def _run_quantize(cfg: RunConfig) -> int:
    psi, a, fd_step, c_seq = _build_quantize_job(cfg)
    res = quantize.carroll_residual(psi, fd_step=fd_step)
    kg = quantize.kg_limit_residuals(psi, c_seq)
    transformed = quantize.rep(a, psi)
    report = {
        "job": "quantize",
        "polarization": psi.polarization,
        "carroll_residual_analytic": res.analytic,
        "carroll_residual_fd": res.finite_difference,
        "kg_residuals": dict(zip([repr(c) for c in c_seq], kg)),
        "norm": quantize.l2_norm(psi),
        "norm_after_rep": quantize.l2_norm(transformed),
        "curvature_residual": quantize.curvature_residual(
            np.zeros(psi.grid.dim), np.ones(psi.grid.dim), psi.hbar
        ),
    }
    if cfg.options.get("out_profile"):
        pts = psi.grid.points()
        vals = psi.profile.reshape(-1)
        with open(_out_path(cfg.options["out_profile"]), "w") as fh:
            cols = [f"x{i+1}" for i in range(psi.grid.dim)]
            fh.write(",".join(cols + ["re_phi", "im_phi"]) + "\n")
            for k in range(len(vals)):
                row = [*pts[k], vals[k].real, vals[k].imag]
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    _write_report(cfg.options, report)
    return EXIT_OK


def _run_invariants(cfg: RunConfig) -> int:
    report = invariants.run_all(cfg.seed)
    _write_report(cfg.options, report)
    for suite, checks in report["suites"].items():
        for c in checks:
            status = "pass" if c["passed"] else "FAIL"
            print(
                f"[{status}] {suite}/{c['name']}: residual {c['residual']:.3e}"
                f" (tolerance {c['tolerance']:.1e}, n={c['count']})"
            )
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="carrollkit",
        description="Carroll particle dynamics: batch runs and invariant sweeps",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    p_run = sub.add_parser("run", help="execute a config")
    p_run.add_argument("config")
    p_check = sub.add_parser("check", help="validate a config")
    p_check.add_argument("config")
    p_inv = sub.add_parser("invariants", help="run randomized invariant sweeps")
    p_inv.add_argument("--seed", type=int, default=0)
    p_inv.add_argument("--out-report", default=None)
    args = parser.parse_args(argv)

    if args.verb == "invariants":
        cfg = RunConfig(
            "invariants",
            options={"out_report": args.out_report} if args.out_report else {},
            seed=args.seed,
        )
        return _run_invariants(cfg)

    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.verb == "check":
        print(f"ok: valid {cfg.job} config")
        return EXIT_OK

    try:
        if cfg.job == "dynamics":
            return _run_dynamics(cfg)
        if cfg.job == "gravity":
            return _run_gravity(cfg)
        if cfg.job == "quantize":
            return _run_quantize(cfg)
        return _run_invariants(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
