"""Dynamical scenarios and evolution-space points.

A Scenario bundles one of the seven flat-space particle models with its
parameters and background fields.  Validation enforces the model
constraints: the planar photon is massless and chargeless, the 3d models
carry no central charges, and spin models need a nonzero scalar spin
(otherwise their 2-form degenerates on the sphere block).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import fields as field_mod


class Tag(enum.Enum):
    FREE3D = "free3d"
    FREE_SPIN3D = "free_spin3d"
    EM3D_SPINLESS = "em3d_spinless"
    EM3D_SPIN = "em3d_spin"
    FREE2D_EXT = "free2d_ext"
    EM2D_EXT = "em2d_ext"
    PHOTON2D = "photon2d"

    @property
    def dim(self) -> int:
        return 3 if self.value.startswith(("free3d", "free_spin3d", "em3d")) else 2

    @property
    def has_spin(self) -> bool:
        return self in (Tag.FREE_SPIN3D, Tag.EM3D_SPIN)

    @property
    def planar_extended(self) -> bool:
        return self in (Tag.FREE2D_EXT, Tag.EM2D_EXT, Tag.PHOTON2D)

    @property
    def has_field(self) -> bool:
        return self in (Tag.EM3D_SPINLESS, Tag.EM3D_SPIN, Tag.EM2D_EXT, Tag.PHOTON2D)

    @property
    def free(self) -> bool:
        return self in (Tag.FREE3D, Tag.FREE_SPIN3D, Tag.FREE2D_EXT)


@dataclass(frozen=True)
class Scenario:
    tag: Tag
    m: float = 0.0
    q: float = 0.0
    mu: float = 0.0        # magnetic moment / anyon coupling constant
    theta: float = 0.0     # anyonic spin (planar tags)
    q1: float = 0.0        # central charges (planar tags)
    q2: float = 0.0
    s_spin: float = 0.0    # scalar spin (3d spin tags)
    field: object = None

    def __post_init__(self):
        for name in ("m", "q", "mu", "theta", "q1", "q2", "s_spin"):
            object.__setattr__(self, name, float(getattr(self, name)))
        tag = self.tag
        if tag is Tag.PHOTON2D and (self.m != 0.0 or self.q != 0.0):
            raise ValueError("the planar photon has m = 0 and q = 0")
        if tag.dim == 3 and (self.q1 != 0.0 or self.q2 != 0.0):
            raise ValueError("3d scenarios carry no central charges")
        if tag.has_spin and self.s_spin == 0.0:
            raise ValueError("spin scenarios need s_spin != 0")
        if tag.has_field:
            fld = self.field
            if fld is None:
                fld = field_mod.NO_FIELD_3D if tag.dim == 3 else field_mod.NO_FIELD_2D
                object.__setattr__(self, "field", fld)
        elif self.field is not None:
            raise ValueError(f"{tag} takes no background field")

    @property
    def dim(self) -> int:
        return self.tag.dim

    def check_point(self, y: "EvolutionPoint") -> None:
        """Validate the coordinate layout of y against this scenario."""
        d = self.dim
        if y.x.shape != (d,) or y.v.shape != (d,):
            raise ValueError(f"{self.tag} needs {d}-dimensional x and v")
        if self.tag.has_spin:
            if y.u is None:
                raise ValueError(f"{self.tag} needs a spin direction u")
            n = float(np.linalg.norm(y.u))
            if abs(n - 1.0) > 1e-10:
                raise ValueError(f"|u| = {n!r} is not 1 within 1e-10")
        elif y.u is not None:
            raise ValueError(f"{self.tag} has no spin direction")


@dataclass(frozen=True)
class EvolutionPoint:
    """Point of the evolution space.

    Layouts: (x, v, s) for the 3d spinless models, plus u on the unit
    sphere for spin models; (x, v, s, w, z) for the extended planar models,
    where w and z are the central fiber coordinates.
    """

    x: object
    v: object
    s: float = 0.0
    u: object = None
    w: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).copy()
        v = np.asarray(self.v, dtype=float).copy()
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)
        if self.u is not None:
            u = np.asarray(self.u, dtype=float).reshape(3).copy()
            u.setflags(write=False)
            object.__setattr__(self, "u", u)
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "w", float(self.w))
        object.__setattr__(self, "z", float(self.z))


# Convenience constructors -------------------------------------------------

def free3d(m: float) -> Scenario:
    return Scenario(Tag.FREE3D, m=m)


def free_spin3d(m: float, s_spin: float) -> Scenario:
    return Scenario(Tag.FREE_SPIN3D, m=m, s_spin=s_spin)


def em3d_spinless(m: float, q: float, field=None) -> Scenario:
    return Scenario(Tag.EM3D_SPINLESS, m=m, q=q, field=field)


def em3d_spin(m: float, q: float, s_spin: float, mu: float, field=None) -> Scenario:
    return Scenario(Tag.EM3D_SPIN, m=m, q=q, s_spin=s_spin, mu=mu, field=field)


def free2d_ext(m: float, q1: float, q2: float, theta: float = 0.0) -> Scenario:
    return Scenario(Tag.FREE2D_EXT, m=m, q1=q1, q2=q2, theta=theta)


def em2d_ext(m, q, q1, q2, theta=0.0, mu=0.0, field=None) -> Scenario:
    return Scenario(Tag.EM2D_EXT, m=m, q=q, q1=q1, q2=q2, theta=theta, mu=mu, field=field)


def photon2d(q1, q2, theta=0.0, mu=0.0, field=None) -> Scenario:
    return Scenario(Tag.PHOTON2D, q1=q1, q2=q2, theta=theta, mu=mu, field=field)
