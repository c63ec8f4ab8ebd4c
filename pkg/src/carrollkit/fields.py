"""Electromagnetic background fields.

Planar fields have a 2-component electric field and a scalar magnetic
field; 3d fields have 3-component E and B.  The preset families (uniform
and linear gradient) expose exact analytic gradients and can be handed to
the compiled integrator core; arbitrary callables fall back to central
differences and to the generic Python integrator.

Units follow the convention [q E / m] = 1/length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

FD_STEP = 1e-5


@dataclass(frozen=True)
class UniformField2D:
    E: object = (0.0, 0.0)
    B: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "E", np.asarray(self.E, dtype=float).reshape(2))
        object.__setattr__(self, "B", float(self.B))

    preset = True

    def electric(self, x, s):
        return self.E

    def magnetic(self, x, s):
        return self.B

    def magnetic_gradient(self, x, s):
        return np.zeros(2)

    def pack(self):
        return np.array([self.E[0], self.E[1], self.B, 0.0, 0.0])


@dataclass(frozen=True)
class LinearField2D:
    """B(x) = B0 + <B_gradient, x>, uniform E."""

    E: object = (0.0, 0.0)
    B0: float = 0.0
    B_gradient: object = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "E", np.asarray(self.E, dtype=float).reshape(2))
        object.__setattr__(self, "B0", float(self.B0))
        object.__setattr__(
            self, "B_gradient", np.asarray(self.B_gradient, dtype=float).reshape(2)
        )

    preset = True

    def electric(self, x, s):
        return self.E

    def magnetic(self, x, s):
        return self.B0 + float(self.B_gradient @ np.asarray(x, dtype=float))

    def magnetic_gradient(self, x, s):
        return self.B_gradient

    def pack(self):
        return np.array(
            [self.E[0], self.E[1], self.B0, self.B_gradient[0], self.B_gradient[1]]
        )


@dataclass(frozen=True)
class CallableField2D:
    """User-supplied planar field maps (x, s) -> E / B.

    The magnetic gradient is taken analytically when ``gradient_fn`` is
    given, otherwise by second-order central differences.
    """

    electric_fn: Callable
    magnetic_fn: Callable
    gradient_fn: Callable | None = None
    fd_step: float = FD_STEP

    preset = False

    def electric(self, x, s):
        return np.asarray(self.electric_fn(np.asarray(x, dtype=float), s), dtype=float)

    def magnetic(self, x, s):
        return float(self.magnetic_fn(np.asarray(x, dtype=float), s))

    def magnetic_gradient(self, x, s):
        if self.gradient_fn is not None:
            return np.asarray(self.gradient_fn(np.asarray(x, dtype=float), s), dtype=float)
        x = np.asarray(x, dtype=float)
        h = self.fd_step
        out = np.empty(2)
        for i in range(2):
            dx = np.zeros(2)
            dx[i] = h
            out[i] = (self.magnetic_fn(x + dx, s) - self.magnetic_fn(x - dx, s)) / (2 * h)
        return out


@dataclass(frozen=True)
class UniformField3D:
    E: object = (0.0, 0.0, 0.0)
    B: object = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "E", np.asarray(self.E, dtype=float).reshape(3))
        object.__setattr__(self, "B", np.asarray(self.B, dtype=float).reshape(3))

    preset = True

    def electric(self, x, s):
        return self.E

    def magnetic(self, x, s):
        return self.B

    def spin_gradient(self, x, s, u):
        """grad_x <u, B>."""
        return np.zeros(3)

    def pack(self):
        return np.concatenate([self.E, self.B, np.zeros(9)])


@dataclass(frozen=True)
class LinearField3D:
    """B(x) = B0 + B_jacobian @ x, uniform E."""

    E: object = (0.0, 0.0, 0.0)
    B0: object = (0.0, 0.0, 0.0)
    B_jacobian: object = None

    def __post_init__(self):
        object.__setattr__(self, "E", np.asarray(self.E, dtype=float).reshape(3))
        object.__setattr__(self, "B0", np.asarray(self.B0, dtype=float).reshape(3))
        J = np.zeros((3, 3)) if self.B_jacobian is None else np.asarray(self.B_jacobian, dtype=float)
        object.__setattr__(self, "B_jacobian", J.reshape(3, 3))

    preset = True

    def electric(self, x, s):
        return self.E

    def magnetic(self, x, s):
        return self.B0 + self.B_jacobian @ np.asarray(x, dtype=float)

    def spin_gradient(self, x, s, u):
        return self.B_jacobian.T @ np.asarray(u, dtype=float)

    def pack(self):
        return np.concatenate([self.E, self.B0, self.B_jacobian.reshape(-1)])


@dataclass(frozen=True)
class CallableField3D:
    electric_fn: Callable
    magnetic_fn: Callable
    fd_step: float = FD_STEP

    preset = False

    def electric(self, x, s):
        return np.asarray(self.electric_fn(np.asarray(x, dtype=float), s), dtype=float)

    def magnetic(self, x, s):
        return np.asarray(self.magnetic_fn(np.asarray(x, dtype=float), s), dtype=float)

    def spin_gradient(self, x, s, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        h = self.fd_step
        out = np.empty(3)
        for i in range(3):
            dx = np.zeros(3)
            dx[i] = h
            fp = float(u @ np.asarray(self.magnetic_fn(x + dx, s), dtype=float))
            fm = float(u @ np.asarray(self.magnetic_fn(x - dx, s), dtype=float))
            out[i] = (fp - fm) / (2 * h)
        return out


NO_FIELD_2D = UniformField2D()
NO_FIELD_3D = UniformField3D()
