"""Fixed-step integrators for the accelerated and first-order flows.

All simulators share one classical RK4 core on the uniform grid
t_k = t0 + k dt, evaluating the time-varying damping coefficient r/t at
the substage times t, t + dt/2, t + dt.  Trajectories whose position
norm passes 1e150 (or turns non-finite) are truncated at the last good
sample and flagged ``saturated`` rather than poisoning the record with
infinities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import NonFiniteField

__all__ = [
    "IntegratorConfig",
    "TrajectoryRecord",
    "simulate_nagd",
    "simulate_first_order",
    "simulate_modal",
    "simulate_smooth_nagd",
    "finite_difference_jacobian",
]

#: Position-norm guard beyond which integration truncates.
OVERFLOW_NORM = 1e150


@dataclass(frozen=True)
class IntegratorConfig:
    """Grid and damping parameters for one run.

    ``record_stride`` keeps every k-th step (plus the initial sample), so
    a run of n_steps steps records n_steps // record_stride + 1 rows.
    """

    t0: float = 1.0
    t_end: float = 100.0
    dt: float = 0.01
    damping_exponent: float = 3.0
    record_stride: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t0) and self.t0 > 0.0):
            raise ValueError("t0 must be positive (the damping blows up at t = 0)")
        if not (math.isfinite(self.t_end) and self.t_end > self.t0):
            raise ValueError("t_end must exceed t0")
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError("dt must be positive")
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            raise ValueError("record_stride must be a positive integer")
        if self.n_steps < 1:
            raise ValueError("the grid contains no steps; shrink dt or extend t_end")
        if self.n_steps > 10**8:
            raise ValueError("more than 1e8 steps requested; coarsen dt")
        if self.damping_exponent <= 1.0:
            warnings.warn(
                "damping exponent <= 1 is outside the guaranteed-convergence regime",
                stacklevel=2,
            )

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t0) / self.dt))


@dataclass(frozen=True)
class TrajectoryRecord:
    """Recorded samples of one run.

    ``q`` and ``v`` have shape (M, n) for vector flows and (M,) complex
    for scalar modal runs.  For first-order runs ``v`` holds dx/dt.
    """

    times: np.ndarray
    q: np.ndarray
    v: np.ndarray
    saturated: bool
    meta: dict

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]


def _rk4(
    f: Callable,
    config: IntegratorConfig,
    s0: np.ndarray,
    norm_sq: Callable[[np.ndarray], float],
) -> tuple[np.ndarray, np.ndarray, bool]:
    n_steps = config.n_steps
    stride = config.record_stride
    n_rec = n_steps // stride + 1
    times = np.empty(n_rec)
    states = np.empty((n_rec,) + s0.shape, dtype=s0.dtype)
    times[0] = config.t0
    states[0] = s0
    filled = 1
    s = s0
    t0, dt = config.t0, config.dt
    half = 0.5 * dt
    sixth = dt / 6.0
    guard = OVERFLOW_NORM * OVERFLOW_NORM
    saturated = False
    for k in range(n_steps):
        t = t0 + k * dt
        k1 = f(t, s)
        k2 = f(t + half, s + half * k1)
        k3 = f(t + half, s + half * k2)
        k4 = f(t + dt, s + dt * k3)
        s = s + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        qn = norm_sq(s)
        if not (qn <= guard):  # catches NaN as well
            saturated = True
            break
        if (k + 1) % stride == 0:
            times[filled] = t0 + (k + 1) * dt
            states[filled] = s
            filled += 1
    return times[:filled], states[:filled], saturated


def _check_system(matrix, offset, q0, v0):
    g = np.asarray(matrix, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("matrix must be square")
    n = g.shape[0]
    b = np.zeros(n) if offset is None else np.asarray(offset, dtype=float)
    q = np.asarray(q0, dtype=float)
    v = np.zeros(n) if v0 is None else np.asarray(v0, dtype=float)
    for name, vec in (("offset", b), ("q0", q), ("v0", v)):
        if vec.shape != (n,):
            raise ValueError(f"{name} must have length {n}")
    if not all(np.all(np.isfinite(a)) for a in (g, b, q, v)):
        raise ValueError("matrix, offset and initial data must be finite")
    return g, b, q, v


def simulate_nagd(matrix, offset, q0, v0=None, config: IntegratorConfig = IntegratorConfig()) -> TrajectoryRecord:
    """Integrate x'' + (r/t) x' + G x + b = 0 from (q0, v0)."""
    g, b, q, v = _check_system(matrix, offset, q0, v0)
    n = g.shape[0]
    lin = np.zeros((2 * n, 2 * n))
    lin[:n, n:] = np.eye(n)
    lin[n:, :n] = -g
    const = np.concatenate([np.zeros(n), -b])
    r = config.damping_exponent

    def f(t, s):
        out = lin @ s + const
        out[n:] -= (r / t) * s[n:]
        return out

    s0 = np.concatenate([q, v])
    times, states, saturated = _rk4(f, config, s0, lambda s: float(s[:n] @ s[:n]))
    return TrajectoryRecord(
        times=times,
        q=states[:, :n],
        v=states[:, n:],
        saturated=saturated,
        meta={"kind": "nagd", "config": config},
    )


def simulate_first_order(matrix, offset, x0, config: IntegratorConfig = IntegratorConfig()) -> TrajectoryRecord:
    """Integrate the plain pseudo-gradient flow x' = -(G x + b)."""
    g, b, x, _ = _check_system(matrix, offset, x0, None)

    def f(t, s):
        return -(g @ s) - b

    times, states, saturated = _rk4(f, config, x.copy(), lambda s: float(s @ s))
    xdot = -(states @ g.T) - b
    return TrajectoryRecord(
        times=times,
        q=states,
        v=xdot,
        saturated=saturated,
        meta={"kind": "first-order", "config": config},
    )


def simulate_modal(lam: complex, y0: complex, ydot0: complex, config: IntegratorConfig = IntegratorConfig()) -> TrajectoryRecord:
    """Integrate the scalar modal equation y'' + (r/t) y' + lam y = 0."""
    lam = complex(lam)
    r = config.damping_exponent

    def f(t, s):
        return np.array([s[1], -lam * s[0] - (r / t) * s[1]])

    s0 = np.array([complex(y0), complex(ydot0)])
    times, states, saturated = _rk4(f, config, s0, lambda s: abs(s[0]) ** 2)
    return TrajectoryRecord(
        times=times,
        q=states[:, 0],
        v=states[:, 1],
        saturated=saturated,
        meta={"kind": "modal", "lam": lam, "config": config},
    )


def simulate_smooth_nagd(field: Callable, x0, v0=None, config: IntegratorConfig = IntegratorConfig()) -> TrajectoryRecord:
    """Integrate x'' + (r/t) x' + F(x) = 0 for a smooth pseudo-gradient F.

    The field is probed once at x0 to fix the dimension; any non-finite
    field value raises :class:`~nagdyn.errors.NonFiniteField` with the
    offending time in the message.
    """
    x = np.asarray(x0, dtype=float)
    if x.ndim != 1:
        raise ValueError("x0 must be a vector")
    n = x.shape[0]
    v = np.zeros(n) if v0 is None else np.asarray(v0, dtype=float)
    if v.shape != (n,):
        raise ValueError(f"v0 must have length {n}")
    probe = np.asarray(field(x), dtype=float)
    if probe.shape != (n,):
        raise ValueError("field(x0) must return a vector matching x0")
    r = config.damping_exponent

    def f(t, s):
        fx = np.asarray(field(s[:n]), dtype=float)
        if not np.all(np.isfinite(fx)):
            raise NonFiniteField(f"field returned a non-finite value near t = {t:.6g}")
        out = np.empty(2 * n)
        out[:n] = s[n:]
        out[n:] = -fx - (r / t) * s[n:]
        return out

    s0 = np.concatenate([x, v])
    times, states, saturated = _rk4(f, config, s0, lambda s: float(s[:n] @ s[:n]))
    return TrajectoryRecord(
        times=times,
        q=states[:, :n],
        v=states[:, n:],
        saturated=saturated,
        meta={"kind": "smooth-nagd", "config": config},
    )


def finite_difference_jacobian(field: Callable, x_star, step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of a vector field at x_star."""
    if not (step > 0.0 and math.isfinite(step)):
        raise ValueError("step must be positive")
    x = np.asarray(x_star, dtype=float)
    n = x.shape[0]
    jac = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = step
        jac[:, j] = (np.asarray(field(x + e), dtype=float) - np.asarray(field(x - e), dtype=float)) / (2.0 * step)
    return jac
