"""Trajectory diagnostics: modal projections, rate fits, certificates.

Everything here consumes recorded trajectories (or raw sample arrays)
and produces the quantities the theory makes claims about: per-mode
scalar series, fitted envelope rates, the Lyapunov certificate for
symmetric positive semidefinite interactions, Chetaev-type instability
certificates for negative-real and complex spectra, the conserved-flux
identity for complex modes, and distances to the interaction null space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import TrajectoryRecord
from .errors import InsufficientPoints, NonPositiveSeries, NotApplicable, TrivialNullspace

__all__ = [
    "ALGEBRAIC_WINDOW",
    "EXPONENTIAL_WINDOW",
    "RateFit",
    "LyapunovSeries",
    "ChetaevNegative",
    "ChetaevComplex",
    "NullspaceDistance",
    "modal_project",
    "nullspace_limit",
    "fit_rate",
    "lyapunov_series",
    "chetaev_negative",
    "chetaev_complex",
    "energy_identity_residual",
    "distance_to_nullspace",
]

#: Default fit window for algebraic (log-log) envelope rates.
ALGEBRAIC_WINDOW = (30.0, 100.0)

#: Default fit window for exponential (semilog) rates.
EXPONENTIAL_WINDOW = (20.0, 60.0)

#: Envelope exponent divided out when detrending oscillatory growth.
OSCILLATORY_ENVELOPE_POWER = -1.5


def _fd_derivative(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Five-point centered first derivative on a uniform grid.

    The two samples at each end fall back to lower-order one-sided
    stencils; callers that need the full fourth-order accuracy should
    restrict to the interior slice [2:-2].
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values)
    if t.shape[0] != y.shape[0]:
        raise ValueError("times and values must have equal length")
    if t.shape[0] < 5:
        raise InsufficientPoints("five-point differentiation needs at least 5 samples")
    h = t[1] - t[0]
    if not np.allclose(np.diff(t), h, rtol=1e-8, atol=1e-12 * abs(h)):
        raise ValueError("five-point differentiation requires a uniform grid")
    out = np.empty_like(y, dtype=complex if np.iscomplexobj(y) else float)
    out[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)
    out[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
    out[1] = (y[2] - y[0]) / (2.0 * h)
    out[-2] = (y[-1] - y[-3]) / (2.0 * h)
    out[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * h)
    return out


# --------------------------------------------------------------------------
# modal projection and the null-space limit


def modal_project(record: TrajectoryRecord, left_vector) -> tuple[np.ndarray, np.ndarray]:
    """Scalar modal series (y, ydot) = (w^* q, w^* v) for a left eigenvector.

    With w^* G = lam w^*, the projected series solves the scalar modal
    equation for lam exactly, which is what makes closed-form checks of
    vector simulations possible.
    """
    w = np.asarray(left_vector)
    if record.q.ndim != 2:
        raise ValueError("modal projection expects a vector trajectory")
    if w.shape != (record.q.shape[1],):
        raise ValueError("left eigenvector length must match the state dimension")
    wc = np.conj(w)
    return record.q @ wc, record.v @ wc


def nullspace_limit(t0: float, y0: float, ydot0: float) -> float:
    """Finite limit y0 + (t0/2) ydot0 of a zero-eigenvalue mode."""
    if t0 <= 0.0:
        raise ValueError("t0 must be positive")
    return y0 + 0.5 * t0 * ydot0


# --------------------------------------------------------------------------
# rate fitting


@dataclass(frozen=True)
class RateFit:
    """Least-squares slope of log |y| against log t or t."""

    kind: str
    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    n_points: int
    envelope: bool
    detrend_log_power: float


def fit_rate(
    times,
    values,
    kind: str = "algebraic",
    window: tuple[float, float] | None = None,
    envelope: bool = False,
    detrend_log_power: float = 0.0,
) -> RateFit:
    """Fit an envelope rate on a time window.

    kind="algebraic" regresses log y on log t (slope is the power);
    kind="exponential" regresses log y on t (slope is the rate).  With
    ``envelope=True`` the fit uses the strict local maxima of |values|,
    which is how oscillatory series must be measured.  A nonzero
    ``detrend_log_power`` p divides the series by t^p first; exponential
    fits of oscillatory unstable modes need p = -1.5, otherwise the
    t^{-3/2} envelope factor biases the measured rate downward by
    roughly 1.5/t_mid.
    """
    if kind not in ("algebraic", "exponential"):
        raise ValueError("kind must be 'algebraic' or 'exponential'")
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("times and values must be 1-d arrays of equal length")
    if window is None:
        window = ALGEBRAIC_WINDOW if kind == "algebraic" else EXPONENTIAL_WINDOW
    lo, hi = float(window[0]), float(window[1])
    mask = (t >= lo) & (t <= hi)
    if int(mask.sum()) < 5:
        raise InsufficientPoints(f"window [{lo:g}, {hi:g}] contains {int(mask.sum())} samples")
    t = t[mask]
    y = y[mask]
    lo, hi = float(t[0]), float(t[-1])
    if envelope:
        a = np.abs(y)
        peaks = np.flatnonzero((a[1:-1] > a[:-2]) & (a[1:-1] > a[2:])) + 1
        if peaks.shape[0] < 5:
            raise InsufficientPoints(f"only {peaks.shape[0]} envelope maxima in the window")
        t = t[peaks]
        y = a[peaks]
    if np.any(y <= 0.0) or not np.all(np.isfinite(y)):
        raise NonPositiveSeries("series must be finite and positive where fitted")
    ly = np.log(y) - detrend_log_power * np.log(t)
    x = np.log(t) if kind == "algebraic" else t
    slope, intercept = np.polyfit(x, ly, 1)
    resid = ly - (slope * x + intercept)
    total = ly - ly.mean()
    ss_tot = float(total @ total)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(resid @ resid) / ss_tot
    return RateFit(
        kind=kind,
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        window=(lo, hi),
        n_points=int(t.shape[0]),
        envelope=envelope,
        detrend_log_power=float(detrend_log_power),
    )


# --------------------------------------------------------------------------
# Lyapunov certificate (symmetric positive semidefinite interactions)


@dataclass(frozen=True)
class LyapunovSeries:
    """V(t) = (t^2/2) q^T G q + (1/2) ||t v + 2 q||^2 along a trajectory.

    For symmetric G the analytic derivative is -t q^T G q <= 0 whenever
    G is positive semidefinite.  For non-symmetric G the certificate does
    not apply; ``applicable`` is False and ``skew_residual`` carries the
    obstruction t^2 v^T (G - G^T) q that would pollute the derivative.
    ``vdot_numeric`` is a five-point finite difference of V (edges at
    reduced order, see the interior slice [2:-2]).
    """

    times: np.ndarray
    V: np.ndarray
    vdot_analytic: np.ndarray
    vdot_numeric: np.ndarray
    applicable: bool
    skew_residual: np.ndarray


def lyapunov_series(record: TrajectoryRecord, matrix) -> LyapunovSeries:
    g = np.asarray(matrix, dtype=float)
    if record.q.ndim != 2 or record.q.shape[1] != g.shape[0]:
        raise ValueError("trajectory and matrix dimensions do not match")
    t = record.times
    q, v = record.q, record.v
    qgq = np.einsum("ij,ij->i", q @ g.T, q)
    shifted = t[:, None] * v + 2.0 * q
    vv = 0.5 * t**2 * qgq + 0.5 * np.einsum("ij,ij->i", shifted, shifted)
    vdot = -t * qgq
    skew = np.einsum("ij,ij->i", v @ (g - g.T), q) * t**2
    scale = max(1.0, float(np.abs(g).max()))
    applicable = float(np.abs(g - g.T).max()) <= 1e-12 * scale
    return LyapunovSeries(
        times=t,
        V=vv,
        vdot_analytic=vdot,
        vdot_numeric=_fd_derivative(t, vv),
        applicable=applicable,
        skew_residual=skew,
    )


# --------------------------------------------------------------------------
# Chetaev certificates


@dataclass(frozen=True)
class ChetaevNegative:
    """Instability certificate series for a negative eigenvalue -mu^2.

    xi = v^T q and zeta = v^T v for a unit left eigenvector v of the
    eigenvalue; W = xi zeta + (mu/3) xi^2 - xi^2 / (2 t) grows at least
    like exp(mu t / 6) while the trajectory stays in the cone
    Omega = {xi > 0, zeta > mu xi / 3}, provided t0 >= 6/mu + 1.
    ``growth_ratio`` is the centered-difference logarithmic derivative
    of W (NaN where W <= 0).
    """

    times: np.ndarray
    xi: np.ndarray
    zeta: np.ndarray
    W: np.ndarray
    in_omega: np.ndarray
    growth_ratio: np.ndarray
    mu: float
    t0_required: float
    meets_entry_condition: bool


def _project_real(record: TrajectoryRecord, vec) -> tuple[np.ndarray, np.ndarray]:
    v = np.asarray(vec)
    if np.iscomplexobj(v):
        if float(np.abs(v.imag).max()) > 1e-9 * float(np.abs(v).max()):
            raise ValueError("expected a real (realifiable) eigenvector")
        v = v.real
    if record.q.ndim != 2 or v.shape != (record.q.shape[1],):
        raise ValueError("eigenvector length must match the state dimension")
    return record.q @ v, record.v @ v


def chetaev_negative(record: TrajectoryRecord, eigvec, mu: float) -> ChetaevNegative:
    if not (mu > 0.0 and math.isfinite(mu)):
        raise ValueError("mu must be positive")
    xi, zeta = _project_real(record, eigvec)
    t = record.times
    w = xi * zeta + (mu / 3.0) * xi**2 - xi**2 / (2.0 * t)
    in_omega = (xi > 0.0) & (zeta > mu * xi / 3.0)
    ratio = np.full_like(w, np.nan)
    ok = w > 0.0
    lw = np.where(ok, np.log(np.where(ok, w, 1.0)), np.nan)
    h = t[1] - t[0]
    # centered 3-point log-derivative; ends one-sided
    ratio[1:-1] = (lw[2:] - lw[:-2]) / (2.0 * h)
    ratio[0] = (lw[1] - lw[0]) / h
    ratio[-1] = (lw[-1] - lw[-2]) / h
    t0_req = 6.0 / mu + 1.0
    return ChetaevNegative(
        times=t,
        xi=xi,
        zeta=zeta,
        W=w,
        in_omega=in_omega,
        growth_ratio=ratio,
        mu=float(mu),
        t0_required=t0_req,
        meets_entry_condition=bool(t[0] >= t0_req - 1e-12),
    )


@dataclass(frozen=True)
class ChetaevComplex:
    """Rotating-plane projection for a strictly complex eigenvalue.

    xi and eta are the projections onto the real and imaginary parts of
    the left eigenvector w = u + i v; rho = |w^* q| = hypot(xi, eta)
    grows like exp(beta t) t^{-3/2} with beta = Im sqrt(lam), and ``fit``
    measures beta on the default exponential window with the envelope
    power detrended.
    """

    times: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    rho: np.ndarray
    fit: RateFit


def chetaev_complex(record: TrajectoryRecord, left_vector, window: tuple[float, float] | None = None) -> ChetaevComplex:
    w = np.asarray(left_vector, dtype=complex)
    if record.q.ndim != 2 or w.shape != (record.q.shape[1],):
        raise ValueError("left eigenvector length must match the state dimension")
    t = record.times
    xi = record.q @ w.real
    eta = record.q @ w.imag
    rho = np.hypot(xi, eta)
    if window is None:
        lo = max(EXPONENTIAL_WINDOW[0], float(t[0]))
        hi = min(EXPONENTIAL_WINDOW[1], float(t[-1]))
        window = (lo, hi)
    fit = fit_rate(
        t,
        rho,
        kind="exponential",
        window=window,
        detrend_log_power=OSCILLATORY_ENVELOPE_POWER,
    )
    return ChetaevComplex(times=t, xi=xi, eta=eta, rho=rho, fit=fit)


# --------------------------------------------------------------------------
# conserved-flux identity for complex modes


def energy_identity_residual(times, y, ydot, lam: complex, window: tuple[float, float] | None = None) -> float:
    """RMS residual of d/dt (t^3 Q) = 2i Im(lam) t^3 |y|^2, Q = y y*' - y' y*.

    Real eigenvalues make both sides vanish identically and carry no
    information, so they raise :class:`~nagdyn.errors.NotApplicable`.
    The derivative is a five-point centered difference; only interior
    samples enter the residual.  Each sample is normalized by
    max(1, |rhs|) before the RMS.
    """
    lam = complex(lam)
    if lam.imag == 0.0:
        raise NotApplicable("the flux identity is trivial for real eigenvalues")
    t = np.asarray(times, dtype=float)
    y = np.asarray(y, dtype=complex)
    yd = np.asarray(ydot, dtype=complex)
    if not (t.shape == y.shape == yd.shape):
        raise ValueError("times, y and ydot must have equal shapes")
    quad = y * np.conj(yd) - yd * np.conj(y)
    flux = t**3 * quad
    lhs = _fd_derivative(t, flux)
    rhs = 2.0j * lam.imag * t**3 * np.abs(y) ** 2
    sl = slice(2, -2)
    mask = np.ones(t.shape[0] - 4, dtype=bool)
    if window is not None:
        tw = t[sl]
        mask = (tw >= window[0]) & (tw <= window[1])
        if int(mask.sum()) < 1:
            raise InsufficientPoints("window excludes all interior samples")
    num = np.abs(lhs[sl][mask] - rhs[sl][mask])
    den = np.maximum(1.0, np.abs(rhs[sl][mask]))
    rel = num / den
    return float(np.sqrt(np.mean(rel**2)))


# --------------------------------------------------------------------------
# null-space distance


@dataclass(frozen=True)
class NullspaceDistance:
    """Distance from q(t) to ker G, with the orthonormal basis used."""

    times: np.ndarray
    distance: np.ndarray
    nullspace_dim: int
    basis: np.ndarray


def distance_to_nullspace(record: TrajectoryRecord, matrix) -> NullspaceDistance:
    """Pointwise distance ||q - Pi_ker q||; raises TrivialNullspace if ker G = 0.

    The null space is read off the SVD with threshold 1e-10 * sigma_max.
    """
    g = np.asarray(matrix, dtype=float)
    if record.q.ndim != 2 or record.q.shape[1] != g.shape[0]:
        raise ValueError("trajectory and matrix dimensions do not match")
    _, sv, vt = np.linalg.svd(g)
    thresh = 1e-10 * (float(sv[0]) if sv[0] > 0.0 else 1.0)
    dim = int(np.sum(sv <= thresh))
    if dim == 0:
        raise TrivialNullspace("matrix has full rank; there is no null space to track")
    basis = vt[g.shape[0] - dim :].T  # orthonormal columns spanning ker G
    coords = record.q @ basis
    proj = coords @ basis.T
    dist = np.linalg.norm(record.q - proj, axis=1)
    return NullspaceDistance(times=record.times, distance=dist, nullspace_dim=dim, basis=basis)
