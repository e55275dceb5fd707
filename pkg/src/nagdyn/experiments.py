"""Experiment configurations, deterministic writers, and canned studies.

A configuration names a linear system (directly or through a quadratic
game), initial data, integrator grid, and the diagnostics to attach.
The JSON grammar is documented in the README; parsing errors always name
the offending key.  Output writers are deterministic: floats are
rendered with 17 significant digits, files are written atomically, and
re-running a configuration reproduces byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analysis, dynamics, game, special, spectral
from .errors import (
    ConfigError,
    GridTooLarge,
    InsufficientPoints,
    NonPositiveSeries,
    NotApplicable,
    TrivialNullspace,
)

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "config_to_dict",
    "write_csv",
    "write_json",
    "run_experiment",
    "FIGURES",
    "reproduce_figure",
    "parse_grid",
    "run_sweep",
    "CheckResult",
    "run_invariant_checks",
    "GRID_POINT_CAP",
]

#: Safety cap on the number of sweep grid points.
GRID_POINT_CAP = 1_000_000

_KNOWN_DIAGNOSTICS = ("modal", "lyapunov", "chetaev", "nullspace", "energy", "rates")


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    label: str
    system: game.PseudoGradientSystem
    q0: np.ndarray
    v0: np.ndarray
    integrator: dynamics.IntegratorConfig
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        q = np.asarray(self.q0, dtype=float)
        v = np.asarray(self.v0, dtype=float)
        n = self.system.n
        if q.shape != (n,) or v.shape != (n,):
            raise ConfigError(f"initial: q0 and v0 must have length {n}")
        q.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "q0", q)
        object.__setattr__(self, "v0", v)


def _cfg_vector(raw, key: str, n: int | None = None) -> np.ndarray:
    try:
        vec = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: expected a numeric vector") from exc
    if vec.ndim != 1 or (n is not None and vec.shape[0] != n):
        raise ConfigError(f"{key}: expected a vector" + (f" of length {n}" if n else ""))
    if not np.all(np.isfinite(vec)):
        raise ConfigError(f"{key}: entries must be finite")
    return vec


def _cfg_matrix(raw, key: str) -> np.ndarray:
    try:
        mat = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: expected a numeric matrix") from exc
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ConfigError(f"{key}: expected a square matrix")
    if not np.all(np.isfinite(mat)):
        raise ConfigError(f"{key}: entries must be finite")
    return mat


def parse_config(raw: dict, label: str = "experiment") -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from a JSON-shaped dictionary."""
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected an object")
    unknown = set(raw) - {"label", "source", "initial", "integrator", "diagnostics", "output"}
    if unknown:
        raise ConfigError(f"top level: unknown keys {sorted(unknown)}")
    label = str(raw.get("label", label))

    source = raw.get("source")
    if not isinstance(source, dict):
        raise ConfigError("source: required object with 'matrix' or 'game'")
    if ("matrix" in source) == ("game" in source):
        raise ConfigError("source: provide exactly one of 'matrix' or 'game'")
    if "matrix" in source:
        g = _cfg_matrix(source["matrix"], "source.matrix")
        n = g.shape[0]
        b = (
            _cfg_vector(source["offset"], "source.offset", n)
            if "offset" in source
            else np.zeros(n)
        )
        try:
            system = game.PseudoGradientSystem(matrix=g, offset=b)
        except ValueError as exc:
            raise ConfigError(f"source: {exc}") from exc
    else:
        spec_g = source["game"]
        if not isinstance(spec_g, dict) or "payoffs" not in spec_g:
            raise ConfigError("source.game: expected an object with 'payoffs'")
        payoffs = spec_g["payoffs"]
        if not isinstance(payoffs, list) or not payoffs:
            raise ConfigError("source.game.payoffs: expected a nonempty list of matrices")
        n = len(payoffs)
        qs = [_cfg_matrix(p, f"source.game.payoffs[{i}]") for i, p in enumerate(payoffs)]
        offs = spec_g.get("offsets")
        if offs is None:
            ds = [np.zeros(n) for _ in range(n)]
        else:
            if not isinstance(offs, list) or len(offs) != n:
                raise ConfigError("source.game.offsets: expected one vector per player")
            ds = [_cfg_vector(d, f"source.game.offsets[{i}]", n) for i, d in enumerate(offs)]
        try:
            system = game.pseudo_gradient(game.QuadraticGame(payoffs=tuple(qs), offsets=tuple(ds)))
        except ValueError as exc:
            raise ConfigError(f"source.game: {exc}") from exc
    n = system.n

    initial = raw.get("initial")
    if not isinstance(initial, dict) or "q0" not in initial:
        raise ConfigError("initial: required object with 'q0'")
    q0 = _cfg_vector(initial["q0"], "initial.q0", n)
    v0 = _cfg_vector(initial["v0"], "initial.v0", n) if "v0" in initial else np.zeros(n)

    integ_raw = raw.get("integrator", {})
    if not isinstance(integ_raw, dict):
        raise ConfigError("integrator: expected an object")
    allowed = {"t0", "t_end", "dt", "damping_exponent", "record_stride"}
    unknown = set(integ_raw) - allowed
    if unknown:
        raise ConfigError(f"integrator: unknown keys {sorted(unknown)}")
    kwargs = {}
    for key_name in allowed:
        if key_name in integ_raw:
            value = integ_raw[key_name]
            if key_name == "record_stride":
                if not isinstance(value, int):
                    raise ConfigError("integrator.record_stride: expected an integer")
                kwargs[key_name] = value
            else:
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise ConfigError(f"integrator.{key_name}: expected a number")
                kwargs[key_name] = float(value)
    try:
        integ = dynamics.IntegratorConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"integrator: {exc}") from exc

    diags_raw = raw.get("diagnostics", [])
    if not isinstance(diags_raw, list):
        raise ConfigError("diagnostics: expected a list of names")
    for d in diags_raw:
        if d not in _KNOWN_DIAGNOSTICS:
            raise ConfigError(f"diagnostics: unknown entry {d!r}; choose from {_KNOWN_DIAGNOSTICS}")

    return ExperimentConfig(
        label=label,
        system=system,
        q0=q0,
        v0=v0,
        integrator=integ,
        diagnostics=tuple(diags_raw),
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    base = os.path.splitext(os.path.basename(path))[0]
    return parse_config(raw, label=base)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    integ = cfg.integrator
    return {
        "label": cfg.label,
        "source": {
            "matrix": cfg.system.matrix.tolist(),
            "offset": cfg.system.offset.tolist(),
        },
        "initial": {"q0": cfg.q0.tolist(), "v0": cfg.v0.tolist()},
        "integrator": {
            "t0": integ.t0,
            "t_end": integ.t_end,
            "dt": integ.dt,
            "damping_exponent": integ.damping_exponent,
            "record_stride": integ.record_stride,
        },
        "diagnostics": list(cfg.diagnostics),
    }


# --------------------------------------------------------------------------
# deterministic writers


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: list[str], columns: list[np.ndarray]) -> None:
    if len(header) != len(columns):
        raise ValueError("header and column counts differ")
    rows = columns[0].shape[0]
    lines = [",".join(header)]
    for i in range(rows):
        lines.append(",".join(_fmt(col[i]) for col in columns))
    _atomic_write(path, "\n".join(lines) + "\n")


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _json_ready(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):  # before int: bool subclasses int
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_json(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(_json_ready(payload), indent=2, sort_keys=True) + "\n")


def _fingerprint(system: game.PseudoGradientSystem) -> str:
    blob = ";".join(_fmt(x) for x in system.matrix.ravel()) + "|" + ";".join(
        _fmt(x) for x in system.offset
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# --------------------------------------------------------------------------
# running one configuration


def _verdict_report(spectrum: spectral.Spectrum, verdict: spectral.StabilityVerdict) -> dict:
    return {
        "eigenvalues": [{"re": l.real, "im": l.imag} for l in spectrum.eigenvalues],
        "classes": [c.tag.value for c in verdict.per_eigenvalue],
        "rates": [c.rate for c in verdict.per_eigenvalue],
        "nagd_verdict": verdict.nagd.value,
        "first_order_verdict": verdict.first_order.value,
        "dominant_growth_rate": verdict.dominant_growth_rate,
        # Decay rate of dx/dt = -Gx: min Re(lam); negative means growth.
        "first_order_rate": float(min(l.real for l in spectrum.eigenvalues)),
        "bound_constant": verdict.bound_constant,
        "kappa_P": verdict.kappa_P,
        "is_symmetric": spectrum.is_symmetric,
        "is_diagonalizable": spectrum.is_diagonalizable,
    }


def run_experiment(cfg: ExperimentConfig) -> tuple[dynamics.TrajectoryRecord, dict, list[str], list[np.ndarray]]:
    """Simulate one configuration and assemble its CSV columns and summary.

    Returns (record, summary, header, columns).  Diagnostic columns follow
    the fixed order V, Vdot, W, rho, dist_null; diagnostics that do not
    apply to the system are skipped with a note in the summary.
    """
    system = cfg.system
    spectrum = spectral.eigendecompose(system.matrix)
    verdict = spectral.classify_matrix(spectrum, t0=cfg.integrator.t0)
    record = dynamics.simulate_nagd(system.matrix, system.offset, cfg.q0, cfg.v0, cfg.integrator)

    header = ["t"]
    n = system.n
    cols: list[np.ndarray] = [record.times]
    for i in range(n):
        header.append(f"q_{i + 1}")
        cols.append(record.q[:, i])
    for i in range(n):
        header.append(f"v_{i + 1}")
        cols.append(record.v[:, i])
    header.append("norm_q")
    cols.append(np.linalg.norm(record.q, axis=1))

    notes: list[str] = []
    summary: dict = {
        "label": cfg.label,
        "spectrum": _verdict_report(spectrum, verdict),
        "saturated": record.saturated,
        "rows": int(record.n_samples),
        "system_fingerprint": _fingerprint(system),
        "config": config_to_dict(cfg),
        "notes": notes,
    }

    if "modal" in cfg.diagnostics:
        modes = []
        for i, cls in enumerate(verdict.per_eigenvalue):
            w = spectrum.left_vectors[i]
            y0 = complex(np.conj(w) @ cfg.q0)
            ydot0 = complex(np.conj(w) @ cfg.v0)
            modes.append(
                {
                    "eigenvalue": {"re": cls.value.real, "im": cls.value.imag},
                    "class": cls.tag.value,
                    "rate": cls.rate,
                    "y0": {"re": y0.real, "im": y0.imag},
                    "ydot0": {"re": ydot0.real, "im": ydot0.imag},
                }
            )
        summary["modal"] = modes
    if "lyapunov" in cfg.diagnostics:
        lyap = analysis.lyapunov_series(record, system.matrix)
        if lyap.applicable:
            header += ["V", "Vdot"]
            cols += [lyap.V, lyap.vdot_analytic]
        else:
            notes.append("lyapunov: matrix is not symmetric; certificate not applicable")
    if "chetaev" in cfg.diagnostics:
        neg = [
            (c, i)
            for i, c in enumerate(verdict.per_eigenvalue)
            if c.tag is spectral.EigenvalueClass.NEGATIVE_REAL
        ]
        cplx = [
            (c, i)
            for i, c in enumerate(verdict.per_eigenvalue)
            if c.tag is spectral.EigenvalueClass.STRICTLY_COMPLEX
        ]
        if neg:
            cls, idx = max(neg, key=lambda ci: ci[0].rate)
            che = analysis.chetaev_negative(record, spectrum.left_vectors[idx], cls.rate)
            header.append("W")
            cols.append(che.W)
            summary["chetaev_negative"] = {
                "mu": cls.rate,
                "t0_required": che.t0_required,
                "meets_entry_condition": che.meets_entry_condition,
                "fraction_in_omega": float(np.mean(che.in_omega)),
            }
        if cplx:
            cls, idx = max(cplx, key=lambda ci: ci[0].rate)
            try:
                che_c = analysis.chetaev_complex(record, spectrum.left_vectors[idx])
                header.append("rho")
                cols.append(che_c.rho)
                summary["chetaev_complex"] = {
                    "beta_predicted": cls.rate,
                    "beta_measured": che_c.fit.slope,
                    "r_squared": che_c.fit.r_squared,
                }
            except (InsufficientPoints, NonPositiveSeries) as exc:
                notes.append(f"chetaev: complex projection not fitted ({exc})")
        if not neg and not cplx:
            notes.append("chetaev: spectrum has no unstable eigenvalue")
    if "nullspace" in cfg.diagnostics:
        try:
            dist = analysis.distance_to_nullspace(record, system.matrix)
            header.append("dist_null")
            cols.append(dist.distance)
            summary["nullspace_dim"] = dist.nullspace_dim
        except TrivialNullspace:
            notes.append("nullspace: matrix has full rank")
    if "energy" in cfg.diagnostics:
        cplx_pairs = [
            (c, i)
            for i, c in enumerate(verdict.per_eigenvalue)
            if c.tag is spectral.EigenvalueClass.STRICTLY_COMPLEX
        ]
        if cplx_pairs:
            cls, idx = max(cplx_pairs, key=lambda ci: ci[0].rate)
            y, ydot = analysis.modal_project(record, spectrum.left_vectors[idx])
            summary["energy_identity_residual"] = analysis.energy_identity_residual(
                record.times, y, ydot, cls.value
            )
        else:
            notes.append("energy: spectrum has no strictly complex eigenvalue")
    if "rates" in cfg.diagnostics:
        norm_q = np.linalg.norm(record.q, axis=1)
        try:
            if verdict.dominant_growth_rate > 0.0:
                fit = analysis.fit_rate(
                    record.times,
                    norm_q,
                    kind="exponential",
                    window=(max(20.0, record.times[0]), min(60.0, record.times[-1])),
                    detrend_log_power=analysis.OSCILLATORY_ENVELOPE_POWER,
                )
            else:
                fit = analysis.fit_rate(
                    record.times,
                    norm_q,
                    kind="algebraic",
                    window=(max(30.0, record.times[0]), min(100.0, record.times[-1])),
                    envelope=True,
                )
            summary["rate_fit"] = {
                "kind": fit.kind,
                "slope": fit.slope,
                "r_squared": fit.r_squared,
                "window": list(fit.window),
                "predicted": verdict.dominant_growth_rate
                if verdict.dominant_growth_rate > 0.0
                else spectral.ALGEBRAIC_DECAY_EXPONENT,
            }
        except (InsufficientPoints, NonPositiveSeries) as exc:
            notes.append(f"rates: fit unavailable ({exc})")

    return record, summary, header, cols


# --------------------------------------------------------------------------
# canned studies


def _experiment(label, matrix, q0, v0, t_end, diagnostics, offset=None, stride=1):
    n = len(q0)
    return ExperimentConfig(
        label=label,
        system=game.PseudoGradientSystem(
            matrix=np.asarray(matrix, dtype=float),
            offset=np.zeros(n) if offset is None else np.asarray(offset, dtype=float),
        ),
        q0=np.asarray(q0, dtype=float),
        v0=np.asarray(v0, dtype=float),
        integrator=dynamics.IntegratorConfig(t0=1.0, t_end=t_end, dt=0.01, record_stride=stride),
        diagnostics=tuple(diagnostics),
    )


#: Canned experiment sets, keyed by CLI name.  Each entry is a list of
#: configurations plus the acceptance-style checks evaluated on them.
FIGURES = {
    "fig1": {
        "title": "two-player potential game: algebraic decay to equilibrium",
        "configs": [
            _experiment(
                "fig1_stable_potential",
                [[0.4, 0.2], [0.2, 0.8]],
                [0.5, 0.3],
                [0.0, 0.0],
                100.0,
                ("lyapunov", "rates"),
            )
        ],
    },
    "fig2": {
        "title": "rotationally coupled game: second-order instability, first-order stability",
        "configs": [
            _experiment(
                "fig2_rotational",
                [[6.0, 1.5], [-1.5, 6.0]],
                [1.0, 0.0],
                [0.0, 0.0],
                60.0,
                ("chetaev", "energy", "rates"),
            )
        ],
    },
    "fig3": {
        "title": "indefinite diagonal game: saddle escape along the negative mode",
        "configs": [
            _experiment(
                "fig3_indefinite",
                [[1.0, 0.0], [0.0, -0.5]],
                [1.0, 1.0],
                [0.0, 0.0],
                60.0,
                ("chetaev", "rates"),
            )
        ],
    },
    "fig4": {
        "title": "singular coupling: convergence to a null-space point",
        "configs": [
            _experiment(
                "fig4_nullspace",
                [[0.25, 0.25], [0.25, 0.25]],
                [0.5, -0.3],
                [0.1, 0.1],
                100.0,
                ("nullspace", "rates"),
            )
        ],
    },
    "fig5": {
        "title": "three- and four-player games: per-mode envelope decay",
        "configs": [
            _experiment(
                "fig5_three_player",
                [[1.0, 0.3, 0.2], [0.3, 0.8, 0.25], [0.2, 0.25, 0.6]],
                [0.5, 0.3, -0.4],
                [0.0, 0.0, 0.0],
                100.0,
                ("lyapunov", "rates"),
            ),
            _experiment(
                "fig5_four_player",
                [
                    [1.2, 0.2, 0.15, 0.1],
                    [0.2, 0.9, 0.2, 0.15],
                    [0.15, 0.2, 0.7, 0.1],
                    [0.1, 0.15, 0.1, 0.5],
                ],
                [0.5, 0.3, -0.4, 0.2],
                [0.0, 0.0, 0.0, 0.0],
                100.0,
                ("lyapunov", "rates"),
            ),
        ],
    },
}


def _within(value: float, lo: float, hi: float) -> bool:
    return bool(lo <= value <= hi)


def _figure_checks(name: str, configs, results, out_dir: str) -> dict:
    """Evaluate each canned study against its published tolerances."""
    checks: dict = {}
    if name == "fig1":
        run = results[0][1]
        eigs = sorted(e["re"] for e in run["spectrum"]["eigenvalues"])
        checks["eigenvalues"] = eigs
        checks["eigenvalues_ok"] = all(
            abs(e - q) <= 0.005 for e, q in zip(eigs, (0.317, 0.883))
        )
        slope = run["rate_fit"]["slope"]
        checks["envelope_slope"] = slope
        checks["envelope_slope_ok"] = _within(slope, -1.7, -1.3)
    elif name == "fig2":
        cfg = configs[0]
        run = results[0][1]
        checks["nagd_rate"] = run["rate_fit"]["slope"]
        checks["nagd_rate_ok"] = abs(checks["nagd_rate"] - 0.3041) <= 0.1 * 0.3041
        fo_cfg = dynamics.IntegratorConfig(t0=1.0, t_end=6.0, dt=0.002)
        fo = dynamics.simulate_first_order(cfg.system.matrix, cfg.system.offset, cfg.q0, fo_cfg)
        norms = np.linalg.norm(fo.q, axis=1)
        write_csv(
            os.path.join(out_dir, f"{cfg.label}_first_order.csv"),
            ["t", "norm_x"],
            [fo.times, norms],
        )
        fo_fit = analysis.fit_rate(fo.times, norms, kind="exponential", window=(1.0, 6.0))
        checks["first_order_rate"] = fo_fit.slope
        idx = int(round((5.0 - fo_cfg.t0) / fo_cfg.dt))
        ratio = float(norms[idx] / norms[0])
        checks["first_order_norm_ratio_at_t5"] = ratio
        checks["first_order_ok"] = ratio <= math.exp(-24.0) * (1.0 + 1e-3)
    elif name == "fig3":
        rec = results[0][0]
        x1_fit = analysis.fit_rate(
            rec.times, rec.q[:, 0], kind="algebraic", window=(20.0, 60.0), envelope=True
        )
        x2_fit = analysis.fit_rate(
            rec.times,
            np.abs(rec.q[:, 1]),
            kind="exponential",
            window=(20.0, 60.0),
            detrend_log_power=analysis.OSCILLATORY_ENVELOPE_POWER,
        )
        checks["x1_envelope_slope"] = x1_fit.slope
        checks["x1_envelope_slope_ok"] = _within(x1_fit.slope, -1.7, -1.3)
        checks["x2_rate"] = x2_fit.slope
        checks["x2_rate_ok"] = abs(x2_fit.slope - 0.7071) <= 0.05 * 0.7071
    elif name == "fig4":
        rec = results[0][0]
        cfg = configs[0]
        dist = analysis.distance_to_nullspace(rec, cfg.system.matrix)
        d_fit = analysis.fit_rate(
            rec.times, dist.distance, kind="algebraic", window=(20.0, 100.0), envelope=True
        )
        checks["dist_null_slope"] = d_fit.slope
        checks["dist_null_slope_ok"] = _within(d_fit.slope, -1.7, -1.3)
        w = dist.basis[:, 0]
        limit = analysis.nullspace_limit(
            rec.times[0], float(cfg.q0 @ w), float(cfg.v0 @ w)
        )
        checks["final_position_error"] = abs(float(rec.q[-1] @ w) - limit)
        checks["final_position_ok"] = checks["final_position_error"] <= 1e-3
    elif name == "fig5":
        quoted = {
            "three_player": (0.43, 0.62, 1.35),
            "four_player": (0.44, 0.58, 0.87, 1.41),
        }
        slopes = []
        for (rec, run), (tag, ref) in zip(results, quoted.items()):
            eigs = sorted(e["re"] for e in run["spectrum"]["eigenvalues"])
            checks[f"{tag}_eigenvalues"] = eigs
            checks[f"{tag}_eigenvalues_ok"] = all(
                abs(e - q) <= 0.005 for e, q in zip(eigs, ref)
            )
            slopes.append(run["rate_fit"]["slope"])
        checks["norm_decay_slopes"] = slopes
        checks["norm_decay_slopes_ok"] = all(_within(s, -1.7, -1.3) for s in slopes)
    return checks


def reproduce_figure(name: str, out_dir: str, jobs: int = 1) -> dict:
    """Run one canned study, write its artifacts, and summarize."""
    if name not in FIGURES:
        raise ConfigError(f"unknown figure {name!r}; choose from {sorted(FIGURES)}")
    entry = FIGURES[name]
    configs: list[ExperimentConfig] = entry["configs"]

    def one(cfg: ExperimentConfig):
        record, summary, header, cols = run_experiment(cfg)
        write_csv(os.path.join(out_dir, f"{cfg.label}.csv"), header, cols)
        write_json(os.path.join(out_dir, f"{cfg.label}.json"), summary)
        return record, summary

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, configs))
    else:
        results = [one(cfg) for cfg in configs]

    checks = _figure_checks(name, configs, results, out_dir)
    summary = {
        "figure": name,
        "title": entry["title"],
        "runs": [s for _, s in results],
        "saturated": any(r.saturated for r, _ in results),
        "checks": checks,
        "pass": all(v for k, v in checks.items() if k.endswith("_ok")),
    }
    write_json(os.path.join(out_dir, f"{name}_summary.json"), summary)
    return summary


# --------------------------------------------------------------------------
# parameter sweeps over the eigenvalue plane


def parse_grid(spec: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse 'a0:a1:na,b0:b1:nb' into (real_values, imag_values)."""
    parts = spec.split(",")
    if len(parts) != 2:
        raise ConfigError("grid: expected 'a0:a1:na,b0:b1:nb'")
    axes = []
    for axis_name, part in zip(("real", "imag"), parts):
        bits = part.split(":")
        if len(bits) != 3:
            raise ConfigError(f"grid.{axis_name}: expected 'start:stop:count'")
        try:
            start, stop = float(bits[0]), float(bits[1])
            count = int(bits[2])
        except ValueError as exc:
            raise ConfigError(f"grid.{axis_name}: {exc}") from exc
        if count < 1:
            raise ConfigError(f"grid.{axis_name}: count must be >= 1")
        if not (math.isfinite(start) and math.isfinite(stop)):
            raise ConfigError(f"grid.{axis_name}: bounds must be finite")
        axes.append(np.linspace(start, stop, count))
    total = axes[0].shape[0] * axes[1].shape[0]
    if total > GRID_POINT_CAP:
        raise GridTooLarge(f"grid has {total} points; the cap is {GRID_POINT_CAP}")
    return axes[0], axes[1]


def _sweep_point(lam: complex, measure: bool, t_end: float) -> dict:
    cls = spectral.classify_eigenvalue(lam)
    if cls.rate > 0.0:
        predicted = cls.rate  # exponential growth rate
    elif cls.tag is spectral.EigenvalueClass.ZERO:
        predicted = 0.0  # finite limit, flat envelope
    else:
        predicted = spectral.ALGEBRAIC_DECAY_EXPONENT  # log-log slope
    row = {
        "re": lam.real,
        "im": lam.imag,
        "class": cls.tag.value,
        "predicted_rate": predicted,
        "measured_rate": math.nan,
    }
    if measure:
        cfg = dynamics.IntegratorConfig(t0=1.0, t_end=t_end, dt=0.01)
        rec = dynamics.simulate_modal(lam, 1.0, 0.0, cfg)
        try:
            if cls.tag is spectral.EigenvalueClass.POSITIVE_REAL:
                fit = analysis.fit_rate(
                    rec.times,
                    np.abs(rec.q),
                    kind="algebraic",
                    window=(max(20.0, rec.times[0]), rec.times[-1]),
                    envelope=True,
                )
            elif cls.tag is spectral.EigenvalueClass.ZERO:
                fit = analysis.fit_rate(
                    rec.times,
                    np.abs(rec.q),
                    kind="algebraic",
                    window=(max(20.0, rec.times[0]), rec.times[-1]),
                )
            else:
                # Both unstable branches grow like e^{rate t} t^{-3/2}
                # (I_1 and Hankel asymptotics share the algebraic factor),
                # so the fit detrends the t^{-3/2} envelope in either case.
                fit = analysis.fit_rate(
                    rec.times,
                    np.abs(rec.q),
                    kind="exponential",
                    window=(max(20.0, rec.times[0]), rec.times[-1]),
                    detrend_log_power=analysis.OSCILLATORY_ENVELOPE_POWER,
                )
            row["measured_rate"] = fit.slope
        except (InsufficientPoints, NonPositiveSeries):
            pass
    return row


def run_sweep(grid_spec: str, measure: bool = False, jobs: int = 1, t_end: float = 60.0) -> list[dict]:
    """Classify (and optionally measure) modal rates over a complex grid."""
    re_vals, im_vals = parse_grid(grid_spec)
    points = [complex(a, b) for a in re_vals for b in im_vals]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda lam: _sweep_point(lam, measure, t_end), points))
    else:
        rows = [_sweep_point(lam, measure, t_end) for lam in points]
    return rows


# --------------------------------------------------------------------------
# invariant self-checks


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""


def _check(name, measured, threshold, detail="", larger_is_fail=True):
    passed = measured <= threshold if larger_is_fail else measured >= threshold
    return CheckResult(name=name, passed=bool(passed), measured=float(measured), threshold=float(threshold), detail=detail)


def run_invariant_checks(dt: float = 0.01) -> list[CheckResult]:
    """Cross-cutting consistency checks; ``dt`` scales the integration grids.

    Deliberately coarse steps (e.g. dt = 0.5) break the discretization-
    dependent checks (modal agreement, RK4 order, flux identity) while the
    step-free identities keep passing, which is exactly the degradation
    the report is meant to expose.
    """
    checks: list[CheckResult] = []

    # Wronskian of the oscillatory pair: J1 Y1' - J1' Y1 = 2/(pi z).
    # Off the real axis the two products grow like e^{2|Im z|} while their
    # difference stays 2/(pi z), so the defect is measured against the
    # product magnitude (the identity's own conditioning), not the target.
    zs = [complex(z) for z in np.linspace(0.5, 40.0, 24)]
    zs += [r * complex(math.cos(a), math.sin(a)) for r in (1.0, 8.0, 19.0, 23.0) for a in (0.7, -1.2)]
    worst = 0.0
    for z in zs:
        j0, j1 = special.bessel_j0(z), special.bessel_j1(z)
        y0, y1 = special.bessel_y0(z), special.bessel_y1(z)
        j1p = j0 - j1 / z
        y1p = y0 - y1 / z
        target = 2.0 / (math.pi * z)
        scale = max(abs(target), abs(j1 * y1p) + abs(j1p * y1))
        worst = max(worst, abs(j1 * y1p - j1p * y1 - target) / scale)
    checks.append(_check("bessel_wronskian_jy", worst, 1e-10))

    # Wronskian of the modified pair: I1 K1' - I1' K1 = -1/x
    worst = 0.0
    for x in np.linspace(0.5, 25.0, 20):
        i0, i1 = special.bessel_i0(x), special.bessel_i1(x)
        k0, k1 = special.bessel_k0(x), special.bessel_k1(x)
        i1p = i0 - i1 / x
        k1p = -k0 - k1 / x
        worst = max(worst, abs(i1 * k1p - i1p * k1 + 1.0 / x) * x)
    checks.append(_check("bessel_wronskian_ik", worst, 1e-10))

    # connection formula J1(ix) = i I1(x)
    worst = 0.0
    for x in np.linspace(0.5, 20.0, 12):
        lhs = special.bessel_j1(complex(0.0, x))
        rhs = 1j * special.bessel_i1(x)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    checks.append(_check("bessel_connection_formula", worst, 1e-9))

    # series/asymptotic agreement across the handover band
    worst = 0.0
    for r in np.linspace(15.0, 25.0, 9):
        for a in (0.0, 0.9, -1.3):
            z = np.array([r * complex(math.cos(a), math.sin(a))])
            s = special._jy01_series(z)
            h = special._jy01_asymptotic(z)
            for u, v in zip(s, h):
                worst = max(worst, abs(u[0] - v[0]) / max(1.0, abs(u[0])))
    checks.append(_check("bessel_series_asymptotic_band", worst, 1e-8))

    # closed-form modal solution vs RK4
    cfgm = dynamics.IntegratorConfig(t0=1.0, t_end=30.0, dt=dt)
    worst = 0.0
    for lam in (0.317, 0.883, 1.0, -0.5, complex(6.0, 1.5)):
        sol = special.make_modal_solution(lam, 1.0, 1.0, 0.0)
        rec = dynamics.simulate_modal(lam, 1.0, 0.0, cfgm)
        series = special.eval_modal_series(sol, rec.times)
        scale = float(np.max(np.abs(series.y)))
        worst = max(worst, float(np.max(np.abs(series.y - rec.q))) / scale)
    checks.append(_check("modal_closed_form_agreement", worst, 1e-5, detail="sup-relative over [1, 30]"))

    # RK4 order: halving dt should shrink the error by about 16
    lam = 0.7
    sol = special.make_modal_solution(lam, 1.0, 1.0, 0.0)
    errs = []
    for d in (dt, dt / 2.0):
        cfg_o = dynamics.IntegratorConfig(t0=1.0, t_end=1.0 + 200.0 * dt, dt=d)
        rec = dynamics.simulate_modal(lam, 1.0, 0.0, cfg_o)
        ref = special.eval_modal_series(sol, rec.times)
        errs.append(float(np.max(np.abs(ref.y - rec.q))))
    factor = errs[0] / max(errs[1], 1e-300)
    ok = 12.0 <= factor <= 20.0
    checks.append(CheckResult("rk4_order_factor", ok, factor, 16.0, detail="error ratio for dt vs dt/2"))

    # free-particle damping law: v(t) = (t0/t)^r v0
    worst = 0.0
    for r in (2.0, 3.0, 4.0):
        cfg_r = dynamics.IntegratorConfig(t0=1.0, t_end=10.0, dt=dt, damping_exponent=r)
        rec = dynamics.simulate_nagd([[0.0]], [0.0], [0.0], [1.0], cfg_r)
        expect = (cfg_r.t0 / rec.times) ** r
        worst = max(worst, float(np.max(np.abs(rec.v[:, 0] - expect) / expect)))
    # the steep early transient of (t0/t)^4 puts the RK4 floor near 2e-8
    checks.append(_check("damping_power_law", worst, 1e-7))

    # Lyapunov monotonicity on a symmetric PSD sample
    cfg_l = dynamics.IntegratorConfig(t0=1.0, t_end=30.0, dt=dt)
    rec = dynamics.simulate_nagd([[0.4, 0.2], [0.2, 0.8]], [0.0, 0.0], [0.5, 0.3], [0.0, 0.0], cfg_l)
    lyap = analysis.lyapunov_series(rec, [[0.4, 0.2], [0.2, 0.8]])
    increase = float(np.max(np.diff(lyap.V) / np.maximum(lyap.V[:-1], 1e-300)))
    checks.append(_check("lyapunov_dissipation", increase, 1e-8, detail="max relative per-step increase"))

    # skew interaction: the certificate must report not-applicable, not fail
    rec = dynamics.simulate_nagd([[0.0, 1.0], [-1.0, 0.0]], [0.0, 0.0], [1.0, 0.0], [0.0, 0.0], cfg_l)
    lyap_skew = analysis.lyapunov_series(rec, [[0.0, 1.0], [-1.0, 0.0]])
    checks.append(
        CheckResult(
            "lyapunov_skew_not_applicable",
            passed=not lyap_skew.applicable,
            measured=float(np.max(np.abs(lyap_skew.skew_residual))),
            threshold=0.0,
            detail="skew residual magnitude; pass = certificate declares itself inapplicable",
        )
    )

    # flux identity for a purely imaginary eigenvalue
    rec = dynamics.simulate_modal(1j, 1.0, 0.0, dynamics.IntegratorConfig(t0=1.0, t_end=30.0, dt=dt))
    resid = analysis.energy_identity_residual(rec.times, rec.q, rec.v, 1j)
    checks.append(_check("flux_identity_residual", resid, 1e-5))

    # translation invariance of the inhomogeneous flow
    rng = np.random.RandomState(7)
    basis, _ = np.linalg.qr(rng.randn(3, 3))
    gmat = basis @ np.diag([0.4, 0.9, 1.7]) @ basis.T
    b = rng.randn(3) * 0.3
    x_star = np.linalg.solve(gmat, -b)
    cfg_t = dynamics.IntegratorConfig(t0=1.0, t_end=20.0, dt=dt)
    q0 = rng.randn(3)
    v0 = rng.randn(3) * 0.2
    rec_inhom = dynamics.simulate_nagd(gmat, b, q0, v0, cfg_t)
    rec_hom = dynamics.simulate_nagd(gmat, np.zeros(3), q0 - x_star, v0, cfg_t)
    worst = float(np.max(np.abs(rec_inhom.q - (rec_hom.q + x_star))))
    checks.append(_check("translation_invariance", worst, 1e-10))

    # zero-mode limit: y(t) -> y0 + (t0/2) ydot0
    rec = dynamics.simulate_nagd([[0.0]], [0.0], [0.2], [0.8], dynamics.IntegratorConfig(t0=1.0, t_end=60.0, dt=dt))
    lim = analysis.nullspace_limit(1.0, 0.2, 0.8)
    err = abs(float(rec.q[-1, 0]) - lim)
    checks.append(_check("nullspace_limit", err, 1e-3))

    # eigensolver reconstruction on seeded well-conditioned samples
    worst = 0.0
    for trial in range(6):
        n = 2 + trial % 4
        qmat, _ = np.linalg.qr(rng.randn(n, n))
        pmat = qmat @ np.diag(1.0 + rng.rand(n) * 2.0) @ np.linalg.qr(rng.randn(n, n))[0]
        gmat = pmat @ np.diag(rng.rand(n) * 3.0) @ np.linalg.inv(pmat)
        spec = spectral.eigendecompose(gmat)
        recon = spec.right_vectors @ np.diag(spec.eigenvalues) @ np.conj(spec.left_vectors)
        worst = max(worst, float(np.max(np.abs(recon - gmat))) / max(1.0, float(np.linalg.norm(gmat))))
    checks.append(_check("eigensolver_reconstruction", worst, 1e-8))

    return checks
