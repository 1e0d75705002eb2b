r"""Vanishing-capillarity rate study: sweep kappa, measure, fit slopes.

Two modes:

* ``fixed``: boundary slope ``rho_b`` held fixed; errors of the solution
  against the constant far-field state.  Expected orders 3/4 (weighted L2
  of values), 1/4 (weighted L2 of the derivative), 1/2 (sup).
* ``singular``: ``rho_b = rho_b^0 / sqrt(kappa)``; errors against the
  rescaled boundary-layer profile ``rho_bar((r-1)/sqrt(kappa))``, same
  orders, plus the layer-variable restatement
  ``||rho^kappa(1 + sqrt(kappa) y) - rho_bar||_{L2_y}`` of order 1/2,
  obtained exactly from the radial norm by the change of variables
  (a factor ``kappa^{-1/4}``).

Grids scale with ``alpha = O(kappa^{-1/2})`` so discretization error stays
below the measured gaps at the smallest kappa.  Ordinary least squares on
``(log kappa, log error)`` gives slope and standard error; the largest
kappa is excluded when its fit residual exceeds three standard errors
(pre-asymptotic transient).
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, SolverError
from .grid import EXPONENTIAL, build_grid
from .impermeable import solve_impermeable
from .kernel import ModelParams, enthalpy_h_prime
from .limit import LimitProfile, integrate_profile, rescale_to_r

__all__ = [
    "FIXED",
    "SINGULAR",
    "NORM_KEYS",
    "RateStudyConfig",
    "RateRow",
    "RateStudyResult",
    "fit_loglog",
    "run_rate_study",
    "emit_outputs",
]

FIXED = "fixed"
SINGULAR = "singular"
NORM_KEYS = ("l2_value", "l2_derivative", "sup")
L2Y_KEY = "l2_value_y"


@dataclass(frozen=True)
class RateStudyConfig:
    mode: str
    kappas: tuple
    base: ModelParams  # rho_b read as the fixed slope, or as rho_b^0 in singular mode
    norms: tuple = NORM_KEYS
    points_per_unit_alpha: float = 16.0
    growth: float = 1.05
    tol: float = 1e-10
    max_iter: int = 400

    def __post_init__(self) -> None:
        if self.mode not in (FIXED, SINGULAR):
            raise ConfigError("mode must be 'fixed' or 'singular'")
        if len(self.norms) == 0:
            raise ConfigError("no norms selected")
        for k in self.norms:
            if k not in NORM_KEYS:
                raise ConfigError(f"unknown norm key: {k}")
        ks = np.asarray(self.kappas, dtype=float)
        if ks.size < 4:
            raise ConfigError("need at least 4 kappa values for a slope fit")
        if np.any(ks <= 0.0):
            raise ConfigError("kappa values must be positive")
        if np.any(np.diff(ks) >= 0.0):
            raise ConfigError("kappa values must be strictly decreasing")


@dataclass
class RateRow:
    kappa: float
    errors: dict
    nodes: int
    iterations: int
    excluded: bool = False
    failed: str | None = None


@dataclass
class RateStudyResult:
    mode: str
    rows: list
    slopes: dict = field(default_factory=dict)
    profiles: list = field(default_factory=list)  # (kappa, nodes, rho) kept for emit
    limit: LimitProfile | None = None


def fit_loglog(x, y):
    """OLS slope of ``log y`` vs ``log x`` with its standard error."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    m = lx.size
    if m < 2:
        raise ConfigError("need at least two points for a slope fit")
    lxc = lx - lx.mean()
    slope = float(np.dot(lxc, ly) / np.dot(lxc, lxc))
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    dof = max(m - 2, 1)
    stderr = float(math.sqrt(np.dot(resid, resid) / dof / np.dot(lxc, lxc)))
    return slope, stderr, intercept


def _solve_one(cfg: RateStudyConfig, kappa: float, profile: LimitProfile | None):
    base = cfg.base
    rho_b = base.rho_b if cfg.mode == FIXED else base.rho_b / math.sqrt(kappa)
    params = replace(base, kappa=kappa, rho_b=rho_b, u_minus=0.0)
    alpha = math.sqrt(enthalpy_h_prime(params.gamma, params.rho_plus) / kappa)
    grid = build_grid(
        params.n,
        alpha,
        points_per_unit_alpha=cfg.points_per_unit_alpha,
        decay=EXPONENTIAL,
        growth=cfg.growth,
    )
    fieldv, report = solve_impermeable(params, grid, tol=cfg.tol, max_iter=cfg.max_iter)
    if cfg.mode == FIXED:
        diff = fieldv.phi
        diff_r = fieldv.phi_r
    else:
        y = (grid.nodes - 1.0) / math.sqrt(kappa)
        diff = (params.rho_plus + fieldv.phi) - rescale_to_r(profile, kappa, grid)
        diff_r = fieldv.phi_r - profile.slope(y) / math.sqrt(kappa)
    errors = {}
    if "l2_value" in cfg.norms:
        errors["l2_value"] = grid.weighted_l2_norm(diff)
    if "l2_derivative" in cfg.norms:
        errors["l2_derivative"] = grid.weighted_l2_norm(diff_r)
    if "sup" in cfg.norms:
        errors["sup"] = float(np.max(np.abs(diff)))
    if cfg.mode == SINGULAR and "l2_value" in cfg.norms:
        # exact change of variables r = 1 + sqrt(kappa) y
        errors[L2Y_KEY] = errors["l2_value"] * kappa ** (-0.25)
    row = RateRow(
        kappa=kappa, errors=errors, nodes=grid.size, iterations=report.iterations
    )
    return row, (kappa, grid.nodes.copy(), params.rho_plus + fieldv.phi)


def run_rate_study(cfg: RateStudyConfig) -> RateStudyResult:
    profile = None
    if cfg.mode == SINGULAR:
        profile = integrate_profile(cfg.base.gamma, cfg.base.rho_plus, cfg.base.rho_b)

    threads = os.environ.get("NSK_THREADS", "")
    workers = int(threads) if threads.strip() else (os.cpu_count() or 1)
    workers = max(1, min(workers, len(cfg.kappas)))

    rows: list = [None] * len(cfg.kappas)
    profiles: list = [None] * len(cfg.kappas)

    def task(idx_kappa):
        idx, kappa = idx_kappa
        try:
            row, prof = _solve_one(cfg, kappa, profile)
        except SolverError as exc:
            row = RateRow(kappa=kappa, errors={}, nodes=0, iterations=0, failed=str(exc))
            prof = None
        return idx, row, prof

    items = list(enumerate(cfg.kappas))
    if workers == 1:
        results = map(task, items)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, items))
    for idx, row, prof in results:
        rows[idx] = row
        profiles[idx] = prof

    result = RateStudyResult(mode=cfg.mode, rows=rows, limit=profile)
    result.profiles = [p for p in profiles if p is not None]

    norm_keys = list(cfg.norms)
    if cfg.mode == SINGULAR and "l2_value" in cfg.norms:
        norm_keys.append(L2Y_KEY)
    good = [row for row in rows if row.failed is None]
    for key in norm_keys:
        ks = np.array([row.kappa for row in good])
        es = np.array([row.errors[key] for row in good])
        slope, stderr, intercept = fit_loglog(ks, es)
        # drop a pre-asymptotic largest kappa when it sits off the fit line
        if ks.size >= 5 and stderr > 0.0:
            resid0 = abs(math.log(es[0]) - (intercept + slope * math.log(ks[0])))
            spread = math.sqrt(np.sum((np.log(ks) - np.log(ks).mean()) ** 2))
            if resid0 > 3.0 * stderr * spread:
                good[0].excluded = True
                slope, stderr, _ = fit_loglog(ks[1:], es[1:])
        result.slopes[key] = (slope, stderr)
    return result


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def emit_outputs(result: RateStudyResult, out_dir) -> list:
    """Write rates.csv, profiles.csv, summary.json, and plot.gp; returns paths."""
    if not result.rows:
        raise ConfigError("empty rate-study result")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    norm_keys = sorted({k for row in result.rows if row.failed is None for k in row.errors})
    if not norm_keys:
        raise ConfigError("no norms selected")

    rates = out / "rates.csv"
    with rates.open("w", newline="") as fh:
        fh.write(",".join(["kappa"] + norm_keys + ["nodes", "iterations", "excluded"]) + "\n")
        for row in result.rows:
            if row.failed is not None:
                continue
            cells = [_fmt(row.kappa)]
            cells += [_fmt(row.errors[k]) for k in norm_keys]
            cells += [str(row.nodes), str(row.iterations), "1" if row.excluded else "0"]
            fh.write(",".join(cells) + "\n")

    profiles = out / "profiles.csv"
    with profiles.open("w", newline="") as fh:
        fh.write("series,kappa,x,value\n")
        for kappa, nodes, rho in result.profiles:
            for r, v in zip(nodes, rho):
                fh.write(f"rho_kappa,{_fmt(kappa)},{_fmt(r)},{_fmt(v)}\n")
            if result.mode == SINGULAR:
                ys = (nodes - 1.0) / math.sqrt(kappa)
                for y, v in zip(ys, rho):
                    fh.write(f"rho_kappa_y,{_fmt(kappa)},{_fmt(y)},{_fmt(v)}\n")
        if result.mode == SINGULAR and result.limit is not None:
            for y, v in zip(result.limit.y_nodes, result.limit.rho_bar):
                fh.write(f"rho_bar,0,{_fmt(y)},{_fmt(v)}\n")

    summary = out / "summary.json"
    payload = {
        "mode": result.mode,
        "slopes": {
            k: {"value": result.slopes[k][0], "stderr": result.slopes[k][1]}
            for k in sorted(result.slopes)
        },
        "rows": [
            {
                "kappa": row.kappa,
                "errors": row.errors,
                "nodes": row.nodes,
                "iterations": row.iterations,
                "excluded": row.excluded,
                "failed": row.failed,
            }
            for row in result.rows
        ],
    }
    summary.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    plot = out / "plot.gp"
    cols = ", ".join(
        f"'rates.csv' using 1:{i + 2} with linespoints title '{k}'"
        for i, k in enumerate(norm_keys)
    )
    plot.write_text(
        "# gnuplot script: log-log error plot and profile overlay\n"
        "set datafile separator ','\n"
        "set logscale xy\n"
        "set key top left\n"
        "set xlabel 'kappa'\n"
        "set ylabel 'error'\n"
        "set terminal pngcairo size 900,600\n"
        "set output 'rates.png'\n"
        f"plot {cols}\n"
        "unset logscale\n"
        "set output 'profiles.png'\n"
        "set xlabel 'r'\n"
        "set ylabel 'rho'\n"
        "plot '< grep \"^rho_kappa,\" profiles.csv' using 3:4 with dots title 'rho^kappa'\n"
    )
    return [rates, profiles, summary, plot]
