"""
SNR sweeps over squeezing ``s`` and operation parameter ``r``, the per-s
optimal operation, and the location of the point where the optimum jumps from
the coherent branch (r ~ s) to pure subtraction/addition.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BadParams, NoTransition
from .moments import analytic_moments, numeric_moments, operated_tmss
from .snr import DEFAULT_VARIANT, SnrModelVariant, snr_curve_tmss, snr_from_moments, snr_values

BOUNDARY_TIE = 1e-9
PUBLISHED_S_CRIT = 0.09

# coarse r grid: uniform 1e-3 steps plus log-spaced points so the r ~ s peak is
# resolved for s well below 1e-2
_COARSE_R = np.unique(np.concatenate([np.linspace(0.0, 1.0, 1001), np.logspace(-6, 0, 241)]))


def default_s_values(s_min: float = 0.005, s_max: float = 0.75, n_log: int = 40, step: float = 0.01) -> np.ndarray:
    """Log-spaced below 0.1, linear above."""
    low = np.logspace(np.log10(s_min), -1, n_log, endpoint=False)
    high = np.round(np.arange(0.1, s_max + step / 2, step), 12)
    return np.concatenate([low, high])


def snr_at(s, r, variant: SnrModelVariant = DEFAULT_VARIANT) -> np.ndarray:
    """SNR of (t a_s + r a_s^dag)|TMSS(s)> from the closed-form moments."""
    return snr_values(analytic_moments(s, r), variant)


@dataclass(frozen=True)
class SweepGrid:
    s_values: np.ndarray
    r_values: np.ndarray
    snr: np.ndarray  # shape (len(s_values), len(r_values))

    def write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["s", "r", "snr"])
        for i, s in enumerate(self.s_values):
            for j, r in enumerate(self.r_values):
                writer.writerow([_g(s), _g(r), _g(self.snr[i, j])])


def snr_grid(s_values: Sequence[float], r_values: Sequence[float],
             variant: SnrModelVariant = DEFAULT_VARIANT) -> SweepGrid:
    s = np.asarray(s_values, dtype=float)
    r = np.asarray(r_values, dtype=float)
    if s.size == 0 or r.size == 0:
        raise BadParams("empty sweep range")
    if np.any(s < 0) or np.any((r < 0) | (r > 1)):
        raise BadParams("need s >= 0 and r in [0, 1]")
    values = snr_at(s[:, None], r[None, :], variant)
    return SweepGrid(s, r, values)


@dataclass(frozen=True)
class OptimumRecord:
    s: float
    r_star: float
    snr_star: float
    boundary_flag: str  # "interior", "r0" or "r1"
    snr_r0: float
    snr_r1: float
    # boundary values of r that are co-optimal within BOUNDARY_TIE
    co_optimal: tuple[float, ...] = ()


def _golden(f, bracket: tuple[float, float, float], tol: float) -> tuple[float, float]:
    res = minimize_scalar(lambda x: -f(x), bracket=bracket, method="golden", tol=tol)
    return float(res.x), float(-res.fun)


def optimize_r(s: float, variant: SnrModelVariant = DEFAULT_VARIANT, tol: float = 1e-10) -> OptimumRecord:
    """Best r in [0, 1] at squeezing ``s``.

    A coarse scan brackets the best interior point, golden-section search
    refines it, and the result is compared with both endpoints. Endpoint ties
    go to r = 0.
    """
    if s <= 0:
        raise BadParams("s must be positive")
    if tol < 1e-12:
        raise BadParams("tol below 1e-12 is not meaningful")
    f = lambda x: float(snr_at(s, x, variant))
    coarse = snr_at(s, _COARSE_R, variant)
    v0, v1 = float(coarse[0]), float(coarse[-1])
    i = int(np.argmax(coarse[1:-1])) + 1
    r_in, v_in = float(_COARSE_R[i]), float(coarse[i])
    if coarse[i] >= coarse[i - 1] and coarse[i] >= coarse[i + 1]:
        lo, hi = _COARSE_R[i - 1], _COARSE_R[i + 1]
        if coarse[i] > coarse[i - 1] and coarse[i] > coarse[i + 1]:
            r_in, v_in = _golden(f, (lo, r_in, hi), tol)
            r_in = min(max(r_in, lo), hi)
    best_edge, edge_val = (0.0, v0) if v0 >= v1 - BOUNDARY_TIE else (1.0, v1)
    co_opt = tuple(r for r, v in ((0.0, v0), (1.0, v1)) if abs(v - edge_val) <= BOUNDARY_TIE)
    if v_in > edge_val + 1e-12 and 0.0 < r_in < 1.0:
        return OptimumRecord(s, r_in, v_in, "interior", v0, v1)
    flag = "r0" if best_edge == 0.0 else "r1"
    return OptimumRecord(s, best_edge, edge_val, flag, v0, v1, co_opt)


@dataclass
class OptimumBranch:
    records: list[OptimumRecord]
    s_crit: float | None = None
    tol: float = 1e-10

    def write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["s", "r_star", "snr_star", "boundary_flag"])
        for rec in self.records:
            writer.writerow([_g(rec.s), _g(rec.r_star), _g(rec.snr_star), rec.boundary_flag])


def optimum_branch(s_values: Sequence[float], variant: SnrModelVariant = DEFAULT_VARIANT,
                   tol: float = 1e-10) -> OptimumBranch:
    records = [optimize_r(float(s), variant, tol) for s in s_values]
    branch = OptimumBranch(records, tol=tol)
    flags = [rec.boundary_flag == "interior" for rec in records]
    for k in range(len(flags) - 1):
        if flags[k] != flags[k + 1]:
            branch.s_crit = locate_bifurcation((records[k].s, records[k + 1].s), variant)
            break
    return branch


def _is_interior(s: float, variant: SnrModelVariant) -> bool:
    return optimize_r(s, variant).boundary_flag == "interior"


def locate_bifurcation(s_range: tuple[float, float] = (0.01, 0.5), variant: SnrModelVariant = DEFAULT_VARIANT,
                       tol_s: float = 1e-6) -> float:
    """Bisect on "the optimum is interior" to width ``tol_s``; return the midpoint."""
    lo, hi = map(float, s_range)
    p_lo, p_hi = _is_interior(lo, variant), _is_interior(hi, variant)
    if p_lo == p_hi:
        raise NoTransition(f"optimum is {'interior' if p_lo else 'on the boundary'} on all of [{lo}, {hi}]")
    while hi - lo > tol_s:
        mid = 0.5 * (lo + hi)
        if _is_interior(mid, variant) == p_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class Jump:
    below: OptimumRecord
    above: OptimumRecord

    @property
    def to_tie_broken(self) -> float:
        """|r_star| change using the reported (tie-broken) optimum."""
        return abs(self.above.r_star - self.below.r_star)

    @property
    def to_farthest_branch(self) -> float:
        """Largest |r| change over all co-optimal boundary branches."""
        targets = self.above.co_optimal or (self.above.r_star,)
        return max(abs(r - self.below.r_star) for r in targets)


def r_star_jump(s_crit: float, variant: SnrModelVariant = DEFAULT_VARIANT, delta: float = 1e-4) -> Jump:
    """Optimal r just below and just above ``s_crit``."""
    return Jump(optimize_r(s_crit - delta, variant), optimize_r(s_crit + delta, variant))


# --- figure tables ---------------------------------------------------------------


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: list[tuple]

    def write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_g(v) if isinstance(v, float) else v for v in row])

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows])


def _g(x) -> str:
    return format(float(x), ".17g")


def figure_data(fig: str, variant: SnrModelVariant = DEFAULT_VARIANT, s_values: Sequence[float] | None = None,
                r_values: Sequence[float] | None = None, tol: float = 1e-10) -> dict[str, Table]:
    """Tables behind the r-scans ("2a"), the (s, r) map with ridge ("2b") and the s-curves ("3")."""
    if fig == "2a":
        r = np.linspace(0.0, 1.0, 1001) if r_values is None else np.asarray(r_values, dtype=float)
        rows = []
        for s in (0.01, 0.35):
            scan = snr_at(s, r, variant)
            add = float(snr_at(s, 1.0, variant))
            rows += [(s, float(rv), float(v), "coherent") for rv, v in zip(r, scan)]
            rows += [(s, float(rv), add, "add") for rv in r]
        return {"fig2a": Table(("s", "r", "snr", "curve_tag"), rows)}
    if fig == "2b":
        s = np.linspace(0.01, 0.5, 50) if s_values is None else np.asarray(s_values, dtype=float)
        r = np.linspace(0.0, 1.0, 101) if r_values is None else np.asarray(r_values, dtype=float)
        grid = snr_grid(s, r, variant)
        rows = [(float(sv), float(rv), float(grid.snr[i, j])) for i, sv in enumerate(s) for j, rv in enumerate(r)]
        ridge = optimum_branch(s, variant, tol)
        ridge_rows = [(rec.s, rec.r_star, rec.snr_star, rec.boundary_flag) for rec in ridge.records]
        return {"fig2b": Table(("s", "r", "snr"), rows),
                "ridge": Table(("s", "r_star", "snr_star", "boundary_flag"), ridge_rows)}
    if fig == "3":
        # TMSS, subtraction and addition curves come from the Fock oracle; the
        # closed forms lose ~1e-9 to cancellation at small s
        s = default_s_values() if s_values is None else np.asarray(s_values, dtype=float)
        rows = []
        for sv in map(float, s):
            opt = optimize_r(sv, variant, tol)
            sub = snr_from_moments(numeric_moments(operated_tmss(sv, 0.0)), variant).value
            add = snr_from_moments(numeric_moments(operated_tmss(sv, 1.0)), variant).value
            # r = 0 and r = 1 are candidates too; use their more accurate values
            best = max(opt.snr_star, sub, add)
            rows.append((sv, snr_curve_tmss(sv, variant), sub, add, best, opt.r_star))
        return {"fig3": Table(("s", "snr_tmss", "snr_sub", "snr_add", "snr_opt", "r_star"), rows)}
    raise BadParams(f"unknown figure {fig!r}; expected 2a, 2b or 3")
