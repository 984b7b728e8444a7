"""
Photon-number moments of the coherently operated two-mode squeezed state.

Two independent routes:

* :func:`analytic_moments` evaluates the closed forms in ``s`` and ``r``
  (vectorized; this is the fast path used by the sweeps).
* :func:`numeric_moments` sums ``n_s^p n_i^q P(n_s, n_i)`` over a truncated
  Fock state (the oracle).

The closed form for ``<n_s^2 n_i^2>`` is the relation

    <n_s^2 n_i^2> = 3 sinh^4 s (4 cosh 2s + 5 cosh 4s + 3)
                    + <n_s^2 n_i> + <n_s n_i^2> - <n_s n_i>

which holds for every r; :func:`compare_moments` checks it against the oracle
like every other entry.
"""

from __future__ import annotations

import csv
from dataclasses import astuple, dataclass, fields
from typing import Iterable, TextIO

import numpy as np

from . import fock
from .errors import DegenerateState
from .fock import DEFAULT_CONFIG, FockState
from .sources import CoherentOpParams, apply_coherent_op, build_tmss

MOMENT_ORDERS = {
    "m10": (1, 0), "m01": (0, 1), "m20": (2, 0), "m02": (0, 2),
    "m11": (1, 1), "m21": (2, 1), "m12": (1, 2), "m22": (2, 2),
}


@dataclass(frozen=True)
class MomentSet:
    """<n_s^p n_i^q> for p, q in {0, 1, 2}. Entries may be floats or arrays."""

    m10: float
    m01: float
    m20: float
    m02: float
    m11: float
    m21: float
    m12: float
    m22: float

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    def check(self, rtol: float = 1e-9) -> None:
        """Assert the variance bounds m20 >= m10^2 and m02 >= m01^2."""
        vals = np.asarray(self.as_array())
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite moment")
        for second, first in ((self.m20, self.m10), (self.m02, self.m01)):
            if np.any(np.asarray(second) < np.asarray(first) ** 2 * (1 - rtol) - 1e-15):
                raise ValueError("second moment below squared mean")
        if np.any(np.asarray(self.m22) < 0):
            raise ValueError("negative fourth moment")


def analytic_moments(s, r) -> MomentSet:
    """Closed-form moments of (t a_s + r a_s^dag)|TMSS(s)> with t^2 = 1 - r^2.

    ``s`` and ``r`` broadcast against each other. The sign of t does not
    enter: the cross terms carry <a_s^2> = 0 on the TMSS.
    """
    s = np.asarray(s, dtype=float)
    r2 = np.asarray(r, dtype=float) ** 2
    sh2 = np.sinh(s) ** 2
    sh4 = sh2 * sh2
    c2, c4, c6 = np.cosh(2 * s), np.cosh(4 * s), np.cosh(6 * s)
    denom = r2 + sh2
    if np.any(denom == 0):
        raise DegenerateState("r^2 + sinh^2 s = 0: the operation annihilates the vacuum")

    m10 = ((6 * r2 - 4) * c2 - 2 * r2 + c4 + 3) / (4 * denom)
    m01 = sh2 * (r2 + c2) / denom
    m20 = sh2 * (4 * (5 * r2 - 3) * c2 - 4 * r2 + 3 * c4 + 9) / (4 * denom) + m10
    m02 = sh4 * (2 * r2 + 3 * c2 + 1) / denom + m01
    m11 = sh2 * (3 * c2 + 1) + 0 * r2
    m21 = sh2 * ((9 - 4 * r2) * c2 + 3 * (5 * r2 - 3) * c4 + 5 * r2 + 3 * c6 - 3) / (4 * denom) + m11
    m12 = sh4 * (9 * r2 * c2 + 5 * r2 + 3 * c4 + 1) / denom + m11
    m22 = 3 * sh4 * (4 * c2 + 5 * c4 + 3) + m21 + m12 - m11
    out = [m10, m01, m20, m02, m11, m21, m12, m22]
    if all(np.ndim(v) == 0 for v in out):
        out = [float(v) for v in out]
    return MomentSet(*out)


def numeric_moments(state: FockState) -> MomentSet:
    """Moments of a normalized two-mode state by direct summation."""
    pnd = fock.joint_pnd(state)
    return MomentSet(**{name: pnd.moment(p, q) for name, (p, q) in MOMENT_ORDERS.items()})


def operated_tmss(s: float, r: float, cutoff: int = DEFAULT_CONFIG.cutoff, negative_t: bool = False) -> FockState:
    state, _ = apply_coherent_op(build_tmss(s, cutoff), CoherentOpParams.from_r(r, negative_t))
    return state


@dataclass(frozen=True)
class MomentComparison:
    s: float
    r: float
    analytic: MomentSet
    numeric: MomentSet
    abs_dev: dict[str, float]
    rel_dev: dict[str, float]
    threshold: float = 1e-8

    @property
    def max_rel_dev(self) -> float:
        return max(self.rel_dev.values())

    @property
    def flagged(self) -> list[str]:
        return [k for k, v in self.rel_dev.items() if v > self.threshold]

    @property
    def ok(self) -> bool:
        return not self.flagged


def compare_moments(s: float, r: float, cutoff: int = DEFAULT_CONFIG.cutoff,
                    threshold: float = 1e-8) -> MomentComparison:
    """Entrywise deviation between the closed forms and the Fock oracle.

    Relative deviations of entries whose oracle value is exactly zero are
    reported as absolute deviations.
    """
    ana = analytic_moments(s, r).as_dict()
    num = numeric_moments(operated_tmss(s, r, cutoff)).as_dict()
    abs_dev = {k: abs(ana[k] - num[k]) for k in ana}
    rel_dev = {k: abs_dev[k] / abs(num[k]) if num[k] != 0 else abs_dev[k] for k in ana}
    return MomentComparison(s, r, MomentSet(**ana), MomentSet(**num), abs_dev, rel_dev, threshold)


CSV_COLUMNS = ["s", "r", *MOMENT_ORDERS, "source"]


def write_moments_csv(fh: TextIO, rows: Iterable[tuple[float, float, MomentSet, str]]) -> None:
    """Write ``(s, r, moments, source)`` rows; ``source`` is analytic or numeric."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s, r, m, source in rows:
        writer.writerow([format(s, ".17g"), format(r, ".17g"),
                         *(format(float(v), ".17g") for v in m.as_array()), source])
