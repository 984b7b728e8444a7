"""
Signal-to-noise ratio of covariance-protocol ghost imaging.

The default estimator ("shared bucket difference") uses one bucket reading per
frame for both pixels. ``N_s`` is the bucket count. ``N_in`` is the idler
count of the pixel inside the object, drawn jointly with the bucket. ``N_out``
is an independent draw from the idler marginal. The per-frame statistic is

    D = (N_s - <N_s>) (N_in - N_out)

which gives E[D] = C and Var[D] = Q + Vs Vi - C^2, with

    C  = <n_s n_i> - <n_s><n_i>
    Vs = Var n_s,  Vi = Var n_i
    Q  = E[(n_s - <n_s>)^2 (n_i - <n_i>)^2]

The SNR over N frames is sqrt(N) |C| / sqrt(Q + Vs Vi - C^2). Only the eight
moments in :class:`~ghostfock.moments.MomentSet` enter.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, TextIO

import numpy as np

from .errors import BadParams, DegenerateStatistics
from .fock import DEFAULT_CONFIG
from .moments import MomentSet, numeric_moments
from .sources import bell_state, build_tmss

DEFAULT_TAG = "shared_bucket_difference"


@dataclass(frozen=True)
class SnrModelVariant:
    """Estimator model plus frame count.

    ``tag="custom"`` requires ``reducer``, a function mapping a MomentSet to
    the per-frame SNR.
    """

    tag: str = DEFAULT_TAG
    frames: int = 1
    reducer: Callable[[MomentSet], float] | None = None

    def __post_init__(self):
        if self.frames < 1:
            raise BadParams("frames must be >= 1")
        if self.tag not in (DEFAULT_TAG, "custom"):
            raise BadParams(f"unknown SNR model {self.tag!r}")
        if self.tag == "custom" and self.reducer is None:
            raise BadParams("custom SNR model needs a reducer")


DEFAULT_VARIANT = SnrModelVariant()


@dataclass(frozen=True)
class SnrEstimate:
    value: float
    model: SnrModelVariant = DEFAULT_VARIANT
    mc_stderr: float | None = None


class CentralStats(NamedTuple):
    C: float
    Vs: float
    Vi: float
    Q: float


def central_stats(m: MomentSet) -> CentralStats:
    """Covariance, variances and centered fourth cross moment from raw moments."""
    a, b = m.m10, m.m01
    C = m.m11 - a * b
    Vs = m.m20 - a * a
    Vi = m.m02 - b * b
    Q = (m.m22 - 2 * b * m.m21 - 2 * a * m.m12 + b * b * m.m20 + a * a * m.m02
         + 4 * a * b * m.m11 - 3 * a * a * b * b)
    return CentralStats(C, Vs, Vi, Q)


def _shared_bucket(m: MomentSet):
    C, Vs, Vi, Q = central_stats(m)
    var = Q + Vs * Vi - C * C
    scale = Q + Vs * Vi + C * C
    return np.abs(C), var, scale


def snr_values(m: MomentSet, variant: SnrModelVariant = DEFAULT_VARIANT) -> np.ndarray:
    """Vectorized SNR for moment arrays; degenerate points come back as NaN."""
    if variant.tag == "custom":
        return np.sqrt(variant.frames) * np.asarray(variant.reducer(m), dtype=float)
    signal, var, scale = _shared_bucket(m)
    var = np.asarray(var, dtype=float)
    ok = var > 1e-15 * np.asarray(scale)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(ok, signal / np.sqrt(np.where(ok, var, 1.0)), np.nan)
    return np.sqrt(variant.frames) * out


def snr_from_moments(m: MomentSet, variant: SnrModelVariant = DEFAULT_VARIANT) -> SnrEstimate:
    if variant.tag == "custom":
        return SnrEstimate(float(np.sqrt(variant.frames) * variant.reducer(m)), variant)
    signal, var, scale = _shared_bucket(m)
    if not var > 1e-15 * scale:
        raise DegenerateStatistics(f"estimator variance {var!r} is not positive")
    return SnrEstimate(float(np.sqrt(variant.frames) * signal / np.sqrt(var)), variant)


def snr_curve_tmss(s: float, variant: SnrModelVariant = DEFAULT_VARIANT,
                   cutoff: int = DEFAULT_CONFIG.cutoff) -> float:
    return snr_from_moments(numeric_moments(build_tmss(s, cutoff)), variant).value


def snr_bell(variant: SnrModelVariant = DEFAULT_VARIANT) -> float:
    return snr_from_moments(numeric_moments(bell_state(4)), variant).value


def write_snr_csv(fh: TextIO, rows: Iterable[tuple[float, float, SnrEstimate]]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["s", "r", "snr", "model_tag", "frames"])
    for s, r, est in rows:
        writer.writerow([format(s, ".17g"), format(r, ".17g"), format(est.value, ".17g"),
                         est.model.tag, est.model.frames])
