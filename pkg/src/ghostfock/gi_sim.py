"""
Monte-Carlo ghost imaging with photon-counting detectors.

Each frame draws photon-number pairs from the joint distribution of the
source. Every CCD pixel is fed by its own replica of the two-mode source:

* inside the object (T = 1) the replica's signal photon reaches the bucket
  and its idler photon lands on the pixel;
* outside (T = 0) the signal photon is blocked, so the pixel only sees an
  idler draw that is independent of the bucket.

The bucket count is the sum of the transmitted signal photons, and the pixel
value is the sample covariance between bucket and pixel counts.

Random streams are keyed by ``(seed, pixel)`` (or ``(seed, replica)`` for
:func:`empirical_snr`) through :class:`numpy.random.SeedSequence`, so results
depend only on the seed and not on evaluation order. Covariances are
accumulated in exact integer arithmetic.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from . import fock
from .errors import BadParams
from .fock import DEFAULT_CONFIG, FockState, JointPnd
from .snr import SnrEstimate, SnrModelVariant
from .sources import SourceDescriptor, parse_source

_BUCKET_STREAM = 0
_PIXEL_STREAM = 1
_REPLICA_STREAM = 2


class PndSampler:
    """Inverse-CDF sampler over a flattened joint photon-number table."""

    def __init__(self, pnd: JointPnd):
        p = pnd.probabilities
        self.shape = p.shape
        cdf = np.cumsum(p.ravel())
        cdf /= cdf[-1]
        self._cdf = cdf
        marginal = np.cumsum(pnd.marginal(1))
        marginal /= marginal[-1]
        self._idler_cdf = marginal

    def pairs(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        flat = np.searchsorted(self._cdf, rng.random(size), side="right")
        flat = np.minimum(flat, self._cdf.size - 1)
        ns, ni = np.unravel_index(flat, self.shape)
        return ns.astype(np.int64), ni.astype(np.int64)

    def idler(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = np.searchsorted(self._idler_cdf, rng.random(size), side="right")
        return np.minimum(idx, self._idler_cdf.size - 1).astype(np.int64)


def sample_frame(pnd: JointPnd, rng: np.random.Generator) -> tuple[int, int]:
    ns, ni = PndSampler(pnd).pairs(rng, 1)
    return int(ns[0]), int(ni[0])


@dataclass(frozen=True)
class ObjectMask:
    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=bool)
        if px.ndim != 1 or px.size < 2:
            raise BadParams("mask must be a 1-D array with at least two pixels")
        if px.all() or not px.any():
            raise BadParams("mask needs at least one inside and one outside pixel")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_pattern(cls, pattern: str) -> "ObjectMask":
        """``"0011"``: '1' marks a transmitting pixel, '0' a blocked one."""
        if set(pattern) - {"0", "1"}:
            raise BadParams(f"mask pattern must contain only 0 and 1: {pattern!r}")
        return cls(np.array([c == "1" for c in pattern]))

    @property
    def pattern(self) -> str:
        return "".join("1" if p else "0" for p in self.pixels)


@dataclass(frozen=True)
class GhostImage:
    covariance: np.ndarray
    mask: ObjectMask
    frames_used: int
    seed: int
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def contrast(self) -> float:
        """mean(inside) - mean(outside)."""
        return float(self.covariance[self.mask.pixels].mean() - self.covariance[~self.mask.pixels].mean())

    def write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["pixel_index", "inside_flag", "covariance_estimate"])
        for j, (inside, cov) in enumerate(zip(self.mask.pixels, self.covariance)):
            writer.writerow([j, int(inside), format(float(cov), ".17g")])

    def write_metadata(self, fh: TextIO) -> None:
        json.dump(self.metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve(source, cutoff: int) -> tuple[FockState, str]:
    if isinstance(source, FockState):
        return source, "custom-state"
    desc = source if isinstance(source, SourceDescriptor) else parse_source(source)
    return desc.build(cutoff), str(desc)


def _exact_cov(x: np.ndarray, y: np.ndarray) -> float:
    # integer sums are exact, so the result does not depend on summation order
    n = x.size
    sx, sy, sxy = int(x.sum()), int(y.sum()), int(np.dot(x, y))
    return (n * sxy - sx * sy) / (n * (n - 1))


def run_ghost_imaging(source, mask: ObjectMask, frames: int, seed: int,
                      cutoff: int = DEFAULT_CONFIG.cutoff) -> GhostImage:
    """Simulate ``frames`` exposures of ``mask`` and reconstruct it by covariance.

    ``source`` is a normalized two-mode FockState or a descriptor such as
    ``"tmss:s=0.35"``.
    """
    if frames < 100:
        raise BadParams("at least 100 frames are required")
    start = time.perf_counter()
    state, label = _resolve(source, cutoff)
    sampler = PndSampler(fock.joint_pnd(state))
    bucket = np.zeros(frames, dtype=np.int64)
    readings = []
    for j, inside in enumerate(mask.pixels):
        rng = np.random.default_rng(np.random.SeedSequence([seed, _PIXEL_STREAM, j]))
        if inside:
            ns, ni = sampler.pairs(rng, frames)
            bucket += ns
            readings.append(ni)
        else:
            readings.append(sampler.idler(rng, frames))
    cov = np.array([_exact_cov(bucket, ni) for ni in readings])
    meta = {"source": label, "frames": frames, "seed": seed, "mask": mask.pattern,
            "cutoff": state.cutoff, "leaked_norm": state.leaked_norm,
            "elapsed": time.perf_counter() - start}
    return GhostImage(cov, mask, frames, seed, meta)


def _replica_snr(sampler: PndSampler, frames: int, rng: np.random.Generator) -> float:
    ns, n_in = sampler.pairs(rng, frames)
    n_out = sampler.idler(rng, frames)
    d = (ns - ns.mean()) * (n_in - n_out)
    sd = d.std(ddof=1)
    return abs(d.mean()) / sd if sd > 0 else 0.0


def empirical_snr(source, frames: int, seed: int, replicas: int = 30,
                  cutoff: int = DEFAULT_CONFIG.cutoff) -> SnrEstimate:
    """Per-frame SNR of the shared-bucket estimator, estimated by sampling.

    Each of ``replicas`` independent runs of ``frames`` frames gives
    |mean D| / std D; the estimate is their mean, with its standard error.
    """
    if replicas < 30:
        raise BadParams("at least 30 replicas are required for a stderr")
    state, _ = _resolve(source, cutoff)
    sampler = PndSampler(fock.joint_pnd(state))
    vals = np.array([
        _replica_snr(sampler, frames, np.random.default_rng(np.random.SeedSequence([seed, _REPLICA_STREAM, k])))
        for k in range(replicas)
    ])
    return SnrEstimate(float(vals.mean()), SnrModelVariant(), float(vals.std(ddof=1) / np.sqrt(replicas)))


def empirical_moments(source, frames: int, seed: int, cutoff: int = DEFAULT_CONFIG.cutoff):
    """Sample means of n_s^p n_i^q and their standard errors, keyed like MomentSet."""
    from .moments import MOMENT_ORDERS

    state, _ = _resolve(source, cutoff)
    rng = np.random.default_rng(np.random.SeedSequence([seed, _BUCKET_STREAM]))
    ns, ni = PndSampler(fock.joint_pnd(state)).pairs(rng, frames)
    ns, ni = ns.astype(float), ni.astype(float)
    means, errs = {}, {}
    for name, (p, q) in MOMENT_ORDERS.items():
        x = ns ** p * ni ** q
        means[name] = float(x.mean())
        errs[name] = float(x.std(ddof=1) / np.sqrt(frames))
    return means, errs
