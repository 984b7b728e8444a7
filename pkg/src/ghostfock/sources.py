"""
Quantum light sources for ghost imaging.

Two-mode states here are ordered (signal, idler). The coherent operation
``t a_s + r a_s^dag`` acts on the signal mode; ``r = 0`` is photon subtraction
and ``r = 1`` photon addition.

The heralded circuit that realizes the coherent operation uses two ancilla
modes: ``b`` (the port of BS1 that PD1 watches) and ``c`` (the idler of the
weak parametric amplifier, watched by PD2). The simulation is exact in the
truncated Fock space; no expansion in the squeezing ``s0`` or in ``r1 / t1`` is
made.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from . import fock
from .errors import BadParams, DegenerateHerald, NullStateError
from .fock import DEFAULT_CONFIG, FockConfig, FockState

SIGNAL, IDLER = 0, 1


@dataclass(frozen=True)
class CoherentOpParams:
    """Real amplitudes of ``t a + r a^dag`` with ``t^2 + r^2 = 1``."""

    t: float
    r: float

    def __post_init__(self):
        if abs(self.t ** 2 + self.r ** 2 - 1.0) > 1e-12:
            raise BadParams(f"t^2 + r^2 = {self.t ** 2 + self.r ** 2!r}, expected 1")

    @classmethod
    def from_r(cls, r: float, negative_t: bool = False) -> "CoherentOpParams":
        if not 0.0 <= r <= 1.0:
            raise BadParams(f"r must lie in [0, 1], got {r}")
        t = math.sqrt(max(0.0, 1.0 - r * r))
        return cls(-t if negative_t else t, r)

    @classmethod
    def subtraction(cls) -> "CoherentOpParams":
        return cls(1.0, 0.0)

    @classmethod
    def addition(cls) -> "CoherentOpParams":
        return cls(0.0, 1.0)


class Detector(str, Enum):
    PD1 = "PD1"
    PD2 = "PD2"


@dataclass(frozen=True)
class HeraldSpec:
    """Settings of the heralded coherent-operation circuit.

    ``r1`` and ``r2`` default to ``sqrt(1 - t^2)``.
    """

    s0: float
    t1: float
    t2: float
    detector: Detector = Detector.PD1
    r1: float | None = None
    r2: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "detector", Detector(self.detector))
        if self.s0 < 0:
            raise BadParams("s0 must be non-negative")
        for t_name, r_name in (("t1", "r1"), ("t2", "r2")):
            t = getattr(self, t_name)
            r = getattr(self, r_name)
            if r is None:
                if not 0.0 <= t <= 1.0:
                    raise BadParams(f"{t_name} must lie in [0, 1]")
                object.__setattr__(self, r_name, math.sqrt(max(0.0, 1.0 - t * t)))
            elif abs(t * t + r * r - 1.0) > 1e-12:
                raise BadParams(f"{t_name}^2 + {r_name}^2 must equal 1")
        if self.s0 > 0.2:
            warnings.warn(f"s0 = {self.s0} is not small; first-order herald map is inaccurate", stacklevel=2)
        if self.t1 > 0 and self.r1 / self.t1 > 0.3:
            warnings.warn(f"r1/t1 = {self.r1 / self.t1:.3f} is not small", stacklevel=2)
        if self.t1 == 0:
            raise BadParams("t1 must be nonzero")


@dataclass(frozen=True)
class HeraldResult:
    conditional_state: FockState
    success_probability: float
    target_params: CoherentOpParams
    fidelity_to_target: float


def build_tmss(s: float, cutoff: int = DEFAULT_CONFIG.cutoff) -> FockState:
    """(1/cosh s) sum_k tanh^k s |k, k>, truncated at ``cutoff`` and renormalized.

    The tail mass beyond the cutoff is recorded as ``leaked_norm``.
    """
    if s < 0:
        raise BadParams("squeezing parameter must be non-negative")
    k = np.arange(cutoff + 1)
    diag = np.tanh(s) ** k / np.cosh(s)
    # geometric tail: sum_{k > cutoff} tanh^2k s / cosh^2 s = tanh^(2 cutoff + 2) s
    tail = float(np.tanh(s) ** (2 * cutoff + 2))
    amps = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    amps[k, k] = diag / math.sqrt(np.sum(diag ** 2))
    return FockState(amps, tail)


def bell_state(cutoff: int = DEFAULT_CONFIG.cutoff) -> FockState:
    """(|1,0> + |0,1>)/sqrt(2)."""
    return fock.superposition({(1, 0): 1.0, (0, 1): 1.0}, cutoff)


def apply_coherent_op(state: FockState, params: CoherentOpParams, mode: int = SIGNAL,
                      leak_tolerance: float = DEFAULT_CONFIG.leak_tolerance) -> tuple[FockState, float]:
    """Apply ``t a + r a^dag`` to ``mode`` and renormalize.

    Returns the normalized state and the squared norm of the unnormalized
    image (the relative success weight of the operation).
    """
    raw = params.t * fock.annihilate(state, mode).amplitudes
    if params.r != 0.0:
        lifted = fock.create(state, mode, leak_tolerance)
        raw = raw + params.r * lifted.amplitudes
        leak = lifted.leaked_norm - state.leaked_norm
    else:
        leak = 0.0
    image = state.replace(raw, leak)
    weight = image.norm_sq
    if weight == 0.0:
        raise NullStateError("coherent operation annihilates the state")
    return fock.normalize(image), weight


def herald_params(spec: HeraldSpec) -> CoherentOpParams:
    """First-order (t, r) realized by the circuit, normalized to t^2 + r^2 = 1.

    PD1 click: (t, r) ~ (-t2 r1/t1, s0 r2). PD2 click: (t, r) ~ (r2 r1/t1, s0 t2).
    The overall sign is fixed so that r >= 0 (t >= 0 when r = 0).
    """
    ratio = spec.r1 / spec.t1
    if spec.detector is Detector.PD1:
        t, r = -spec.t2 * ratio, spec.s0 * spec.r2
    else:
        t, r = spec.r2 * ratio, spec.s0 * spec.t2
    norm = math.hypot(t, r)
    if norm == 0.0:
        raise DegenerateHerald(f"both herald amplitudes vanish for {spec}")
    t, r = t / norm, r / norm
    if r < 0 or (r == 0 and t < 0):
        t, r = -t, -r
    return CoherentOpParams(t + 0.0, r + 0.0)


def herald_raw_norm_sq(spec: HeraldSpec) -> float:
    """Squared length of the unnormalized first-order (t, r) pair."""
    ratio = spec.r1 / spec.t1
    if spec.detector is Detector.PD1:
        return (spec.t2 * ratio) ** 2 + (spec.s0 * spec.r2) ** 2
    return (spec.r2 * ratio) ** 2 + (spec.s0 * spec.t2) ** 2


def simulate_herald_circuit(state: FockState, spec: HeraldSpec, ancilla_cutoff: int = 8,
                            config: FockConfig = DEFAULT_CONFIG) -> HeraldResult:
    """Run the four-mode heralding circuit exactly and condition on one click.

    Modes: 0 signal, 1 idler, 2 ancilla ``b`` (PD1), 3 ancilla ``c`` (PD2).
    Sequence: squeezer(s0) on (signal, c), BS1(t1) on (signal, b),
    BS2(t2) on (b, c), then project (b, c) on (1, 0) for PD1 or (0, 1) for PD2.
    """
    if state.mode_count != 2:
        raise BadParams("the herald circuit takes a (signal, idler) state")
    if not state.is_normalized:
        raise BadParams("input state must be normalized")
    ancillas = fock.vacuum(2, ancilla_cutoff)
    psi = fock.tensor(state, ancillas)
    psi = fock.apply_two_mode_squeezer(psi, SIGNAL, 3, spec.s0, config=config)
    psi = fock.apply_beam_splitter(psi, SIGNAL, 2, spec.t1, spec.r1, config=config)
    psi = fock.apply_beam_splitter(psi, 2, 3, spec.t2, spec.r2, config=config)
    pattern = {2: 1, 3: 0} if spec.detector is Detector.PD1 else {2: 0, 3: 1}
    conditional, prob = fock.project_photon_pattern(psi, pattern)
    if prob == 0.0:
        raise NullStateError(f"pattern {spec.detector.value} has zero probability")
    params = herald_params(spec)
    target, _ = apply_coherent_op(state, params, leak_tolerance=config.leak_tolerance)
    conditional = fock.canonical_phase(conditional)
    return HeraldResult(conditional, prob, params, fock.fidelity(conditional, target))


SOURCE_KINDS = ("tmss", "subtract", "add", "coherent", "bell")


def build_source(kind: str, s: float = 0.0, r: float | None = None, cutoff: int = DEFAULT_CONFIG.cutoff,
                 negative_t: bool = False) -> FockState:
    """Normalized two-mode source of the given kind.

    ``subtract`` and ``add`` are the coherent operation at r = 0 and r = 1.
    ``bell`` ignores ``s`` and ``r``.
    """
    if kind == "tmss":
        return build_tmss(s, cutoff)
    if kind == "bell":
        return bell_state(cutoff)
    if kind == "subtract":
        r = 0.0
    elif kind == "add":
        r = 1.0
    elif kind == "coherent":
        if r is None:
            raise BadParams("coherent source needs r")
    else:
        raise BadParams(f"unknown source kind {kind!r}; expected one of {SOURCE_KINDS}")
    state, _ = apply_coherent_op(build_tmss(s, cutoff), CoherentOpParams.from_r(r, negative_t))
    return state


@dataclass(frozen=True)
class SourceDescriptor:
    kind: str
    s: float = 0.0
    r: float | None = None

    def __str__(self) -> str:
        if self.kind == "bell":
            return "bell"
        text = f"{self.kind}:s={self.s!r}"
        return text + (f",r={self.r!r}" if self.kind == "coherent" else "")

    def build(self, cutoff: int = DEFAULT_CONFIG.cutoff) -> FockState:
        return build_source(self.kind, self.s, self.r, cutoff)


_DESCRIPTOR = re.compile(r"^\s*(?P<kind>[a-z]+)\s*(?::(?P<args>.*))?$")


def parse_source(text: str) -> SourceDescriptor:
    """Parse ``kind:key=value,...`` such as ``coherent:s=0.01,r=0.01`` or ``bell``."""
    m = _DESCRIPTOR.match(text)
    if not m or m["kind"] not in SOURCE_KINDS:
        raise BadParams(f"cannot parse source descriptor {text!r}")
    args: Mapping[str, float] = {}
    if m["args"]:
        try:
            args = {k.strip(): float(v) for k, v in (item.split("=") for item in m["args"].split(","))}
        except ValueError as exc:
            raise BadParams(f"bad arguments in source descriptor {text!r}") from exc
    unknown = set(args) - {"s", "r"}
    if unknown:
        raise BadParams(f"unknown keys {sorted(unknown)} in {text!r}")
    kind = m["kind"]
    if kind == "coherent" and "r" not in args:
        raise BadParams("coherent source needs r")
    if kind != "bell" and "s" not in args:
        raise BadParams(f"{kind} source needs s")
    return SourceDescriptor(kind, args.get("s", 0.0), args.get("r"))
