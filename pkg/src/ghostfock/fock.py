"""
Truncated multimode Fock-space engine.

States are dense complex grids ``amplitudes[n_0, n_1, ...]`` over at most four
bosonic modes, each truncated at its own cutoff. Every operation is a pure
function returning a new :class:`FockState`; probability mass that a unitary
or a creation operator pushes beyond the cutoff is dropped and accumulated in
``leaked_norm``.

Gaussian two-mode unitaries (beam splitter, two-mode squeezer) conserve either
``n_a + n_b`` or ``n_a - n_b``, so their generator is block diagonal. Each block
is exponentiated exactly (``scipy.linalg.expm``) on a space enlarged by
``buffer`` photons per mode, and the result is truncated back to the cutoff.

Beam-splitter convention (used everywhere in the package)::

    a_1^dag -> t a_1^dag - conj(r) a_2^dag
    a_2^dag -> conj(t) a_2^dag + r a_1^dag

For real parameters a single photon entering mode 1 of a 50:50 splitter leaves
as (|1,0> - |0,1>)/sqrt(2).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import expm, logm

from .errors import BadParams, NullStateError, TruncationOverflow

MAX_MODES = 4


@dataclass(frozen=True)
class FockConfig:
    cutoff: int = 40
    buffer: int = 10
    leak_tolerance: float = 1e-10


DEFAULT_CONFIG = FockConfig()


@dataclass(frozen=True, eq=False)
class FockState:
    """Pure state on a truncated Fock grid.

    ``amplitudes`` has one axis per mode and extent ``cutoff + 1`` along each.
    A state whose amplitudes are all zero is a legitimate value (the "null
    state" produced by impossible heralding patterns); see :attr:`is_null`.
    """

    amplitudes: np.ndarray
    leaked_norm: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if not 1 <= amps.ndim <= MAX_MODES:
            raise BadParams(f"mode count must be in 1..{MAX_MODES}, got {amps.ndim}")
        if min(amps.shape) < 2:
            raise BadParams("cutoff must be >= 1 on every mode")
        if self.leaked_norm < 0:
            raise BadParams("leaked_norm must be non-negative")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def mode_count(self) -> int:
        return self.amplitudes.ndim

    @property
    def cutoffs(self) -> tuple[int, ...]:
        return tuple(d - 1 for d in self.amplitudes.shape)

    @property
    def cutoff(self) -> int:
        return max(self.cutoffs)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_sq - 1.0) <= 1e-12

    @property
    def is_null(self) -> bool:
        return not np.any(self.amplitudes)

    def amplitude(self, *occupations: int) -> complex:
        return complex(self.amplitudes[occupations])

    def replace(self, amplitudes: np.ndarray, extra_leak: float = 0.0) -> "FockState":
        return FockState(amplitudes, self.leaked_norm + extra_leak)

    def to_dict(self) -> dict:
        flat = self.amplitudes.ravel()
        return {
            "mode_count": self.mode_count,
            "cutoff": list(self.cutoffs),
            "amplitudes": [[float(z.real), float(z.imag)] for z in flat],
            "leaked_norm": self.leaked_norm,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "FockState":
        cut = data["cutoff"]
        if isinstance(cut, int):
            cut = [cut] * data["mode_count"]
        shape = tuple(c + 1 for c in cut)
        pairs = np.asarray(data["amplitudes"], dtype=float).reshape(-1, 2)
        amps = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(shape)
        return cls(amps, float(data.get("leaked_norm", 0.0)))

    @classmethod
    def from_json(cls, text: str) -> "FockState":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class JointPnd:
    """Joint photon-number distribution P(n_s, n_i) of a two-mode state."""

    probabilities: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 2:
            raise BadParams("JointPnd needs a two-mode grid")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise BadParams("probabilities must be non-negative and sum to 1")
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)

    def marginal(self, mode: int) -> np.ndarray:
        return self.probabilities.sum(axis=1 - mode)

    def moment(self, p: int, q: int) -> float:
        ns = np.arange(self.probabilities.shape[0])[:, None] ** p
        ni = np.arange(self.probabilities.shape[1])[None, :] ** q
        return float(np.sum(self.probabilities * ns * ni))


def _cutoff_tuple(mode_count: int, cutoff: int | Sequence[int]) -> tuple[int, ...]:
    if np.ndim(cutoff) == 0:
        cuts = (int(cutoff),) * mode_count
    else:
        cuts = tuple(int(c) for c in cutoff)
    if len(cuts) != mode_count or min(cuts) < 1:
        raise BadParams(f"invalid cutoff {cutoff!r} for {mode_count} modes")
    return cuts


def vacuum(mode_count: int = 2, cutoff: int | Sequence[int] = DEFAULT_CONFIG.cutoff) -> FockState:
    return fock_state((0,) * mode_count, cutoff)


def fock_state(occupations: Sequence[int], cutoff: int | Sequence[int] = DEFAULT_CONFIG.cutoff) -> FockState:
    """Number state |n_0, n_1, ...>."""
    cuts = _cutoff_tuple(len(occupations), cutoff)
    if any(n < 0 or n > c for n, c in zip(occupations, cuts)):
        raise BadParams(f"occupations {tuple(occupations)} exceed cutoff {cuts}")
    amps = np.zeros(tuple(c + 1 for c in cuts), dtype=complex)
    amps[tuple(occupations)] = 1.0
    return FockState(amps)


def superposition(terms: Mapping[tuple[int, ...], complex], cutoff: int | Sequence[int] = DEFAULT_CONFIG.cutoff,
                  normalize_result: bool = True) -> FockState:
    """Build sum_k c_k |n_k> from a mapping of occupation tuples to amplitudes."""
    mode_count = len(next(iter(terms)))
    cuts = _cutoff_tuple(mode_count, cutoff)
    amps = np.zeros(tuple(c + 1 for c in cuts), dtype=complex)
    for occ, c in terms.items():
        amps[tuple(occ)] += c
    state = FockState(amps)
    return normalize(state) if normalize_result else state


def _check_mode(state: FockState, mode: int) -> None:
    if not 0 <= mode < state.mode_count:
        raise BadParams(f"mode {mode} out of range for {state.mode_count}-mode state")


def _shape_along(state: FockState, mode: int) -> list[int]:
    shape = [1] * state.mode_count
    shape[mode] = state.amplitudes.shape[mode]
    return shape


def annihilate(state: FockState, mode: int) -> FockState:
    """a|n> = sqrt(n)|n-1> on one mode. Output is not renormalized."""
    _check_mode(state, mode)
    amps = np.moveaxis(state.amplitudes, mode, 0)
    out = np.zeros_like(amps)
    n = np.sqrt(np.arange(1, amps.shape[0])).reshape((-1,) + (1,) * (amps.ndim - 1))
    out[:-1] = n * amps[1:]
    return state.replace(np.moveaxis(out, 0, mode))


def create(state: FockState, mode: int, leak_tolerance: float = DEFAULT_CONFIG.leak_tolerance) -> FockState:
    """a^dag|n> = sqrt(n+1)|n+1> on one mode. Output is not renormalized.

    Amplitude lifted above the cutoff is discarded and booked as leak.
    """
    _check_mode(state, mode)
    amps = np.moveaxis(state.amplitudes, mode, 0)
    n = np.sqrt(np.arange(1, amps.shape[0] + 1)).reshape((-1,) + (1,) * (amps.ndim - 1))
    lifted = n * amps
    leak = float(np.vdot(lifted[-1], lifted[-1]).real)
    if leak > leak_tolerance:
        raise TruncationOverflow(f"creation on mode {mode} leaks {leak:.3e} past cutoff")
    out = np.zeros_like(amps)
    out[1:] = lifted[:-1]
    return state.replace(np.moveaxis(out, 0, mode), leak)


def number_expectation(state: FockState, mode: int) -> float:
    _check_mode(state, mode)
    probs = np.abs(state.amplitudes) ** 2
    n = np.arange(state.amplitudes.shape[mode]).reshape(_shape_along(state, mode))
    return float(np.sum(probs * n) / np.sum(probs))


def norm_sq(state: FockState) -> float:
    return state.norm_sq


def normalize(state: FockState) -> FockState:
    ns = state.norm_sq
    if ns == 0.0:
        raise NullStateError("cannot normalize the zero state")
    return state.replace(state.amplitudes / np.sqrt(ns))


def inner(a: FockState, b: FockState) -> complex:
    """<a|b> (antilinear in the first argument)."""
    if a.amplitudes.shape != b.amplitudes.shape:
        raise BadParams(f"shape mismatch {a.amplitudes.shape} vs {b.amplitudes.shape}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: FockState, b: FockState) -> float:
    """|<a|b>|^2 for normalized pure states."""
    if not (a.is_normalized and b.is_normalized):
        raise BadParams("fidelity requires normalized states")
    return float(min(1.0, abs(inner(a, b)) ** 2))


def canonical_phase(state: FockState) -> FockState:
    """Rotate the global phase so the first nonzero amplitude is real positive."""
    flat = state.amplitudes.ravel()
    nz = np.flatnonzero(np.abs(flat) > 1e-300)
    if nz.size == 0:
        return state
    z = flat[nz[0]]
    return state.replace(state.amplitudes * (abs(z) / z))


def embed(state: FockState, cutoffs: Sequence[int]) -> FockState:
    """Copy ``state`` into a grid with larger (or equal) per-mode cutoffs."""
    cuts = tuple(cutoffs)
    if len(cuts) != state.mode_count or any(c < o for c, o in zip(cuts, state.cutoffs)):
        raise BadParams(f"cannot embed cutoffs {state.cutoffs} into {cuts}")
    amps = np.zeros(tuple(c + 1 for c in cuts), dtype=complex)
    amps[tuple(slice(0, d) for d in state.amplitudes.shape)] = state.amplitudes
    return state.replace(amps)


def tensor(a: FockState, b: FockState) -> FockState:
    if a.mode_count + b.mode_count > MAX_MODES:
        raise BadParams(f"at most {MAX_MODES} modes are supported")
    amps = np.multiply.outer(a.amplitudes, b.amplitudes)
    return FockState(amps, a.leaked_norm + b.leaked_norm)


def project_photon_pattern(state: FockState, pattern: Mapping[int, int]) -> tuple[FockState, float]:
    """Condition on detecting ``pattern[mode]`` photons in each listed mode.

    Returns the normalized state of the remaining modes and the pattern
    probability (relative to the input norm). A zero-probability pattern gives
    the null state (all amplitudes zero) and probability 0.
    """
    if not pattern:
        raise BadParams("empty detection pattern")
    index: list = [slice(None)] * state.mode_count
    for mode, count in pattern.items():
        _check_mode(state, mode)
        if not 0 <= count <= state.cutoffs[mode]:
            raise BadParams(f"count {count} on mode {mode} exceeds cutoff {state.cutoffs[mode]}")
        index[mode] = count
    if len(pattern) == state.mode_count:
        raise BadParams("pattern must leave at least one mode unmeasured")
    sliced = state.amplitudes[tuple(index)]
    prob = float(np.vdot(sliced, sliced).real) / state.norm_sq
    rest = FockState(sliced, state.leaked_norm)
    if prob == 0.0:
        return rest, 0.0
    return normalize(rest), prob


def joint_pnd(state: FockState) -> JointPnd:
    if state.mode_count != 2:
        raise BadParams("joint_pnd is defined for two-mode states")
    probs = np.abs(state.amplitudes) ** 2
    return JointPnd(probs / probs.sum())


def moment(state: FockState, p: int, q: int) -> float:
    """<n_s^p n_i^q> of a two-mode state."""
    return joint_pnd(state).moment(p, q)


# --- two-mode Gaussian unitaries -------------------------------------------------


def _block_indices(conserved: str, value: int, b1: int, b2: int) -> tuple[np.ndarray, np.ndarray]:
    if conserved == "sum":
        n1 = np.arange(max(0, value - b2), min(value, b1) + 1)
        return n1, value - n1
    n1 = np.arange(max(0, value), min(b1, b2 + value) + 1)
    return n1, n1 - value


def _passive_block(A: np.ndarray, n1: np.ndarray, n2: np.ndarray) -> np.ndarray:
    # X = A11 n1 + A22 n2 + A12 a1^dag a2 + A21 a2^dag a1, basis ordered by n1
    size = len(n1)
    X = np.diag(A[0, 0] * n1 + A[1, 1] * n2).astype(complex)
    for j in range(size - 1):
        # |n1[j], n2[j]> -> |n1[j]+1, n2[j]-1> is element j+1
        X[j + 1, j] += A[0, 1] * np.sqrt((n1[j] + 1) * n2[j])
        X[j, j + 1] += A[1, 0] * np.sqrt(n1[j + 1] * (n2[j + 1] + 1))
    return X


def _squeezer_block(z: complex, n1: np.ndarray, n2: np.ndarray) -> np.ndarray:
    # X = z a1^dag a2^dag - conj(z) a1 a2, basis ordered by n1 with n1 - n2 fixed
    size = len(n1)
    X = np.zeros((size, size), dtype=complex)
    for j in range(size - 1):
        amp = np.sqrt((n1[j] + 1) * (n2[j] + 1))
        X[j + 1, j] = z * amp
        X[j, j + 1] = -np.conj(z) * amp
    return X


def _apply_blockwise(state: FockState, m1: int, m2: int, conserved: str, block_fn,
                     config: FockConfig) -> FockState:
    if m1 == m2:
        raise BadParams("two-mode operation needs distinct modes")
    _check_mode(state, m1)
    _check_mode(state, m2)
    amps = np.moveaxis(state.amplitudes, (m1, m2), (0, 1))
    c1, c2 = amps.shape[0] - 1, amps.shape[1] - 1
    b1, b2 = c1 + config.buffer, c2 + config.buffer
    rest = amps.shape[2:]
    padded = np.zeros((b1 + 1, b2 + 1) + rest, dtype=complex)
    padded[: c1 + 1, : c2 + 1] = amps
    padded = padded.reshape(b1 + 1, b2 + 1, -1)
    out = np.zeros_like(padded)
    values = range(0, b1 + b2 + 1) if conserved == "sum" else range(-b2, b1 + 1)
    for v in values:
        n1, n2 = _block_indices(conserved, v, b1, b2)
        if len(n1) == 0:
            continue
        block_in = padded[n1, n2]
        if not np.any(block_in):
            continue
        U = expm(block_fn(n1, n2))
        out[n1, n2] = U @ block_in
    out = out.reshape((b1 + 1, b2 + 1) + rest)
    kept = out[: c1 + 1, : c2 + 1]
    tail1, tail2 = out[c1 + 1:], out[: c1 + 1, c2 + 1:]
    leak = float(np.vdot(tail1, tail1).real + np.vdot(tail2, tail2).real)
    if leak > config.leak_tolerance:
        raise TruncationOverflow(f"two-mode unitary leaks {leak:.3e} past cutoffs ({c1}, {c2})")
    return state.replace(np.moveaxis(kept, (0, 1), (m1, m2)), leak)


def beam_splitter_matrix(t: complex, r: complex) -> np.ndarray:
    """Mode transformation M with a_j^dag -> sum_k M[k, j] a_k^dag."""
    return np.array([[t, r], [-np.conj(r), np.conj(t)]], dtype=complex)


def apply_beam_splitter(state: FockState, mode_b: int, mode_c: int, t: complex, r: complex,
                        config: FockConfig = DEFAULT_CONFIG) -> FockState:
    """Lossless beam splitter with transmission ``t`` and reflection ``r``.

    Conserves ``n_b + n_c`` exactly. See the module docstring for the sign
    convention.
    """
    if abs(abs(t) ** 2 + abs(r) ** 2 - 1.0) > 1e-12:
        raise BadParams(f"|t|^2 + |r|^2 must equal 1 (got {abs(t) ** 2 + abs(r) ** 2!r})")
    M = beam_splitter_matrix(t, r)
    if np.allclose(M, np.eye(2), atol=0, rtol=0):
        return state
    if np.isrealobj(t) and np.isrealobj(r):
        A = np.arctan2(r, t) * np.array([[0.0, 1.0], [-1.0, 0.0]])
    else:
        A = logm(M)
        A = 0.5 * (A - A.conj().T)
    return _apply_blockwise(state, mode_b, mode_c, "sum", lambda n1, n2: _passive_block(A, n1, n2), config)


def apply_two_mode_squeezer(state: FockState, mode_a: int, mode_c: int, s: float, phase: float = 0.0,
                            config: FockConfig = DEFAULT_CONFIG) -> FockState:
    """exp(z a^dag c^dag - conj(z) a c) with z = s e^{i phase}.

    On vacuum this produces (1/cosh s) sum_k tanh^k s |k, k>.
    """
    if s < 0:
        raise BadParams("squeezing parameter must be non-negative")
    if s == 0:
        return state
    z = s * np.exp(1j * phase)
    return _apply_blockwise(state, mode_a, mode_c, "diff", lambda n1, n2: _squeezer_block(z, n1, n2), config)
