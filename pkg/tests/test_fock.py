import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ghostfock import fock
from ghostfock.errors import BadParams, NullStateError, TruncationOverflow
from ghostfock.fock import FockConfig, FockState
from ghostfock.sources import bell_state, build_tmss


def tmss_series(s, kmax=200):
    k = np.arange(kmax)
    return k, np.tanh(s) ** (2 * k) / np.cosh(s) ** 2


def random_state(rng, shape, support=None):
    amps = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    if support is not None:
        amps[tuple(slice(support, None) if i == 0 else slice(None) for i in range(len(shape)))] = 0
        mask = np.zeros(shape, dtype=bool)
        mask[tuple(slice(0, support) for _ in shape)] = True
        amps[~mask] = 0
    return fock.normalize(FockState(amps))


class TestVacuumAndBasics:
    def test_vacuum_mean_numbers(self):
        v = fock.vacuum(2, 8)
        assert fock.number_expectation(v, 0) == 0
        assert fock.number_expectation(v, 1) == 0
        assert fock.norm_sq(v) == 1
        assert v.leaked_norm == 0

    def test_vacuum_four_modes_self_fidelity(self):
        v = fock.vacuum(4, 6)
        assert fock.fidelity(v, v) == 1.0
        assert v.amplitudes.shape == (7, 7, 7, 7)

    def test_rejects_bad_cutoff(self):
        with pytest.raises(BadParams):
            fock.vacuum(2, 0)
        with pytest.raises(BadParams):
            fock.vacuum(5, 2)

    def test_amplitudes_are_immutable(self):
        v = fock.vacuum(2, 3)
        with pytest.raises(ValueError):
            v.amplitudes[0, 0] = 2


class TestLadder:
    def test_annihilate_vacuum_is_zero(self):
        out = fock.annihilate(fock.vacuum(1, 5), 0)
        assert out.norm_sq == 0
        assert out.is_null

    def test_annihilate_one_photon(self):
        out = fock.annihilate(fock.fock_state((1,), 5), 0)
        assert out.amplitude(0) == pytest.approx(1.0)
        assert out.norm_sq == pytest.approx(1.0)

    def test_annihilate_tmss_norm_is_mean_photon_number(self):
        k, p = tmss_series(0.35)
        oracle = float(np.sum(k * p))
        assert oracle == pytest.approx(math.sinh(0.35) ** 2, rel=1e-14)
        out = fock.annihilate(build_tmss(0.35), 0)
        assert out.norm_sq == pytest.approx(oracle, rel=1e-12)
        assert out.norm_sq == pytest.approx(0.12759, abs=1e-5)

    def test_create_vacuum(self):
        out = fock.create(fock.vacuum(1, 5), 0)
        assert out.amplitude(1) == pytest.approx(1.0)

    def test_create_tmss_norm(self):
        out = fock.create(build_tmss(0.35), 0)
        assert out.norm_sq == pytest.approx(math.cosh(0.35) ** 2, rel=1e-12)
        assert out.norm_sq == pytest.approx(1.12759, abs=1e-5)

    def test_create_at_cutoff_overflows(self):
        with pytest.raises(TruncationOverflow):
            fock.create(fock.fock_state((6,), 6), 0)

    def test_create_records_small_leak(self):
        tiny = fock.superposition({(0,): 1.0, (4,): 1e-7}, 4)
        out = fock.create(tiny, 0)
        assert out.leaked_norm == pytest.approx(5 * 1e-14 / (1 + 1e-14), rel=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), mode=st.integers(0, 1))
    def test_adjointness(self, seed, mode):
        rng = np.random.default_rng(seed)
        # no support on the top level of the grid, so a^dag does not truncate
        phi = random_state(rng, (7, 7), support=6)
        psi = random_state(rng, (7, 7), support=6)
        lhs = fock.inner(phi, fock.annihilate(psi, mode))
        rhs = fock.inner(fock.create(phi, mode), psi)
        assert abs(lhs - rhs) < 1e-12


class TestSqueezer:
    def test_vacuum_gives_tmss(self):
        out = fock.apply_two_mode_squeezer(fock.vacuum(2, 40), 0, 1, 0.35)
        k = np.arange(41)
        np.testing.assert_allclose(np.diag(out.amplitudes).real, np.tanh(0.35) ** k / np.cosh(0.35), atol=1e-14)
        off = out.amplitudes - np.diag(np.diag(out.amplitudes))
        assert np.max(np.abs(off)) < 1e-14

    def test_zero_squeezing_is_identity(self):
        v = fock.fock_state((2, 1), 5)
        assert fock.apply_two_mode_squeezer(v, 0, 1, 0.0) is v

    def test_pair_probability_small_s(self):
        out = fock.apply_two_mode_squeezer(fock.vacuum(2, 20), 0, 1, 0.05)
        oracle = math.tanh(0.05) ** 2 / math.cosh(0.05) ** 2
        assert abs(out.amplitude(1, 1)) ** 2 == pytest.approx(oracle, rel=1e-12)
        assert oracle == pytest.approx(2.48961e-3, rel=1e-5)

    def test_overflow_when_cutoff_too_small(self):
        with pytest.raises(TruncationOverflow):
            fock.apply_two_mode_squeezer(fock.vacuum(2, 3), 0, 1, 0.7)

    def test_distinct_modes_required(self):
        with pytest.raises(BadParams):
            fock.apply_two_mode_squeezer(fock.vacuum(2, 3), 0, 0, 0.1)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), s=st.floats(0.0, 0.6))
    def test_norm_preserved_within_leak(self, seed, s):
        rng = np.random.default_rng(seed)
        psi = random_state(rng, (31, 31), support=4)
        cfg = FockConfig(cutoff=30, buffer=10, leak_tolerance=1e-6)
        out = fock.apply_two_mode_squeezer(psi, 0, 1, s, config=cfg)
        assert abs(out.norm_sq + out.leaked_norm - 1.0) < 1e-12

    def test_conserves_photon_difference(self):
        rng = np.random.default_rng(3)
        psi = random_state(rng, (21, 21), support=4)
        out = fock.apply_two_mode_squeezer(psi, 0, 1, 0.3, phase=0.7)
        diff = lambda st: fock.number_expectation(st, 0) - fock.number_expectation(st, 1)
        assert diff(out) == pytest.approx(diff(psi), abs=1e-10)


class TestBeamSplitter:
    def test_full_transmission_is_identity(self):
        psi = fock.fock_state((2, 1), 5)
        out = fock.apply_beam_splitter(psi, 0, 1, 1.0, 0.0)
        assert fock.fidelity(out, psi) == pytest.approx(1.0, abs=1e-15)

    def test_single_photon_50_50(self):
        # oracle: a1^dag -> (a1^dag - a2^dag)/sqrt(2) applied to |0,0>
        h = 1 / math.sqrt(2)
        out = fock.apply_beam_splitter(fock.fock_state((1, 0), 4), 0, 1, h, h)
        assert out.amplitude(1, 0) == pytest.approx(h, abs=1e-14)
        assert out.amplitude(0, 1) == pytest.approx(-h, abs=1e-14)
        assert abs(out.amplitude(1, 0)) ** 2 == pytest.approx(0.5)

    def test_hong_ou_mandel(self):
        h = 1 / math.sqrt(2)
        out = fock.apply_beam_splitter(fock.fock_state((1, 1), 4), 0, 1, h, h)
        assert abs(out.amplitude(1, 1)) < 1e-14
        assert abs(out.amplitude(2, 0)) ** 2 == pytest.approx(0.5, abs=1e-14)

    def test_two_photon_mode_map(self):
        # |2,0> -> (t a1^dag - r a2^dag)^2 |0>/sqrt(2)
        t, r = 0.8, 0.6
        out = fock.apply_beam_splitter(fock.fock_state((2, 0), 4), 0, 1, t, r)
        assert out.amplitude(2, 0) == pytest.approx(t * t, abs=1e-14)
        assert out.amplitude(1, 1) == pytest.approx(-math.sqrt(2) * t * r, abs=1e-14)
        assert out.amplitude(0, 2) == pytest.approx(r * r, abs=1e-14)

    def test_complex_parameters_match_mode_map(self):
        t, r = 0.6 * np.exp(0.3j), 0.8 * np.exp(-1.1j)
        out = fock.apply_beam_splitter(fock.fock_state((1, 0), 3), 0, 1, t, r)
        assert out.amplitude(1, 0) == pytest.approx(t, abs=1e-13)
        assert out.amplitude(0, 1) == pytest.approx(-np.conj(r), abs=1e-13)

    def test_rejects_unnormalized(self):
        with pytest.raises(BadParams):
            fock.apply_beam_splitter(fock.vacuum(2, 3), 0, 1, 0.8, 0.8)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), theta=st.floats(0, 2 * math.pi))
    def test_conserves_total_photon_number(self, seed, theta):
        rng = np.random.default_rng(seed)
        psi = random_state(rng, (9, 9, 3), support=5)
        out = fock.apply_beam_splitter(psi, 0, 1, math.cos(theta), math.sin(theta))
        total = lambda st: fock.number_expectation(st, 0) + fock.number_expectation(st, 1)
        assert total(out) == pytest.approx(total(psi), abs=1e-12)
        assert abs(out.norm_sq + out.leaked_norm - 1.0) < 1e-12
        # per-sector probabilities are exactly conserved
        n = np.add.outer(np.arange(9), np.arange(9))
        for N in range(9):
            before = np.sum(np.abs(psi.amplitudes[n == N]) ** 2)
            after = np.sum(np.abs(out.amplitudes[n == N]) ** 2)
            assert after == pytest.approx(before, abs=1e-13)


class TestProjection:
    def test_fock_projection(self):
        rest, p = fock.project_photon_pattern(fock.fock_state((1, 0), 3), {0: 1})
        assert p == pytest.approx(1.0)
        assert rest.amplitude(0) == pytest.approx(1.0)

    def test_tmss_idler_click(self):
        s = 0.35
        rest, p = fock.project_photon_pattern(build_tmss(s), {1: 1})
        assert p == pytest.approx(math.tanh(s) ** 2 / math.cosh(s) ** 2, rel=1e-12)
        assert abs(rest.amplitude(1)) == pytest.approx(1.0)

    def test_impossible_pattern_gives_null_state(self):
        rest, p = fock.project_photon_pattern(fock.vacuum(2, 3), {0: 1})
        assert p == 0.0
        assert rest.is_null
        with pytest.raises(NullStateError):
            fock.normalize(rest)

    def test_count_above_cutoff_rejected(self):
        with pytest.raises(BadParams):
            fock.project_photon_pattern(fock.vacuum(2, 3), {0: 4})


class TestFidelityAndStatistics:
    def test_orthogonal(self):
        assert fock.fidelity(fock.fock_state((0, 1), 3), fock.fock_state((1, 0), 3)) == 0.0

    def test_weak_squeezing_state_near_bell(self):
        s = 0.01
        approx = fock.superposition({(1, 0): s, (0, 1): s * math.sqrt(1 - s * s), (2, 1): math.sqrt(2) * s * s}, 4)
        # direct inner product with (|1,0> + |0,1>)/sqrt(2)
        oracle = abs((s + s * math.sqrt(1 - s * s)) / math.sqrt(2)) ** 2 / (
            s * s + s * s * (1 - s * s) + 2 * s ** 4)
        f = fock.fidelity(bell_state(4), approx)
        assert f == pytest.approx(oracle, rel=1e-12)
        assert f >= 0.999

    def test_fidelity_symmetric(self):
        rng = np.random.default_rng(1)
        a, b = random_state(rng, (4, 4)), random_state(rng, (4, 4))
        assert fock.fidelity(a, b) == pytest.approx(fock.fidelity(b, a), abs=1e-15)

    def test_tmss_cross_moment(self):
        k, p = tmss_series(0.35)
        oracle = float(np.sum(k * k * p))
        nbar = math.sinh(0.35) ** 2
        assert oracle == pytest.approx(2 * nbar ** 2 + nbar, rel=1e-12)
        assert fock.moment(build_tmss(0.35), 1, 1) == pytest.approx(oracle, rel=1e-12)
        assert fock.moment(build_tmss(0.35), 1, 1) == pytest.approx(0.16015, abs=1e-5)

    def test_moment_of_fock_state(self):
        assert fock.moment(fock.fock_state((1, 0), 3), 2, 2) == 0
        assert fock.moment(fock.fock_state((1, 0), 3), 0, 0) == 1

    def test_pnd_sums_to_one(self):
        rng = np.random.default_rng(5)
        pnd = fock.joint_pnd(random_state(rng, (6, 6)))
        assert pnd.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(pnd.probabilities >= 0)

    def test_moment_matches_operator_expectation(self):
        rng = np.random.default_rng(9)
        psi = random_state(rng, (6, 6))
        n = np.diag(np.arange(6.0))
        for p, q in [(1, 0), (0, 1), (2, 1), (1, 2), (2, 2)]:
            op = np.kron(np.linalg.matrix_power(n, p), np.linalg.matrix_power(n, q))
            v = psi.amplitudes.ravel()
            direct = np.vdot(v, op @ v).real
            assert fock.moment(psi, p, q) == pytest.approx(direct, rel=1e-12)

    def test_cutoff_sufficiency(self):
        for s in (0.35, 0.75):
            x = math.tanh(s) ** 2
            tail = x ** 41  # geometric tail mass beyond n = 40
            assert tail < 1e-14
            assert build_tmss(s, 40).leaked_norm == pytest.approx(tail, rel=1e-3, abs=1e-16)


class TestSerialization:
    def test_roundtrip(self):
        psi = fock.superposition({(1, 0): 1.0, (0, 1): 1j}, (3, 2))
        back = FockState.from_json(psi.to_json())
        np.testing.assert_array_equal(back.amplitudes, psi.amplitudes)
        assert back.leaked_norm == psi.leaked_norm

    def test_schema(self):
        data = json.loads(fock.fock_state((1, 0), 2).to_json())
        assert set(data) == {"mode_count", "cutoff", "amplitudes", "leaked_norm"}
        assert data["amplitudes"][3] == [1.0, 0.0]  # row-major: (1, 0) is index 1*3 + 0

    @settings(max_examples=20, deadline=None)
    @given(amps=arrays(np.complex128, (3, 3), elements=st.complex_numbers(max_magnitude=5, allow_nan=False,
                                                                         allow_infinity=False)))
    def test_roundtrip_property(self, amps):
        psi = FockState(amps)
        np.testing.assert_array_equal(FockState.from_json(psi.to_json()).amplitudes, psi.amplitudes)
