# tests/test_decoder.py
import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from polar.channels import BscMixture, make_bec, make_bsc, synthesize, total_variation
from polar.codes import GpCode, encode, index_to_signs
from polar.decoders import (
    Decision,
    DecodeResult,
    LikelihoodPair,
    SceDecoder,
    ThresholdVector,
    as_likelihood_array,
    brute_force_posteriors,
    dt_decide,
    enumerate_synthetic_channel,
    observation_likelihoods,
    posterior_from_likelihoods,
    sce_decode,
    sce_decode_trace,
)
from polar.errors import BlocklengthTooLargeError, CodeParameterError, LikelihoodError
from simulation import sample_outputs

ERASED = (1.0, 1.0)
ZERO = (1.0, 0.0)
ONE = (0.0, 1.0)

CHANNELS = {
    'bec': make_bec(0.4),
    'bsc': make_bsc(0.11),
    'mixture': BscMixture.from_components([(0.6, 0.0), (0.3, 0.1), (0.1, 0.5)]),
}


@st.composite
def codes(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    N = 1 << n
    info = draw(st.sets(st.integers(1, N)))
    frozen = draw(st.lists(st.integers(0, 1), min_size=N - len(info), max_size=N - len(info)))
    return GpCode(n, tuple(info), tuple(frozen))


class TestDtDecoder:
    def test_examples(self):
        assert dt_decide(LikelihoodPair(0.3, 0.0), 0.0) == Decision.ZERO
        assert dt_decide(LikelihoodPair(0.3, 0.0), 0.5) == Decision.ZERO
        assert dt_decide(LikelihoodPair(0.5, 0.5), 0.25) == Decision.ERASURE
        assert dt_decide(LikelihoodPair(0.1, 0.9), 0.1) == Decision.ONE

    def test_zero_threshold_needs_certainty(self):
        assert dt_decide(LikelihoodPair(1e-300, 1.0), 0.0) == Decision.ERASURE
        assert dt_decide(LikelihoodPair(0.0, 1e-300), 0.0) == Decision.ONE

    def test_half_threshold_always_decides(self):
        assert dt_decide(LikelihoodPair(0.5, 0.5), 0.5) == Decision.ONE
        assert dt_decide(LikelihoodPair(0.6, 0.4), 0.5) == Decision.ZERO

    def test_invalid(self):
        with pytest.raises(CodeParameterError):
            dt_decide(LikelihoodPair(0.5, 0.5), 0.6)
        with pytest.raises(LikelihoodError):
            LikelihoodPair(0.0, 0.0)
        with pytest.raises(LikelihoodError):
            LikelihoodPair(-0.1, 1.0)

    def test_normalized(self):
        p = LikelihoodPair(0.2, 0.8).normalized()
        assert (p.l0, p.l1) == (pytest.approx(0.25), 1.0)
        assert p.l1 / (p.l0 + p.l1) == pytest.approx(0.8)


class TestThresholdVector:
    def test_constructors(self):
        code = GpCode(2, (2, 4))
        assert ThresholdVector.zero(code).is_zero
        assert ThresholdVector.uniform(code, 0.1).as_list(code) == [0.1, 0.1]
        assert ThresholdVector.from_sequence(code, [0.0, 0.2]).to_array(code).tolist() == [0, 0, 0, 0.2]

    def test_invalid(self):
        code = GpCode(2, (2, 4))
        with pytest.raises(CodeParameterError):
            ThresholdVector.uniform(code, 0.7)
        with pytest.raises(CodeParameterError):
            ThresholdVector.from_sequence(code, [0.1])
        with pytest.raises(CodeParameterError):
            ThresholdVector({1: 0.0, 2: 0.0}).to_array(code)

    def test_decode_result(self):
        assert DecodeResult.erasure(3).is_erasure
        assert not DecodeResult(message=(0, 1)).is_erasure
        with pytest.raises(ValueError):
            DecodeResult()


class TestLikelihoods:
    def test_normalization_and_floor(self):
        L = as_likelihood_array([(2.0, 1.0), (0.0, 3.0), (1e-320, 1.0)], 3)
        assert L[0].tolist() == [1.0, 0.5]
        assert L[1].tolist() == [0.0, 1.0]
        assert L[2, 0] > 0.0

    @pytest.mark.parametrize("L", [
        [(1.0, 0.0)],
        [(1.0, 0.0), (0.0, 0.0)],
        [(1.0, -1.0), (1.0, 0.0)],
        [(1.0, np.inf), (1.0, 0.0)],
        [1.0, 0.0],
    ])
    def test_invalid(self, L):
        with pytest.raises(LikelihoodError):
            as_likelihood_array(L, 2)

    def test_observation_likelihoods(self):
        L = observation_likelihoods(make_bec(0.3), [0, 1, 0], [0, 1, 1])
        assert L.tolist() == [
            [pytest.approx(0.7), 0.0],
            [0.15, 0.15],
            [0.0, pytest.approx(0.7)],
        ]
        with pytest.raises(LikelihoodError):
            observation_likelihoods(make_bec(0.3), [2], [0])


class TestSceDecoder:
    def test_repetition_code(self):
        code = GpCode(1, (2,), (0,))
        assert sce_decode(code, [ERASED, ZERO], [0.0]).message == (0,)
        result = sce_decode(code, [ERASED, ERASED], [0.0])
        assert result.is_erasure and result.first_erased_index == 2

    def test_full_rate(self):
        code = GpCode(1, (1, 2))
        assert sce_decode(code, [ZERO, ZERO], [0.0, 0.0]).message == (0, 0)
        assert sce_decode(code, [ONE, ZERO], 0.0).message == (1, 0)
        assert sce_decode(code, [ZERO, ONE]).message == (1, 1)

    def test_frozen_positions_never_erase(self):
        code = GpCode(2, (4,))
        result, trace = sce_decode_trace(code, [ERASED] * 4)
        assert result.first_erased_index == 4
        assert trace.shape == (4, 2)

    def test_trace_stops_at_erasure(self):
        code = GpCode(2, (2, 3, 4))
        result, trace = sce_decode_trace(code, [ERASED] * 4)
        assert result.first_erased_index == 2
        assert trace.shape == (2, 2)
        assert np.all(trace.max(axis=1) == 1.0)

    def test_rate_zero(self):
        assert sce_decode(GpCode(2, ()), [ERASED] * 4).message == ()

    def test_frozen_coset(self, rng, mixed_channel):
        base = GpCode(3, (4, 6, 7, 8))
        code = base.with_frozen([1, 0, 1, 1])
        assert code.info_set == base.info_set
        u = [1, 1, 0, 1]
        x = encode(code, u)
        noiseless = [ONE if b else ZERO for b in x]
        assert sce_decode(code, noiseless).message == tuple(u)
        # 同一消息在不同陪集中的码字不同
        assert not np.array_equal(x, encode(base, u))

        decoder = SceDecoder(code)
        for _ in range(50):
            msg = rng.integers(0, 2, size=code.r)
            L = observation_likelihoods(mixed_channel, *sample_outputs(mixed_channel, encode(code, msg), rng))
            result = decoder.decode(L)
            assert result.is_erasure or result.message == tuple(int(b) for b in msg)

    def test_wrong_length(self):
        with pytest.raises(LikelihoodError):
            sce_decode(GpCode(2, (4,)), [ZERO] * 3)

    def test_degenerate_channel_erases_first_info(self, rng):
        # I_0 = 0 时零阈值下每次都在第一个信息位擦除
        W = make_bsc(0.11)
        code = GpCode(3, (4, 6, 7, 8))
        decoder = SceDecoder(code)
        for _ in range(20):
            x = encode(code, rng.integers(0, 2, size=code.r))
            components, y = sample_outputs(W, x, rng)
            result = decoder.decode(observation_likelihoods(W, components, y))
            assert result.first_erased_index == 4

    def test_decoder_reuse_matches_function(self, rng, mixed_channel):
        code = GpCode(3, (4, 6, 7, 8))
        decoder = SceDecoder(code, 0.1)
        for _ in range(10):
            x = encode(code, rng.integers(0, 2, size=code.r))
            L = observation_likelihoods(mixed_channel, *sample_outputs(mixed_channel, x, rng))
            assert decoder.decode(L) == sce_decode(code, L, 0.1)

    @given(codes(), st.sampled_from(sorted(CHANNELS)), st.integers(0, 2**32 - 1))
    @hsettings(max_examples=80)
    def test_zero_threshold_has_no_undetected_errors(self, code, name, seed):
        W = CHANNELS[name]
        rng = np.random.default_rng(seed)
        u = rng.integers(0, 2, size=code.r)
        x = encode(code, u)
        result = sce_decode(code, observation_likelihoods(W, *sample_outputs(W, x, rng)))
        assert result.is_erasure or result.message == tuple(int(b) for b in u)

    @given(st.integers(0, 3), st.integers(0, 2**32 - 1))
    @hsettings(max_examples=40)
    def test_trace_matches_exhaustive_posteriors(self, n, seed):
        rng = np.random.default_rng(seed)
        N = 1 << n
        L = rng.uniform(0.01, 1.0, size=(N, 2))
        code = GpCode(n, tuple(range(1, N + 1)))
        result, trace = sce_decode_trace(code, L, 0.5)
        assert not result.is_erasure
        u_hat = list(result.message)
        for i in range(N):
            expected = posterior_from_likelihoods(L, u_hat[:i])
            assert trace[i].tolist() == [pytest.approx(expected.l0, rel=1e-9), pytest.approx(expected.l1, rel=1e-9)]


class TestOracles:
    def test_brute_force_matches_trace(self, rng):
        # 所有似然严格为正，t = 1/2 时不会出现零后验
        W = BscMixture.from_components([(0.7, 0.05), (0.3, 0.3)])
        code = GpCode(2, (2, 3, 4))
        x = encode(code, [1, 0, 1])
        components, y = sample_outputs(W, x, rng)
        L = observation_likelihoods(W, components, y)
        result, trace = sce_decode_trace(code, L, 0.5)
        u_hat = [0] + list(result.message)
        observations = list(zip(components.tolist(), y.tolist()))
        for i in range(code.N):
            expected = brute_force_posteriors(code, W, observations, u_hat[:i])
            assert trace[i].tolist() == [pytest.approx(expected.l0, rel=1e-9), pytest.approx(expected.l1, rel=1e-9)]

    @pytest.mark.parametrize("name", ['bec', 'bsc', 'mixture'])
    @pytest.mark.parametrize("i", [1, 2, 3, 4])
    def test_enumerated_channel_matches_synthesis(self, name, i):
        W = CHANNELS[name]
        expected = synthesize(W, index_to_signs(i, 2), l_max=4096)
        assert total_variation(enumerate_synthetic_channel(W, 2, i), expected) < 1e-10

    def test_enumerated_bec(self):
        assert total_variation(enumerate_synthetic_channel(make_bec(0.5), 2, 2), make_bec(0.5625)) < 1e-12

    def test_blocklength_limit(self, settings):
        settings.analysis.oracle_max_blocklength = 4
        with pytest.raises(BlocklengthTooLargeError):
            posterior_from_likelihoods(np.ones((8, 2)), [])
