# tests/test_channel.py
import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from polar.analysis import bic_process
from polar.channels import (
    BscMixture,
    Exactness,
    MixtureForm,
    bec_erasure,
    canonicalize,
    degrade,
    is_bec,
    m,
    make_bec,
    make_bsc,
    naturalize,
    p_w,
    params,
    star,
    synthesize,
    synthesize_all,
    total_variation,
    transform_minus,
    transform_plus,
)
from polar.channels.transforms import _pair_loss
from polar.codes import bec_synthetic_erasures
from polar.errors import ChannelDocumentError, CodeParameterError


def components(W):
    return [(p, e.value) for p, e in W.components]


def sequential_merge(W, l_max):
    """逐步重算全部相邻对、合并第一个最小损失对的参照退化"""
    c = canonicalize(W)
    plain = c.exact == Exactness.NONE
    p, e = c.masses[plain].tolist(), c.eps[plain].tolist()
    target = max(1, l_max - int((~plain).sum()))
    lost = 0.0
    while len(p) > target:
        pairs = [_pair_loss(p[k], e[k], p[k + 1], e[k + 1]) for k in range(len(p) - 1)]
        k = min(range(len(pairs)), key=lambda j: pairs[j][0])
        loss, mp, me = pairs[k]
        p[k:k + 2] = [mp]
        e[k:k + 2] = [me]
        lost += loss
    return p, e, lost


def wide_mixture(rng, k=400):
    """k 个随机分量，另加精确 0 与 1/2 分量各一个"""
    masses = rng.dirichlet(np.ones(k + 2))
    eps = np.concatenate([rng.uniform(1e-4, 0.4999, size=k), [0.0, 0.5]])
    return BscMixture.from_components(list(zip(masses.tolist(), eps.tolist())))


@st.composite
def mixtures(draw, max_components=5):
    """随机有限 BSC 混合，包含带精确标记的 0 与 1/2 分量"""
    k = draw(st.integers(1, max_components))
    weights = draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k))
    eps = draw(st.lists(
        st.one_of(st.sampled_from([0.0, 0.5, 1.0]), st.floats(1e-3, 1.0 - 1e-3)),
        min_size=k, max_size=k,
    ))
    total = sum(weights)
    return BscMixture.from_components([(w / total, e) for w, e in zip(weights, eps)])


class TestScalarOps:
    def test_star(self):
        assert star(0.5, 0.123).value == 0.5
        assert star(0.5, 0.123).exact == Exactness.HALF
        assert star(0.0, 0.0).value == 0.0
        assert star(0.25, 0.25).value == pytest.approx(0.375)

    def test_m(self):
        assert m(0.9).value == pytest.approx(0.1)
        assert m(0.5).value == 0.5
        assert m(0.0).value == 0.0
        assert m(1.0).exact == Exactness.ZERO

    def test_rejects_out_of_range(self):
        with pytest.raises(ChannelDocumentError):
            make_bsc(1.5)
        with pytest.raises(ChannelDocumentError):
            make_bec(-0.1)


class TestDecompositions:
    def test_make_bec(self):
        assert components(make_bec(0.3)) == [(pytest.approx(0.7), 0.0), (0.3, 0.5)]
        assert components(make_bec(0.0)) == [(1.0, 0.0)]
        assert components(make_bsc(0.11)) == [(1.0, 0.11)]

    def test_bec_flags(self):
        W = make_bec(0.3)
        assert list(W.exact) == [Exactness.ZERO, Exactness.HALF]
        assert is_bec(W)
        assert not is_bec(make_bsc(0.11))

    def test_mass_must_sum_to_one(self):
        with pytest.raises(ChannelDocumentError):
            BscMixture.from_components([(0.5, 0.1), (0.4, 0.2)])

    def test_naturalize(self):
        W = naturalize(BscMixture.from_components([(0.5, 0.9), (0.5, 0.1)]))
        assert np.allclose(W.eps, [0.1, 0.1])
        W = naturalize(BscMixture.from_components([(0.3, 1.0), (0.7, 0.2)]))
        assert W.eps[0] == 0.0 and W.exact[0] == Exactness.ZERO
        assert W.form == MixtureForm.NATURAL

    def test_canonicalize_merges_complements(self):
        W = canonicalize(BscMixture.from_components([(0.4, 0.2), (0.6, 0.8)]))
        assert len(W) == 1
        assert W.masses[0] == pytest.approx(1.0)
        assert W.eps[0] == pytest.approx(0.2)

    def test_canonicalize_keeps_exact_zero_apart(self):
        W = canonicalize(BscMixture.from_components([(0.5, 0.0), (0.5, 1e-15)]), merge_tol=1e-12)
        assert len(W) == 2
        assert p_w(W, 0.0) == pytest.approx(0.5)

    def test_canonicalize_bec_unchanged(self):
        W = canonicalize(make_bec(0.3))
        assert components(W) == components(make_bec(0.3))

    def test_p_w(self):
        assert p_w(make_bec(0.3), 0.0) == pytest.approx(0.7)
        assert p_w(make_bsc(0.11), 0.11) == pytest.approx(1.0)
        assert p_w(make_bec(0.3), 0.25) == 0.0

    def test_params(self):
        prm = params(make_bec(0.3))
        assert prm.i0_gp == pytest.approx(0.7)
        assert prm.eps_bic == 0.5
        assert prm.capacity == pytest.approx(0.7)
        assert prm.bhattacharyya == pytest.approx(0.3)

        prm = params(make_bsc(0.11))
        assert prm.i0_gp == 0.0
        assert prm.eps_bic == pytest.approx(0.11)

        prm = params(make_bec(0.0))
        assert (prm.i0_gp, prm.eps_bic, prm.capacity) == (1.0, 0.0, 1.0)

    @given(mixtures())
    def test_canonical_form_properties(self, W):
        c = canonicalize(W)
        assert abs(c.masses.sum() - 1.0) < 1e-12
        assert np.all(c.eps <= 0.5)
        plain = c.eps[c.exact == Exactness.NONE]
        assert np.all(np.diff(plain) > 0)
        again = canonicalize(c)
        assert len(again) == len(c)
        assert np.allclose(again.masses, c.masses, rtol=0, atol=1e-15)
        assert np.allclose(again.eps, c.eps, rtol=0, atol=1e-15)


class TestTransforms:
    def test_minus(self):
        assert total_variation(transform_minus(make_bec(0.5)), make_bec(0.75)) < 1e-12
        assert is_bec(transform_minus(make_bec(0.5)))
        assert components(transform_minus(make_bsc(0.25))) == [(1.0, pytest.approx(0.375))]
        assert components(transform_minus(make_bec(0.0))) == [(1.0, 0.0)]

    def test_plus(self):
        assert total_variation(transform_plus(make_bec(0.5)), make_bec(0.25)) < 1e-12
        W = transform_plus(make_bsc(0.25))
        assert components(W) == [(pytest.approx(0.625), pytest.approx(0.1)), (pytest.approx(0.375), 0.5)]
        assert W.exact[-1] == Exactness.HALF
        assert components(transform_plus(make_bec(0.0))) == [(1.0, 0.0)]

    def test_synthesize(self):
        assert total_variation(synthesize(make_bec(0.5), '++'), make_bec(0.0625)) < 1e-12
        assert total_variation(synthesize(make_bec(0.5), '-+'), make_bec(0.5625)) < 1e-12
        W = BscMixture.from_components([(0.4, 0.2), (0.6, 0.8)])
        assert components(synthesize(W, '')) == components(canonicalize(W))

    def test_synthesize_rejects_bad_sign(self):
        with pytest.raises(CodeParameterError):
            synthesize(make_bec(0.5), 'x')

    def test_synthesize_all_order(self):
        # 子信道位于 2j（'-'）与 2j+1（'+'）
        erasures = [params(ch).bhattacharyya for ch in synthesize_all(make_bec(0.5), 2)]
        assert erasures == pytest.approx([0.9375, 0.5625, 0.4375, 0.0625])

    @given(mixtures())
    @hsettings(max_examples=60)
    def test_i0_evolution_is_exact(self, W):
        i0 = params(W).i0_gp
        assert params(transform_minus(W)).i0_gp == pytest.approx(i0 * i0, abs=1e-12)
        assert params(transform_plus(W)).i0_gp == pytest.approx(2 * i0 - i0 * i0, abs=1e-12)

    @given(mixtures())
    @hsettings(max_examples=60)
    def test_capacity_and_bhattacharyya(self, W):
        prm = params(W)
        minus, plus = params(transform_minus(W)), params(transform_plus(W))
        assert minus.capacity + plus.capacity == pytest.approx(2 * prm.capacity, abs=1e-10)
        assert plus.bhattacharyya == pytest.approx(prm.bhattacharyya ** 2, abs=1e-7)
        assert minus.bhattacharyya <= 2 * prm.bhattacharyya - prm.bhattacharyya ** 2 + 1e-9

    @given(mixtures())
    @hsettings(max_examples=40)
    def test_transforms_keep_canonical_form(self, W):
        for out in (transform_minus(W), transform_plus(W)):
            assert out.form == MixtureForm.CANONICAL
            assert abs(out.masses.sum() - 1.0) < 1e-12


class TestEvolutionIdentities:
    """固定种子的 100 个随机混合（每个至多 8 个分量）上的精确演化恒等式"""

    def test_i0_and_martingale(self, random_mixtures):
        for W in random_mixtures:
            i0 = params(W).i0_gp
            minus, plus = params(transform_minus(W)).i0_gp, params(transform_plus(W)).i0_gp
            assert minus == pytest.approx(i0 * i0, abs=1e-12)
            assert plus == pytest.approx(2 * i0 - i0 * i0, abs=1e-12)
            assert minus + plus == pytest.approx(2 * i0, abs=1e-12)

    def test_capacity_conservation(self, random_mixtures):
        for W in random_mixtures:
            total = params(transform_minus(W)).capacity + params(transform_plus(W)).capacity
            assert total == pytest.approx(2 * params(W).capacity, abs=1e-10)

    def test_eps_bic_recursions(self, random_mixtures):
        for W in random_mixtures:
            prm = params(W)
            e = prm.eps_bic
            expected_minus = 2 * e * (1 - e) if prm.i0_gp == 0.0 else e
            expected_plus = e * e / (e * e + (1 - e) * (1 - e))
            minus, plus = params(transform_minus(W)).eps_bic, params(transform_plus(W)).eps_bic
            assert minus == pytest.approx(expected_minus, abs=1e-12)
            assert plus == pytest.approx(expected_plus, abs=1e-12)
            proc = bic_process(W, 1)
            assert proc.eps_bic[0] == pytest.approx(minus, abs=1e-12)
            assert proc.eps_bic[1] == pytest.approx(plus, abs=1e-12)

    def test_independent_of_decomposition(self, random_mixtures):
        # 每个分量拆成两半，其中一半换成互补的 1-ε，信道不变
        for W in random_mixtures:
            split = BscMixture.from_components(
                [(p / 2, e.value) for p, e in W.components]
                + [(p / 2, 1.0 - e.value) for p, e in W.components]
            )
            assert total_variation(split, W) < 1e-12
            assert total_variation(transform_minus(split), transform_minus(W)) < 1e-12
            assert total_variation(transform_plus(split), transform_plus(W)) < 1e-12
            for a, b in ((split, W), (transform_plus(split), transform_plus(W))):
                assert params(a).as_dict() == pytest.approx(params(b).as_dict(), abs=1e-12)

    @pytest.mark.parametrize("eps", [0.3, 0.5, 0.87])
    def test_bec_stays_bec(self, eps, caplog):
        channels = synthesize_all(make_bec(eps), 10)
        expected = bec_synthetic_erasures(eps, 10)
        assert len(channels) == 1024
        for ch, z in zip(channels, expected):
            assert len(ch) <= 2
            assert is_bec(ch)
            assert bec_erasure(ch) == pytest.approx(z, abs=1e-12)
        assert not [r for r in caplog.records if r.levelname == 'WARNING']


class TestDegrade:
    def test_noop_below_limit(self, bsc_011):
        W, lost = degrade(bsc_011, l_max=4)
        assert lost == 0.0
        assert components(W) == components(bsc_011)

    def test_respects_limit_and_keeps_flags(self, mixed_channel):
        W = synthesize(mixed_channel, '+-+', l_max=1024)
        assert len(W) > 6
        degraded, lost = degrade(W, l_max=6)
        assert len(degraded) <= 6
        assert lost >= 0.0
        assert params(degraded).i0_gp == pytest.approx(params(W).i0_gp, abs=1e-12)
        assert p_w(degraded, 0.5) == pytest.approx(p_w(W, 0.5), abs=1e-12)
        assert params(degraded).capacity <= params(W).capacity + 1e-12

    def test_rejects_tiny_limit(self, bsc_011):
        with pytest.raises(CodeParameterError):
            degrade(bsc_011, l_max=1)

    def test_synthesize_bounded(self, bsc_011):
        for ch in synthesize_all(bsc_011, 4, l_max=8):
            assert len(ch) <= 8

    @pytest.mark.parametrize("l_max", [4, 8, 32])
    def test_matches_sequential_greedy(self, rng, l_max):
        W = wide_mixture(rng)
        assert len(canonicalize(W)) > 4 * l_max
        degraded, lost = degrade(W, l_max=l_max)
        p, e, expected_lost = sequential_merge(W, l_max)
        plain = degraded.exact == Exactness.NONE
        assert len(degraded) <= l_max
        assert degraded.masses[plain].tolist() == pytest.approx(p, rel=1e-12, abs=1e-15)
        assert degraded.eps[plain].tolist() == pytest.approx(e, rel=1e-12, abs=1e-15)
        assert lost == pytest.approx(expected_lost, rel=1e-9, abs=1e-15)

    def test_lost_capacity_is_accounted(self, rng):
        W = wide_mixture(rng)
        degraded, lost = degrade(W, l_max=10)
        assert lost > 0.0
        assert params(degraded).capacity == pytest.approx(params(W).capacity - lost, abs=1e-12)
        assert params(degraded).i0_gp == pytest.approx(params(W).i0_gp, abs=1e-12)

    def test_single_warning_when_limit_binds(self, mixed_channel, caplog):
        # W⁺ 有 4 个分量，(W⁺)⁻ 有 7 个
        synthesize(mixed_channel, '+-', l_max=4)
        warnings = [r for r in caplog.records if r.levelname == 'WARNING']
        assert len(warnings) == 1
        assert 'l_max=4' in warnings[0].getMessage()

        caplog.clear()
        synthesize_all(mixed_channel, 2, l_max=4)
        assert len([r for r in caplog.records if r.levelname == 'WARNING']) == 1

    def test_no_warning_without_degradation(self, bsc_011, caplog):
        synthesize(bsc_011, '+-', l_max=1024)
        synthesize_all(bsc_011, 2, l_max=1024)
        assert not [r for r in caplog.records if r.levelname == 'WARNING']
