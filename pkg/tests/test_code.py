# tests/test_code.py
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polar.channels import is_bec, make_bec, make_bsc, p_w
from polar.codes import (
    ConstructionKind,
    GpCode,
    SignSequence,
    bec_synthetic_erasures,
    column_weights,
    construct,
    construct_polar,
    construct_rm,
    construct_zero_ue,
    encode,
    index_to_signs,
    kron_matrix,
    polar_transform,
    synthetic_bhattacharyya,
    zero_ue_dimension,
)
from polar.documents import ChannelDocument, CodeDocument
from polar.errors import ChannelDocumentError, CodeParameterError, RateOutOfRangeError, ValidationFailure


class TestSigns:
    def test_index_to_signs(self):
        assert str(index_to_signs(1, 2)) == '--'
        assert str(index_to_signs(4, 2)) == '++'
        assert str(index_to_signs(3, 2)) == '+-'
        assert str(index_to_signs(1, 0)) == ''

    @given(st.integers(0, 10).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, 1 << n))))
    def test_round_trip(self, case):
        n, i = case
        assert index_to_signs(i, n).to_index() == i

    def test_rejects_bad_input(self):
        with pytest.raises(CodeParameterError):
            index_to_signs(5, 2)
        with pytest.raises(CodeParameterError):
            SignSequence('+x')


class TestGpCode:
    def test_defaults(self):
        code = GpCode(2, (4, 2))
        assert code.info_set == (2, 4)
        assert code.frozen_bits == (0, 0)
        assert code.N == 4 and code.r == 2 and code.rate == 0.5
        assert code.frozen_set == (1, 3)
        assert code.info_mask.tolist() == [False, True, False, True]

    @pytest.mark.parametrize("kwargs", [
        dict(n=2, info_set=(1, 1)),
        dict(n=2, info_set=(5,)),
        dict(n=2, info_set=(0,)),
        dict(n=1, info_set=(2,), frozen_bits=(0, 1)),
        dict(n=1, info_set=(2,), frozen_bits=(2,)),
        dict(n=-1, info_set=()),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(CodeParameterError):
            GpCode(**kwargs)

    def test_rate_zero(self):
        code = GpCode(2, ())
        assert code.r == 0
        assert encode(code, []).tolist() == [0, 0, 0, 0]


class TestEncoder:
    def test_examples(self):
        assert encode(GpCode(1, (1, 2)), [1, 1]).tolist() == [0, 1]
        assert encode(GpCode(1, (2,), (0,)), [1]).tolist() == [1, 1]
        assert encode(GpCode(3, (4, 6, 7, 8)), [0, 0, 0, 0]).tolist() == [0] * 8

    def test_frozen_bits_enter_codeword(self):
        assert encode(GpCode(1, (2,), (1,)), [0]).tolist() == [1, 0]

    def test_wrong_length(self):
        with pytest.raises(CodeParameterError):
            encode(GpCode(1, (2,)), [1, 0])
        with pytest.raises(CodeParameterError):
            encode(GpCode(1, (2,)), [2])

    @given(st.integers(0, 7).flatmap(
        lambda n: st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n)))
    def test_butterfly_matches_matrix(self, bits):
        v = np.array(bits, dtype=np.uint8)
        n = len(v).bit_length() - 1
        expected = (kron_matrix(n).astype(np.int64) @ v) % 2
        x = polar_transform(v)
        assert x.tolist() == expected.tolist()
        assert polar_transform(x).tolist() == v.tolist()

    def test_recursive_structure(self, rng):
        # 前半段为 G(u1)⊕G(u2)，后半段为 G(u2)
        v = rng.integers(0, 2, size=16).astype(np.uint8)
        left, right = polar_transform(v[:8]), polar_transform(v[8:])
        assert polar_transform(v).tolist() == ((left ^ right).tolist() + right.tolist())

    def test_column_weights(self):
        assert column_weights(3).tolist() == [1, 2, 2, 4, 2, 4, 4, 8]
        assert column_weights(4).tolist() == kron_matrix(4).sum(axis=0).tolist()


class TestConstruction:
    def test_bec_erasures(self):
        assert bec_synthetic_erasures(0.5, 2).tolist() == pytest.approx([0.9375, 0.5625, 0.4375, 0.0625])
        assert synthetic_bhattacharyya(make_bec(0.5), 2).tolist() == pytest.approx([0.9375, 0.5625, 0.4375, 0.0625])

    def test_polar(self):
        assert construct_polar(make_bec(0.5), 1, 1).info_set == (2,)
        assert construct_polar(make_bec(0.5), 2, 1).info_set == (4,)
        assert construct_polar(make_bsc(0.11), 3, 8).info_set == tuple(range(1, 9))
        assert construct_polar(make_bsc(0.11), 3, 0).info_set == ()

    def test_polar_bsc_matches_reliability_order(self):
        code = construct_polar(make_bsc(0.11), 3, 4)
        z = synthetic_bhattacharyya(make_bsc(0.11), 3)
        chosen = z[np.array(code.info_set) - 1]
        rest = np.delete(z, np.array(code.info_set) - 1)
        assert chosen.max() <= rest.min()
        assert 8 in code.info_set and 1 not in code.info_set

    def test_polar_ties_prefer_smaller_index(self):
        # BEC(0) 所有合成信道完全相同
        assert construct_polar(make_bec(0.0), 2, 2).info_set == (1, 2)

    def test_rm(self):
        assert construct_rm(3, 4).info_set == (4, 6, 7, 8)
        assert construct_rm(4, 1).info_set == (16,)
        assert construct_rm(1, 2).info_set == (1, 2)
        assert construct_rm(3, 4).frozen_bits == (0, 0, 0, 0)

    def test_dimension_out_of_range(self):
        with pytest.raises(CodeParameterError):
            construct_rm(2, 5)

    def test_zero_ue(self):
        W = make_bec(0.3)
        code = construct_zero_ue(W, 1, 0.5)
        assert code.info_set == (2,)
        assert code.r == zero_ue_dimension(0.5, 1) == 1

    def test_zero_ue_rate_ceiling(self):
        assert zero_ue_dimension(0.3, 3) == 3
        assert zero_ue_dimension(0.5, 3) == 4
        assert zero_ue_dimension(0.0, 3) == 0

    def test_zero_ue_on_mixture_uses_i0(self, mixed_channel):
        code = construct_zero_ue(mixed_channel, 4, 0.5)
        assert code.r == 8
        assert code.info_set == construct_polar(make_bec(1.0 - p_w(mixed_channel, 0.0)), 4, 8).info_set

    def test_zero_ue_rejects_rate(self):
        with pytest.raises(RateOutOfRangeError):
            construct_zero_ue(make_bsc(0.11), 3, 0.1)
        with pytest.raises(RateOutOfRangeError):
            construct_zero_ue(make_bec(0.3), 3, 0.7)

    def test_dispatch(self):
        assert construct(ConstructionKind.RM, 3, rate=0.5).info_set == (4, 6, 7, 8)
        assert construct("polar", 1, make_bec(0.5), r=1).info_set == (2,)
        with pytest.raises(CodeParameterError):
            construct("polar", 1, r=1)
        with pytest.raises(CodeParameterError):
            construct("zero_ue", 1, make_bec(0.5))


class TestDocuments:
    def test_channel_document_forms(self):
        assert is_bec(ChannelDocument.parse('{"bec": 0.3}').to_mixture())
        W = ChannelDocument.parse({"mixture": [{"p": 0.6, "eps": 0.0}, {"p": 0.4, "eps": 0.2}]}).to_mixture()
        assert p_w(W, 0.0) == pytest.approx(0.6)
        assert ChannelDocument.from_mixture(make_bsc(0.11)).bsc == pytest.approx(0.11)
        assert ChannelDocument.from_mixture(make_bec(0.3)).bec == pytest.approx(0.3)

    @pytest.mark.parametrize("doc", [
        {"bec": 0.3, "bsc": 0.1},
        {},
        {"bec": 1.5},
        {"mixture": []},
        {"mixture": [{"p": 0.5, "eps": 0.1}, {"p": 0.4, "eps": 0.2}]},
    ])
    def test_invalid_channel_document(self, doc):
        with pytest.raises(ChannelDocumentError):
            ChannelDocument.parse(doc).to_mixture()

    def test_code_document_round_trip(self, tmp_path):
        code = GpCode(3, (4, 6, 7, 8), (0, 1, 0, 1))
        doc = code.to_document(ConstructionKind.RM, make_bec(0.5))
        path = tmp_path / "code.json"
        path.write_text(doc.model_dump_json(), encoding="utf-8")
        loaded = CodeDocument.parse(str(path))
        assert loaded.to_code() == code
        assert loaded.construction == ConstructionKind.RM
        assert loaded.channel.bec == pytest.approx(0.5)
        assert GpCode.from_document(json.loads(path.read_text())) == code

    def test_invalid_code_document(self):
        with pytest.raises(CodeParameterError):
            CodeDocument.parse('{"n": 2}')
        with pytest.raises(CodeParameterError):
            CodeDocument.parse('{"n": 1, "info_set": [3]}').to_code()
        with pytest.raises(ValidationFailure):
            CodeDocument.parse('/no/such/file.json')
