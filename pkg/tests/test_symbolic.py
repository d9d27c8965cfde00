"""
Tests de l'espace symbolique
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaosnds.exceptions import ConfigError, ParameterError
from chaosnds.symbolic import (
    SymbolSequence, agreement_counts, block_of, block_window_check,
    cylinder_diag_distance, rho, scrambled_block_family, shift
)

binary = st.text(alphabet="01", max_size=12)
patterns = st.text(alphabet="01", min_size=1, max_size=6)


@st.composite
def sequences(draw):
    prefix = draw(binary)
    if draw(st.booleans()):
        return SymbolSequence.periodic(draw(patterns), prefix=prefix)
    return SymbolSequence.generator(draw(st.integers(0, 2 ** 32)), prefix=prefix)


class TestSequence:

    def test_compact_form(self):
        alpha = SymbolSequence.from_json("0110(01)")
        assert alpha.bits(0, 8).tolist() == [0, 1, 1, 0, 0, 1, 0, 1]
        assert str(alpha) == "0110(01)"

    @pytest.mark.parametrize("value", ["abc", "01", "(2)", 3, {"tail": {"kind": "x"}}])
    def test_invalid_json(self, value):
        with pytest.raises(ConfigError):
            SymbolSequence.from_json(value)

    def test_negative_shift(self):
        with pytest.raises(ParameterError):
            SymbolSequence.constant(0).shift(-1)

    def test_generator_json(self):
        alpha = SymbolSequence.generator(7, prefix="01").shift(5)
        again = SymbolSequence.from_json(alpha.to_json())
        assert np.array_equal(again.bits(0, 500), alpha.bits(0, 500))

    def test_block_family_json(self):
        alpha = scrambled_block_family(4, seed=3)[2]
        again = SymbolSequence.from_json(alpha.to_json())
        assert again == alpha

    @settings(deadline=None, max_examples=60)
    @given(sequences(), st.integers(0, 40))
    def test_shift_drops_symbols(self, alpha, k):
        assert np.array_equal(shift(alpha, k).bits(0, 64), alpha.bits(k, 64))


class TestRho:

    def test_constant_tails(self):
        assert rho(SymbolSequence.constant(0), SymbolSequence.constant(1)) == (2.0, 0.0, True)

    def test_single_difference(self):
        value = rho(SymbolSequence.from_json("1(0)"), SymbolSequence.from_json("(0)"))
        assert value.value == 1.0
        assert value.exact

    def test_identical(self):
        alpha = SymbolSequence.from_json("01(1)")
        assert rho(alpha, alpha).value == 0.0

    def test_generator_truncated(self):
        alpha, beta = SymbolSequence.generator(1), SymbolSequence.generator(2)
        value = rho(alpha, beta, depth=32)
        assert not value.exact
        assert value.error_bound == 2.0 ** -31

    def test_depth(self):
        with pytest.raises(ParameterError):
            rho(SymbolSequence.constant(0), SymbolSequence.constant(1), depth=0)

    @settings(deadline=None, max_examples=60)
    @given(sequences(), sequences())
    def test_symmetric_and_bounded(self, alpha, beta):
        ab = rho(alpha, beta).value
        assert ab == pytest.approx(rho(beta, alpha).value)
        assert 0.0 <= ab <= 2.0

    @pytest.mark.slow
    @settings(deadline=None, max_examples=10_000)
    @given(sequences(), sequences(), sequences())
    def test_triangle_inequality(self, alpha, beta, gamma):
        ab, bc, ac = rho(alpha, beta), rho(beta, gamma), rho(alpha, gamma)
        slack = 1e-12 + ab.error_bound + bc.error_bound + ac.error_bound
        assert ac.value <= ab.value + bc.value + slack

    @settings(deadline=None, max_examples=200)
    @given(sequences(), sequences())
    def test_shift_lipschitz(self, alpha, beta):
        before, after = rho(alpha, beta).value, rho(shift(alpha), shift(beta)).value
        assert after <= 2.0 * before + 1e-12
        if alpha.bit(0) == beta.bit(0):
            assert after == pytest.approx(2.0 * before, abs=1e-12)

    @pytest.mark.slow
    @settings(deadline=None, max_examples=10_000)
    @given(sequences(), sequences())
    def test_shift_lipschitz_many(self, alpha, beta):
        assert rho(shift(alpha), shift(beta)).value <= 2.0 * rho(alpha, beta).value + 1e-12


class TestDiagonal:

    def test_constant_pair(self):
        alpha, beta = SymbolSequence.constant(0), SymbolSequence.constant(1)
        assert cylinder_diag_distance(alpha, beta) == pytest.approx(1.0)

    @settings(deadline=None, max_examples=60)
    @given(sequences(), sequences())
    def test_bracket(self, alpha, beta):
        total = rho(alpha, beta).value
        value = cylinder_diag_distance(alpha, beta)
        assert total / 2.0 - 1e-12 <= value <= total + 1e-12


class TestBlockFamily:

    def test_block_layout(self):
        k, labelled = block_of(np.arange(7))
        assert k.tolist() == [0, 0, 1, 1, 1, 1, 2]
        assert labelled.tolist() == [True, False, True, True, False, False, True]

    def test_needs_two_members(self):
        with pytest.raises(ParameterError):
            scrambled_block_family(1, seed=0)

    def test_pair_alternates(self):
        alpha, beta = scrambled_block_family(2, seed=11)
        assert alpha.bit(5) == beta.bit(5)
        assert alpha.bit(6) != beta.bit(6)
        assert block_window_check(alpha, beta, 2 ** 14, window_blocks=1)

    @pytest.mark.parametrize("count", [3, 5, 8])
    def test_members_distinct(self, count):
        family = scrambled_block_family(count, seed=count)
        width = max(1, int(np.ceil(np.log2(count))))
        depth = (1 << (width + 2)) - 2
        for i, alpha in enumerate(family):
            for beta in family[i + 1:]:
                assert block_window_check(alpha, beta, 2 ** 16, window_blocks=width)
                assert agreement_counts(alpha, beta, depth)[1] > 0

    def test_deterministic(self):
        assert scrambled_block_family(4, seed=9) == scrambled_block_family(4, seed=9)

    def test_constant_pair_never_agrees(self):
        alpha, beta = SymbolSequence.constant(0), SymbolSequence.constant(1)
        assert agreement_counts(alpha, beta, 10) == (0, 10)
        assert not block_window_check(alpha, beta, 64, window_blocks=2)

    def test_ten_members(self):
        family = scrambled_block_family(10, seed=1)
        assert len(set(family)) == 10
        for i, alpha in enumerate(family):
            assert agreement_counts(alpha, alpha, 10 ** 4) == (10 ** 4, 0)
            for beta in family[i + 1:]:
                agree, disagree = agreement_counts(alpha, beta, 10 ** 4)
                assert agree >= 100 and disagree >= 100
                # fenêtre garantie : width = ⌈log2(10)⌉ = 4 blocs
                assert block_window_check(alpha, beta, 10 ** 4, window_blocks=4)
