"""
Tests des suites d'indices et des densités
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaosnds.exceptions import (
    BoundViolationError, ConfigError, ExtensionError, InsufficientSequenceError,
    ParameterError
)
from chaosnds.seqdensity import (
    IndexSequence, PowerGenerator, arithmetic, cesaro_density_equivalence,
    density_one_witness, explicit, merge_schedule, naturals, powers, relative_density
)


class TestIndexSequence:

    def test_not_increasing(self):
        with pytest.raises(ParameterError):
            explicit([3, 1])

    def test_explicit_extension(self):
        with pytest.raises(ExtensionError):
            explicit([0, 1, 2]).prefix(4)

    def test_generator_extension(self):
        squares = powers(2, length=4)
        assert squares.prefix(6).terms.tolist() == [0, 1, 4, 9, 16, 25]
        assert squares.verify()

    def test_after(self):
        evens = arithmetic(0, 2, length=5)
        assert evens.after(7, 3).tolist() == [8, 10, 12]
        assert naturals(4).up_to(9).tolist() == list(range(10))

    def test_after_insufficient(self):
        with pytest.raises(InsufficientSequenceError):
            explicit([1, 5, 9]).after(4, 3)

    @pytest.mark.parametrize("value, terms", [
        ([2, 3, 5], [2, 3, 5]),
        ({"kind": "power", "exponent": 3, "length": 4}, [0, 1, 8, 27]),
        ({"kind": "arithmetic", "a": 1, "step": 2, "length": 3}, [1, 3, 5]),
        ({"kind": "schedule", "recursion": "merge", "depth": 5}, [1, 2, 8, 48, 384]),
        ({"kind": "schedule", "recursion": "checkpoint", "depth": 4}, [1, 2, 6, 30]),
    ])
    def test_from_json(self, value, terms):
        assert IndexSequence.from_json(value).terms.tolist() == terms

    @pytest.mark.parametrize("value", [[1, 1], {"kind": "fibonacci"}, "0,1",
                                       {"kind": "arithmetic", "step": 0}])
    def test_from_json_invalid(self, value):
        with pytest.raises(ConfigError):
            IndexSequence.from_json(value)

    def test_schedule_not_extensible(self):
        merge = IndexSequence.from_json({"kind": "schedule", "recursion": "merge", "depth": 3})
        with pytest.raises(ExtensionError):
            merge.prefix(4)

    @settings(deadline=None, max_examples=100)
    @given(st.integers(0, 10 ** 12), st.integers(2, 4), st.integers(0, 5))
    def test_power_membership(self, value, exponent, start):
        root = round(value ** (1.0 / exponent))
        expected = any(r ** exponent == value and r >= start for r in (root - 1, root, root + 1))
        assert bool(PowerGenerator(exponent, start).contains([value])[0]) == expected


class TestRelativeDensity:

    def test_evens(self):
        est = relative_density(arithmetic(0, 2), naturals(), 1000)
        assert est.upper == pytest.approx(0.5, abs=1e-2)
        assert est.lower == pytest.approx(0.5, abs=1e-2)
        assert est.window == 100

    def test_squares_sparse(self):
        est = relative_density(powers(2), naturals(), 10000)
        assert est.upper < 0.02

    def test_checkpoints(self):
        est = relative_density(arithmetic(0, 2), naturals(), 100, checkpoints=[1, 2])
        assert (est.upper, est.lower) == (1.0, 0.5)

    def test_checkpoints_out_of_range(self):
        with pytest.raises(ParameterError):
            relative_density(arithmetic(0, 2), naturals(), 100, checkpoints=[101])

    def test_along_subsequence(self):
        # multiples de 4 le long des pairs
        est = relative_density(arithmetic(0, 4), arithmetic(0, 2), 2000)
        assert est.lower == pytest.approx(0.5, abs=1e-2)


class TestMergeSchedule:

    def test_values(self):
        assert merge_schedule(7) == (1, 2, 8, 48, 384, 3840, 46080)

    def test_invalid(self):
        with pytest.raises(ParameterError):
            merge_schedule(0)


class TestDensityOneWitness:

    @pytest.mark.parametrize("families", [
        [arithmetic(0, 2), arithmetic(0, 3)],
        [powers(2), powers(3)],
    ])
    def test_each_family_reaches_target(self, families):
        witness = density_one_witness(families, rounds=2, base=10)
        Q = witness.sequence
        assert len(witness.blocks) == 4
        for j, family in enumerate(families):
            for block in witness.blocks:
                if block.family != j or block.k != 100:
                    continue
                est = relative_density(family, Q, len(Q), checkpoints=[block.end])
                assert est.upper >= 0.99 - 1e-12

    def test_blocks_increase(self):
        witness = density_one_witness([arithmetic(0, 2), arithmetic(1, 2)], rounds=2, base=4)
        ends = [b.end for b in witness.blocks]
        assert ends == sorted(ends)
        assert ends[-1] == len(witness.sequence)

    def test_short_family(self):
        with pytest.raises(InsufficientSequenceError):
            density_one_witness([explicit(range(10)), arithmetic(1, 2)], rounds=2, base=10)

    def test_no_family(self):
        with pytest.raises(ParameterError):
            density_one_witness([])


class TestCesaro:

    def test_squares_indicator(self):
        horizon = 100000
        a = np.zeros(horizon)
        a[np.arange(math.isqrt(horizon - 1) + 1) ** 2] = 1.0
        result = cesaro_density_equivalence(a, horizon)
        squares = {i * i for i in range(4, math.isqrt(horizon - 1) + 1)}
        assert squares <= set(result.exceptional_set)
        assert set(result.exceptional_set) <= {i * i for i in range(math.isqrt(horizon) + 1)}
        assert result.cesaro_mean_tail == pytest.approx(0.0032, abs=2e-4)
        assert result.exceptional_density < 0.01
        assert result.residual_limit == 0.0
        assert result.mean_vanishes and result.converges_off_exceptional_set
        assert result.equivalent
        assert result.characterizations_agree

    def test_constant_one(self):
        result = cesaro_density_equivalence(np.ones(5000), 5000)
        assert not result.mean_vanishes
        assert not result.converges_off_exceptional_set
        assert result.cesaro_mean_tail == 1.0
        assert not result.equivalent
        assert result.characterizations_agree

    def test_zero(self):
        result = cesaro_density_equivalence(np.zeros(100), 100)
        assert len(result.exceptional_set) == 0
        assert result.cesaro_mean_tail == 0.0

    @pytest.mark.parametrize("a, bound", [
        ([1.0, -1.0, 0.0], None),
        ([1.0, np.inf, 0.0], None),
        ([1.0, 3.0, 0.0], 2.0),
    ])
    def test_bound_violations(self, a, bound):
        with pytest.raises(BoundViolationError):
            cesaro_density_equivalence(a, 3, bound=bound)

    def test_too_short(self):
        with pytest.raises(ExtensionError):
            cesaro_density_equivalence([0.0, 0.0], 3)
