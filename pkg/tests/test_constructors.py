"""
Tests des constructions explicites
"""

from fractions import Fraction

import numpy as np
import pytest

from chaosnds.constructors import (
    CodingAssignment, ConstantInterval, HarmonicIntervals, NestedFamily, PeriodicPointPair,
    build_aapo, build_dc_pair_aapo, build_dc_pair_expanding, build_expanding_point,
    checkpoint_schedule, concatenation_tracer, merge_dc_sequence, schedule_covering, verify_aapo,
    verify_average_shadowing, verify_itinerary, weak_mixing_probe
)
from chaosnds.core import system_from_config
from chaosnds.distchaos import (
    Flag, Tolerances, classify_pair, dc_verdict_dual, estimate_F, profile_from_distances
)
from chaosnds.exceptions import (
    ExpandingConditionError, ExtensionError, ParameterError, PreconditionError, ScheduleError,
    ScheduleOverflowError
)
from chaosnds.seqdensity import arithmetic, explicit, naturals
from chaosnds.symbolic import SymbolSequence, scrambled_block_family

M = (1, 2, 6, 30, 270, 4590, 151470, 9845550)


class TestCheckpointSchedule:

    def test_values(self):
        assert checkpoint_schedule(7).m == M

    def test_blocks(self):
        schedule = checkpoint_schedule(4)
        assert [schedule.block(i) for i in (0, 1, 2, 5, 6, 29, 30)] == [0, 0, 1, 1, 2, 2, 3]
        assert schedule.blocks(np.array([0, 1, 2, 6])).tolist() == [0, 0, 1, 2]
        assert schedule.ratio(0) == Fraction(1, 2)

    def test_overflow(self):
        checkpoint_schedule(11)
        with pytest.raises(ScheduleOverflowError):
            checkpoint_schedule(12)

    def test_negative(self):
        with pytest.raises(ParameterError):
            checkpoint_schedule(-1)

    def test_covering(self):
        assert schedule_covering(100).m[-1] == 270
        assert schedule_covering(270).m[-1] == 4590


class TestPeriodicPair:

    def test_gallery_pair(self, full_shift):
        assert full_shift.pair.verify()

    def test_not_periodic(self, logistic):
        pair = PeriodicPointPair(logistic.system, 0.3, 0.75, (1, 1), 0.1, 10)
        with pytest.raises(PreconditionError):
            pair.verify()

    def test_separation(self, logistic):
        pair = PeriodicPointPair(logistic.system, 0.0, 0.75, (1, 1), 0.4, 10)
        with pytest.raises(PreconditionError):
            pair.verify()


class TestAapo:

    @pytest.fixture
    def shift_po(self, full_shift):
        base = full_shift.system.domain.base_points(16)
        return build_aapo(full_shift.pair, SymbolSequence.periodic("01"), base,
                          checkpoint_schedule(5), M[5])

    def test_pseudo_orbit_mean(self, shift_po):
        assert verify_aapo(shift_po, [M[5]])[0] <= 2 * 5 / M[5]

    def test_shadowing(self, shift_po):
        tracer = concatenation_tracer(shift_po)
        shadow = verify_average_shadowing(shift_po, tracer, [M[4], M[5]])
        assert shadow[-1] <= 0.05

    def test_source_order(self, shift_po, full_shift):
        base = full_shift.system.domain.base_points(2)
        x, y = full_shift.pair.x, full_shift.pair.y
        assert shift_po.source == (base[0], x, base[0], base[1], x, y)

    @pytest.mark.slow
    def test_shadowing_long(self, full_shift):
        base = full_shift.system.domain.base_points(16)
        po = build_aapo(full_shift.pair, SymbolSequence.periodic("01"), base,
                        checkpoint_schedule(6), M[6])
        assert verify_aapo(po, [M[6]])[0] <= 14 / M[6]
        assert verify_average_shadowing(po, concatenation_tracer(po), [M[6]])[0] <= 0.05

    def test_interval_system(self, logistic):
        base = logistic.system.domain.base_points(8)
        po = build_aapo(logistic.pair, SymbolSequence.periodic("01"), base,
                        checkpoint_schedule(4), M[4])
        assert len(po.points) == M[4] + 1
        assert verify_aapo(po, [M[4]])[0] <= 2 * 4 / M[4]
        with pytest.raises(ParameterError):
            concatenation_tracer(po)

    def test_schedule_too_short(self, full_shift):
        base = full_shift.system.domain.base_points(4)
        with pytest.raises(ScheduleError):
            build_aapo(full_shift.pair, SymbolSequence.constant(0), base,
                       checkpoint_schedule(3), 31)

    def test_dc_pair(self, full_shift):
        base = full_shift.system.domain.base_points(16)
        result = build_dc_pair_aapo(full_shift.pair, SymbolSequence.periodic("01"),
                                    SymbolSequence.constant(1), base, checkpoint_schedule(4),
                                    M[4])
        assert result.profile.horizon == M[4] + 1
        assert result.tracers[0] != result.tracers[1]

    def test_dc_pair_separated_blocks(self, full_shift):
        base = full_shift.system.domain.base_points(16)
        schedule = checkpoint_schedule(5)
        result = build_dc_pair_aapo(full_shift.pair, SymbolSequence.periodic("01"),
                                    SymbolSequence.constant(1), base, schedule, M[5])
        d = result.profile.distances
        delta = full_shift.pair.delta
        separated = 0
        for n, (u, v) in enumerate(zip(result.first.source, result.second.source)):
            lo = schedule.start(n)
            hi = schedule.m[n + 1] if n + 1 < len(schedule.m) else M[5] + 1
            if u != v:
                interior = d[lo:hi - 8]
                assert np.all(interior > 2 * delta)
                separated += len(interior)
            elif hi <= M[5]:
                # mêmes symboles jusqu'à la fin du bloc
                steps = np.arange(lo, hi)
                assert np.all(d[lo:hi] <= 2.0 ** (1 + steps - hi) + 1e-12)
        assert separated > 4000

    def test_dc_pair_same_codes(self, full_shift):
        code = SymbolSequence.constant(1)
        with pytest.raises(ParameterError):
            build_dc_pair_aapo(full_shift.pair, code, code, [], checkpoint_schedule(2), 6)


class TestNestedFamily:

    def test_gallery_families(self, expanding, doubling):
        report = expanding.family.verify(expanding.system, 32)
        assert report.shrinking and report.disjoint_at == 1
        assert not doubling.family.verify(doubling.system, 8).shrinking

    def test_expansion_violated(self, doubling):
        family = NestedFamily(HarmonicIntervals('left'), HarmonicIntervals('right'))
        with pytest.raises(ExpandingConditionError):
            family.verify(doubling.system, 4)

    def test_gap(self, doubling):
        assert doubling.family.gap(1, 10) == Fraction(1, 16)


class TestExpandingPair:

    def test_sync_then_split(self, expanding):
        alpha = SymbolSequence.from_json("(0)")
        beta = SymbolSequence.from_json("000001(0)")
        pair = build_dc_pair_expanding(expanding.family, expanding.system, alpha, beta, M[6])
        assert pair.delta == 0.5
        assert verify_itinerary(pair.first, expanding.family, expanding.system) <= 1e-9
        assert np.all(pair.error_bounds()[:-8] <= 1e-12)

        profile = pair.profile()
        assert estimate_F(profile, 0.01, checkpoints=[M[5]]).upper_F >= 0.95
        assert estimate_F(profile, pair.delta, checkpoints=[M[6]]).lower_F <= 0.031
        checkpoints = [M[5], M[6]]
        verdict = classify_pair(profile, pair.delta, checkpoints=checkpoints)
        assert verdict.li_yorke is Flag.HOLDS
        assert verdict.dc_delta_pair is Flag.HOLDS
        assert dc_verdict_dual(profile, pair.delta, checkpoints=checkpoints).agreement is True

    def test_doubling_family(self, doubling):
        alpha = SymbolSequence.from_json("(0)")
        beta = SymbolSequence.from_json("000001(0)")
        pair = build_dc_pair_expanding(doubling.family, doubling.system, alpha, beta, M[6])
        assert pair.delta == 1 / 32
        verdict = classify_pair(pair.profile(), pair.delta, checkpoints=[M[5], M[6]])
        assert verdict.dc_delta_pair is Flag.HOLDS

    def test_identical_codes(self, expanding):
        alpha = SymbolSequence.constant(0)
        pair = build_dc_pair_expanding(expanding.family, expanding.system, alpha, alpha, 100)
        assert pair.points[0] == pair.points[1]

    def test_straddling_breakpoint(self, doubling):
        family = NestedFamily(ConstantInterval(Fraction(0), Fraction(3, 4)), doubling.family.b)
        coding = CodingAssignment(SymbolSequence.constant(0), checkpoint_schedule(3))
        with pytest.raises(ExpandingConditionError, match="morceau"):
            build_expanding_point(family, coding, doubling.system, 10)

    def test_never_disjoint(self, doubling):
        whole = ConstantInterval(Fraction(0), Fraction(1))
        with pytest.raises(ParameterError):
            build_dc_pair_expanding(NestedFamily(whole, whole), doubling.system,
                                    SymbolSequence.constant(0), SymbolSequence.constant(1), 10)

    @pytest.mark.slow
    def test_block_family_pair(self, expanding):
        alpha, beta = scrambled_block_family(2, seed=5)
        assert alpha.bit(5) == beta.bit(5)
        assert alpha.bit(6) != beta.bit(6)
        pair = build_dc_pair_expanding(expanding.family, expanding.system, alpha, beta, M[7])
        verdict = classify_pair(pair.profile(), pair.delta, Tolerances(),
                                checkpoints=[M[6], M[7]])
        assert verdict.dc_delta_pair is Flag.HOLDS


class TestMerge:

    def test_acceptance(self):
        T = merge_dc_sequence(arithmetic(0, 2), arithmetic(1, 2), 7)
        assert len(T) == 46080
        terms = T.terms.astype(np.float64)
        d = np.where(T.sources == 0, 1.0 / (terms / 2.0 + 1.0), 0.6)
        profile = profile_from_distances(d, indices=T)
        tol = Tolerances(0.15, 0.15)
        checkpoints = [3840, 46080]
        assert estimate_F(profile, 0.01, checkpoints=[3840]).upper_F == pytest.approx(0.9)
        verdict = classify_pair(profile, 0.5, tol, checkpoints=checkpoints)
        assert verdict.proximal is Flag.HOLDS
        assert verdict.li_yorke is Flag.HOLDS
        assert verdict.dc_pair is Flag.HOLDS
        assert verdict.dc_delta_pair is Flag.HOLDS
        assert dc_verdict_dual(profile, 0.5, tol, checkpoints=checkpoints).agreement is True

    def test_sources(self):
        T = merge_dc_sequence(arithmetic(0, 2), arithmetic(1, 2), 4)
        assert len(T) == 48
        assert T.sources.tolist() == [0] * 2 + [1] * 6 + [0] * 40
        assert np.all(np.diff(T.terms) > 0)

    def test_single_term(self):
        assert merge_dc_sequence(arithmetic(3, 2), arithmetic(0, 2), 1).terms.tolist() == [3]

    def test_overlap(self):
        with pytest.raises(PreconditionError):
            merge_dc_sequence(naturals(), naturals(), 4)

    def test_regenerates(self):
        T = merge_dc_sequence(arithmetic(0, 2), arithmetic(1, 2), 4)
        assert T.verify()

    def test_short_explicit(self):
        P = explicit(range(0, 40, 2))
        assert len(merge_dc_sequence(P, arithmetic(1, 2), 3)) == 8
        with pytest.raises(ExtensionError):
            merge_dc_sequence(P, arithmetic(1, 2), 4)

    def test_regeneration_limited(self):
        T = merge_dc_sequence(arithmetic(0, 2), arithmetic(1, 2), 3)
        with pytest.raises(ExtensionError):
            T.prefix(9)


class TestWeakMixing:

    def test_whole_domain(self, doubling):
        whole = (0.0, 1.0)
        assert weak_mixing_probe(doubling.system, [whole] * 4, 8) == 1

    def test_doubling_mixes(self, doubling):
        opens = [(0.1, 0.12), (0.3, 0.32), (0.7, 0.72), (0.05, 0.07)]
        n = weak_mixing_probe(doubling.system, opens, 64)
        assert n is not None and 1 <= n <= 64

    def test_invariant_halves(self):
        system = system_from_config({"kind": "piecewise-linear", "breakpoints": [
            [0, 0], ["1/4", "1/2"], ["1/2", "1/2"], ["3/4", 1], [1, "1/2"]]})
        opens = [(0.1, 0.2), (0.6, 0.7), (0.1, 0.2), (0.1, 0.2)]
        assert weak_mixing_probe(system, opens, 64) is None

    def test_needs_interval(self, full_shift):
        with pytest.raises(ParameterError):
            weak_mixing_probe(full_shift.system, [(0, 1)] * 4, 4)
