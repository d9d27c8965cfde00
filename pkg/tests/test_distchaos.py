"""
Tests des verdicts de chaos distributionnel et de Li-Yorke
"""

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaosnds.constructors import build_dc_pair_expanding
from chaosnds.core import RealInterval
from chaosnds.distchaos import (
    DiagonalNeighborhood, Flag, Tolerances, classify_pair, dc_verdict_dual, diag_distance,
    estimate_F, flag_and, flag_not, flag_or, hitting_set, pair_profile,
    profile_from_distances, scan_pairs, sequence_for_pairs, write_scan_csv
)
from chaosnds.exceptions import ParameterError
from chaosnds.gallery import load_gallery
from chaosnds.seqdensity import explicit, naturals
from chaosnds.symbolic import SymbolSequence

H, F, U = Flag.HOLDS, Flag.FAILS, Flag.UNDECIDED


class TestFlags:

    @pytest.mark.parametrize("flags, expected", [
        ((H, H), H), ((H, U), U), ((U, F), F), ((F, F), F),
    ])
    def test_and(self, flags, expected):
        assert flag_and(*flags) is expected

    @pytest.mark.parametrize("flags, expected", [
        ((F, F), F), ((F, U), U), ((U, H), H),
    ])
    def test_or(self, flags, expected):
        assert flag_or(*flags) is expected

    def test_not(self):
        assert [flag_not(f) for f in (H, F, U)] == [F, H, U]


class TestTolerances:

    @pytest.mark.parametrize("kwargs", [{"tau_hi": 0.0}, {"tau_lo": 0.5}, {"tau_prox": -1.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ParameterError):
            Tolerances(**kwargs)

    def test_default_proximity(self):
        assert Tolerances().proximity(2.0) == pytest.approx(2e-3)
        assert Tolerances(tau_prox=0.1).proximity(2.0) == 0.1


class TestProfile:

    def test_logistic_orbit(self, logistic):
        profile = pair_profile(logistic.system, 0.5, 0.0, naturals(3))
        assert profile.distances.tolist() == [0.5, 1.0, 0.0]
        assert profile.diag_distances.tolist() == [0.25, 0.5, 0.0]

    def test_diag_distance(self):
        assert diag_distance(0.2, 0.8, RealInterval()) == pytest.approx(0.3)

    def test_restrict(self):
        profile = profile_from_distances(np.arange(10) / 10.0)
        sub = profile.restrict(explicit([1, 4, 9]))
        assert sub.distances.tolist() == [0.1, 0.4, 0.9]

    def test_restrict_outside(self):
        profile = profile_from_distances(np.zeros(5))
        with pytest.raises(ParameterError):
            profile.restrict(explicit([2, 7]))

    def test_empty(self):
        with pytest.raises(ParameterError):
            profile_from_distances([])


class TestEstimate:

    def test_alternating_blocks(self):
        d = np.where((np.arange(10000) // 100) % 2 == 0, 0.0, 1.0)
        est = estimate_F(profile_from_distances(d), 0.5)
        assert est.upper_F == pytest.approx(0.5, abs=0.01)
        assert est.lower_F == pytest.approx(0.5, abs=0.01)

    def test_positive_epsilon(self):
        with pytest.raises(ParameterError):
            estimate_F(profile_from_distances([0.0]), 0.0)

    @settings(deadline=None, max_examples=200)
    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=300),
           st.floats(1e-3, 1.0), st.floats(1e-3, 1.0))
    def test_monotone_in_epsilon(self, distances, e1, e2):
        profile = profile_from_distances(distances)
        small, large = estimate_F(profile, min(e1, e2)), estimate_F(profile, max(e1, e2))
        for est in (small, large):
            assert 0.0 <= est.lower_F <= est.upper_F <= 1.0
        assert small.upper_F <= large.upper_F
        assert small.lower_F <= large.lower_F


class TestClassify:

    def test_fixed_points_distal(self, logistic):
        profile = pair_profile(logistic.system, 0.0, 0.75, naturals(2000))
        verdict = classify_pair(profile, 0.3)
        assert verdict.distal is H
        assert verdict.proximal is F
        assert verdict.li_yorke is F
        assert verdict.dc_pair is F

    def test_identical_orbits(self):
        verdict = classify_pair(profile_from_distances(np.zeros(1000)), 0.1)
        assert verdict.asymptotic is H
        assert verdict.li_yorke is F
        assert verdict.dc_delta_pair is F

    def test_positive_delta(self):
        with pytest.raises(ParameterError):
            classify_pair(profile_from_distances([0.1]), 0.0)

    def test_reconciled(self):
        # F(δ) petit et F* proche de 1 mais la queue ne s'approche jamais assez
        d = np.where(np.arange(1000) < 100, 0.004, 1.0)
        verdict = classify_pair(profile_from_distances(d), 0.5,
                                Tolerances(0.15, 0.15), eps_grid=(0.01,), checkpoints=[100, 1000])
        assert verdict.proximal is F
        assert verdict.li_yorke is not H
        assert verdict.dc_pair is not H
        assert verdict.reconciled


class TestHittingSet:

    def test_open_and_closed(self):
        profile = profile_from_distances([0.1, 0.5, 0.2])
        assert hitting_set(profile, DiagonalNeighborhood(0.1)).hits.terms.tolist() == [0]
        closed = DiagonalNeighborhood(0.1, closed=True)
        assert hitting_set(profile, closed).hits.terms.tolist() == [0, 2]
        assert hitting_set(profile, closed, complement=True).hits.terms.tolist() == [1]

    @settings(deadline=None, max_examples=200)
    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=200),
           st.floats(1e-3, 1.0), st.booleans(), st.booleans(), st.integers(0, 50))
    def test_matches_filter(self, distances, radius, closed, complement, offset):
        indices = explicit([offset + 3 * i for i in range(len(distances))])
        profile = profile_from_distances(distances, indices=indices)
        result = hitting_set(profile, DiagonalNeighborhood(radius, closed), complement)
        expected = [t for t, d in zip(indices, distances)
                    if ((d / 2.0 <= radius) if closed else (d / 2.0 < radius)) != complement]
        assert result.hits.terms.tolist() == expected
        assert result.base.terms.tolist() == indices.terms.tolist()

    @pytest.mark.parametrize("radius", [0.0, -0.1])
    def test_positive_radius(self, radius):
        with pytest.raises(ParameterError):
            DiagonalNeighborhood(radius)


class TestScan:

    def test_thread_count_invariant(self, logistic):
        sample = [0.1, 0.2, 0.3, 0.75]
        one = scan_pairs(logistic.system, sample, naturals(2000), 0.1, threads=1)
        three = scan_pairs(logistic.system, sample, naturals(2000), 0.1, threads=3)
        assert len(one) == 6
        assert [(r.i, r.j) for r in one] == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        assert one == three

    def test_failing_point(self, logistic):
        rows = scan_pairs(logistic.system, [0.1, 1.5, 0.3], naturals(100), 0.1)
        bad = [r for r in rows if r.status != 'ok']
        assert {(r.i, r.j) for r in bad} == {(0, 1), (1, 2)}
        assert all(r.status.startswith('DomainViolationError') for r in bad)

    def test_csv(self, logistic):
        rows = scan_pairs(logistic.system, [0.1, 0.2], naturals(500), 0.1)
        buffer = io.StringIO()
        write_scan_csv(rows, buffer, logistic.system.domain)
        lines = buffer.getvalue().splitlines()
        assert lines[0].startswith('i,j,x,y,horizon')
        assert len(lines) == 2
        assert lines[1].endswith(',ok')

    def test_threads(self, logistic):
        with pytest.raises(ParameterError):
            scan_pairs(logistic.system, [0.1, 0.2], naturals(10), 0.1, threads=0)


class TestSequenceForPairs:

    def test_block_profile(self):
        n = np.arange(20000)
        profile = profile_from_distances(np.where((n // 1000) % 2 == 0, 0.0, 1.0),
                                         indices=naturals(20000))
        result = sequence_for_pairs([profile], 0.1, 0.5, Tolerances(0.1, 0.1),
                                    rounds=2, base=4)
        assert [b.end for b in result.witness.blocks] == [8, 32, 384, 5760]
        dual = result.verdicts[0]
        assert dual.direct_flag is H
        assert dual.hitting_flag is H
        assert dual.agreement is True


class TestDualVerdict:

    def test_far_pair(self):
        dual = dc_verdict_dual(profile_from_distances(np.full(1000, 0.8)), 0.5)
        assert dual.direct_flag is F
        assert dual.hitting_flag is F
        assert dual.agreement is True

    def test_direct_verdict_kept(self):
        profile = profile_from_distances(np.full(1000, 0.8))
        dual = dc_verdict_dual(profile, 0.5)
        assert dual.direct == classify_pair(profile, 0.5)
        assert set(dual.direct.flags()) == set(dual.direct.FLAG_NAMES)
        assert isinstance(dual.hitting_flag, Flag)


GALLERY_IDS = ["logistic-autonomous", "logistic-periodic-r", "tent", "doubling",
               "full-shift", "expanding-family"]


class TestFlagConsistency:

    def test_gallery_scans(self):
        rows = []
        for k, system_id in enumerate(GALLERY_IDS):
            system = load_gallery(system_id).system
            sample = system.domain.sample(np.random.default_rng(k), 20)
            delta = 0.1 * system.domain.diameter()
            rows += scan_pairs(system, sample, naturals(1000), delta, threads=2)
        verdicts = [r.verdict for r in rows if r.status == 'ok']
        assert len(verdicts) >= 1000
        for v in verdicts:
            if v.distal is H:
                assert v.proximal is F
            if v.asymptotic is H:
                assert v.proximal is H
            if v.dc_pair is H:
                assert v.li_yorke is H
            if v.dc_delta_pair is H:
                assert v.dc_pair is H


class TestDualAgreement:

    @pytest.mark.slow
    def test_constructed_pairs_and_controls(self, expanding):
        m5, m6 = 4590, 151470
        agreements = []
        for code in range(50):
            prefix = format(code % 32, '05b')
            low, high = ("0", "1") if code < 32 else ("1", "0")
            alpha = SymbolSequence.from_json(f"{prefix}{low}(0)")
            beta = SymbolSequence.from_json(f"{prefix}{high}(0)")
            pair = build_dc_pair_expanding(expanding.family, expanding.system, alpha, beta, m6)
            dual = dc_verdict_dual(pair.profile(), pair.delta, checkpoints=[m5, m6])
            agreements.append(dual.agreement)

        n = np.arange(20000)
        for c in np.linspace(0.3, 0.9, 25):
            dual = dc_verdict_dual(profile_from_distances(np.full(len(n), c)), 0.25)
            agreements.append(dual.agreement)
        for c in np.linspace(0.1, 1.0, 25):
            dual = dc_verdict_dual(profile_from_distances(c * 0.5 ** np.minimum(n, 60)), 0.25)
            agreements.append(dual.agreement)

        decided = [a for a in agreements if a is not None]
        assert len(decided) >= 95
        assert sum(decided) >= 0.95 * len(decided)
