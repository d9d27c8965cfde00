"""
ChaosNDS - Constructions explicites
Pseudo-orbites moyennes asymptotiques, points codés des familles expansives,
fusion de suites et sonde de mélange faible
"""

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from .constants import (
    CLAMP_TOLERANCE, ENCLOSURE_CHUNK, ENCLOSURE_TARGET_WIDTH, INT64_MAX,
    INTERVAL_WIDTH_TOLERANCE, MAX_LOOKAHEAD, MEMORY_CAP_POINTS, MIXING_SAMPLES
)
from .core import ShiftRule, interval_image
from .distchaos import pair_profile, profile_from_distances
from .exceptions import (
    CapacityError, ExpandingConditionError, ExtensionError, ParameterError, PreconditionError,
    ScheduleError, ScheduleOverflowError
)
from .seqdensity import (
    ArithmeticGenerator, IndexSequence, SequenceGenerator, from_generator, merge_schedule
)
from .symbolic import SymbolSequence

logger = logging.getLogger(__name__)


# ============================================================================
# CALENDRIER DES POINTS DE CONTRÔLE
# ============================================================================

@dataclass(frozen=True)
class CheckpointSchedule:
    """m_0 = 1, m_{n+1} = (2^n + 1) m_n ; le bloc n est [m_n, m_{n+1})"""

    m: tuple

    @property
    def depth(self):
        return len(self.m) - 1

    def ratio(self, n):
        """m_n / m_{n+1} (exact)"""
        return Fraction(self.m[n], self.m[n + 1])

    def block(self, i):
        """Bloc contenant l'instant i (le bloc 0 commence en 0)"""
        return max(0, bisect_right(self.m, i) - 1)

    def blocks(self, i):
        return np.maximum(np.searchsorted(np.array(self.m, dtype=np.int64), i, side='right') - 1, 0)

    def start(self, n):
        return 0 if n == 0 else self.m[n]


def checkpoint_schedule(depth):
    """
    Args:
        depth: dernier indice n calculé

    Returns:
        CheckpointSchedule (m_0, …, m_depth)
    """
    if depth < 0:
        raise ParameterError(f"Profondeur négative: {depth}")
    m = [1]
    for n in range(depth):
        m.append((2 ** n + 1) * m[-1])
        if m[-1] > INT64_MAX:
            raise ScheduleOverflowError(f"m_{n + 1} dépasse la plage int64")
    return CheckpointSchedule(tuple(m))


def schedule_covering(horizon):
    """Plus petit calendrier dont le dernier point dépasse horizon"""
    depth = 0
    while checkpoint_schedule(depth).m[-1] <= horizon:
        depth += 1
    return checkpoint_schedule(depth)


# ============================================================================
# PAIRE DE POINTS PÉRIODIQUES ET PSEUDO-ORBITES
# ============================================================================

def _same_point(system, a, b):
    if system.domain.vectorized:
        return abs(float(a) - float(b)) <= CLAMP_TOLERANCE
    return a == b


@dataclass(frozen=True)
class PeriodicPointPair:
    """
    Points x, y de périodes (p, q) pour la famille, séparés :
    d(f_0^n x, f_0^n y) > 2δ pour tout n ≤ horizon.
    """

    system: Any
    x: Any
    y: Any
    periods: tuple
    delta: float
    horizon: int

    def verify(self):
        """Vérifie périodicité et séparation jusqu'à l'horizon"""
        if self.delta <= 0:
            raise PreconditionError(f"δ doit être positif: {self.delta}")
        p, q = self.periods
        fx, fy = self.x, self.y
        for n in range(1, self.horizon + 1):
            fx = self.system.step(n - 1, fx)
            fy = self.system.step(n - 1, fy)
            if n % p == 0 and not _same_point(self.system, fx, self.x):
                raise PreconditionError(f"x n'est pas {p}-périodique (n={n})")
            if n % q == 0 and not _same_point(self.system, fy, self.y):
                raise PreconditionError(f"y n'est pas {q}-périodique (n={n})")
            if not self.system.domain.distance(fx, fy) > 2 * self.delta:
                raise PreconditionError(f"Séparation > 2δ perdue à n={n}")
        return True


@dataclass(frozen=True)
class PseudoOrbit:
    """x_0, …, x_horizon avec x_i = f_0^i(u_n) pour i dans le bloc n"""

    system: Any
    points: Any
    source: tuple
    schedule: CheckpointSchedule
    horizon: int


def aapo_source(base_points, h, count):
    """
    Les count premiers termes de (e_0, h_0, e_0, e_1, h_0, h_1, e_0, e_1, e_2, …).
    """
    def terms():
        r = 1
        while True:
            for i in range(r):
                if i >= len(base_points):
                    raise ParameterError(f"X_0 tronqué à {len(base_points)} points")
                yield base_points[i]
            for i in range(r):
                yield h(i)
            r += 1

    out = []
    for term in terms():
        if len(out) == count:
            break
        out.append(term)
    return tuple(out)


def build_aapo(pair, code, base_points, schedule, horizon):
    """
    Pseudo-orbite moyenne asymptotique codée par code ∈ Σ₂⁺.

    Args:
        pair: PeriodicPointPair
        code: SymbolSequence (h_i = x si code_i = 0, y sinon)
        base_points: X_0 tronqué
        schedule: CheckpointSchedule
        horizon: dernier instant calculé

    Returns:
        PseudoOrbit
    """
    if horizon < 0:
        raise ParameterError(f"Horizon négatif: {horizon}")
    if horizon > schedule.m[-1]:
        raise ScheduleError(f"Calendrier (m_{schedule.depth} = {schedule.m[-1]}) "
                            f"trop court pour l'horizon {horizon}")
    if horizon + 1 > MEMORY_CAP_POINTS:
        raise CapacityError(f"Horizon {horizon} au-delà de la capacité")
    system = pair.system
    last_block = schedule.block(horizon)
    source = aapo_source(base_points, lambda i: pair.y if code.bit(i) else pair.x,
                         last_block + 1)

    points = (np.empty(horizon + 1, dtype=np.float64) if system.domain.vectorized
              else [None] * (horizon + 1))
    for n, u in enumerate(source):
        start = schedule.start(n)
        stop = horizon + 1 if n == last_block else schedule.m[n + 1]
        x = system.advance(u, 0, start)
        for i in range(start, stop):
            points[i] = x
            if i + 1 < stop:
                x = system.step(i, x)
    logger.info(f"Pseudo-orbite construite: {last_block + 1} blocs, horizon {horizon}")
    return PseudoOrbit(system=system, points=points, source=source,
                       schedule=schedule, horizon=horizon)


def _running_means(errors, checkpoints, horizon):
    for n in checkpoints:
        if not 1 <= n <= horizon:
            raise ParameterError(f"Point de contrôle {n} hors de [1, {horizon}]")
    sums = np.concatenate(([0.0], np.cumsum(errors)))
    return [float(sums[n] / n) for n in checkpoints]


def verify_aapo(po, checkpoints):
    """(1/n) Σ_{i<n} d(f_i(x_i), x_{i+1}) pour chaque n des checkpoints"""
    system, points = po.system, po.points
    errors = np.empty(po.horizon, dtype=np.float64)
    for i in range(po.horizon):
        image = system.step(i, points[i])
        errors[i] = 0.0 if image == points[i + 1] else system.domain.distance(image, points[i + 1])
    return _running_means(errors, checkpoints, po.horizon)


def verify_average_shadowing(po, tracer, checkpoints):
    """(1/n) Σ_{i<n} d(f_0^i(tracer), x_i) pour chaque n des checkpoints"""
    system, points = po.system, po.points
    errors = np.empty(po.horizon, dtype=np.float64)
    z = tracer
    for i in range(po.horizon):
        errors[i] = system.domain.distance(z, points[i])
        z = system.step(i, z)
    return _running_means(errors, checkpoints, po.horizon)


@dataclass(frozen=True)
class ConcatenatedBlocks:
    """Règle de queue : le symbole i est celui de u_n pour i dans le bloc n"""

    source: tuple
    schedule: CheckpointSchedule

    def __call__(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        blocks = np.minimum(self.schedule.blocks(indices), len(self.source) - 1)
        out = np.empty(len(indices), dtype=np.uint8)
        for n in np.unique(blocks):
            mask = blocks == n
            chosen = indices[mask]
            first = int(chosen.min())
            segment = self.source[n].bits(first, int(chosen.max()) - first + 1)
            out[mask] = segment[chosen - first]
        return out


def concatenation_tracer(po):
    """Traceur d'une pseudo-orbite du décalage : recopie les blocs de symboles"""
    if not isinstance(po.system.rule, ShiftRule):
        raise ParameterError("Traceur par concaténation réservé au décalage")
    return SymbolSequence.from_rule(ConcatenatedBlocks(po.source, po.schedule))


@dataclass(frozen=True)
class TracerPair:
    first: PseudoOrbit
    second: PseudoOrbit
    tracers: tuple
    profile: Any


def build_dc_pair_aapo(pair, code_u, code_v, base_points, schedule, horizon):
    """
    Deux codes, deux pseudo-orbites, deux traceurs et le profil de leur paire.
    Des codes qui diffèrent une infinité de fois donnent une paire DC.
    """
    if code_u == code_v:
        raise ParameterError("Les deux codes doivent différer")
    first = build_aapo(pair, code_u, base_points, schedule, horizon)
    second = build_aapo(pair, code_v, base_points, schedule, horizon)
    tracers = (concatenation_tracer(first), concatenation_tracer(second))
    profile = pair_profile(pair.system, tracers[0], tracers[1],
                           from_generator(ArithmeticGenerator(0, 1), horizon + 1))
    return TracerPair(first=first, second=second, tracers=tracers, profile=profile)


# ============================================================================
# FAMILLES EMBOÎTÉES ET POINTS CODÉS
# ============================================================================

@dataclass(frozen=True)
class HarmonicIntervals:
    """[0, 1/(n+offset)] (ancre gauche) ou [1 - 1/(n+offset), 1] (ancre droite)"""

    anchor: str = 'left'
    offset: int = 2

    def __post_init__(self):
        if self.anchor not in ('left', 'right') or self.offset < 1:
            raise ParameterError(f"Intervalles harmoniques invalides: {self}")

    def exact(self, n):
        w = Fraction(1, n + self.offset)
        return (Fraction(0), w) if self.anchor == 'left' else (1 - w, Fraction(1))

    def floats(self, n):
        w = 1.0 / (np.asarray(n, dtype=np.float64) + self.offset)
        if self.anchor == 'left':
            return np.zeros_like(w), w
        return 1.0 - w, np.ones_like(w)

    def limit(self):
        return 0.0 if self.anchor == 'left' else 1.0

    def to_json(self):
        return {'kind': 'harmonic', 'anchor': self.anchor, 'offset': self.offset}


@dataclass(frozen=True)
class ConstantInterval:
    """A_n = [lo, hi] pour tout n"""

    lo: Fraction
    hi: Fraction

    def exact(self, n):
        return self.lo, self.hi

    def floats(self, n):
        shape = np.shape(n)
        return np.full(shape, float(self.lo)), np.full(shape, float(self.hi))

    def limit(self):
        return float(self.lo) if self.lo == self.hi else None

    def to_json(self):
        from .core import number_to_json
        return {'kind': 'constant', 'interval': [number_to_json(self.lo),
                                                  number_to_json(self.hi)]}


@dataclass(frozen=True)
class FamilyReport:
    disjoint_at: Optional[int]
    shrinking: bool
    final_diameter: float


@dataclass(frozen=True)
class NestedFamily:
    """Intervalles fermés A_n, B_n (n ≥ 1) de la condition d'expansion"""

    a: Any
    b: Any

    def interval(self, n, side):
        if n < 1:
            raise ParameterError(f"Les familles commencent à n = 1 (reçu {n})")
        return (self.b if side else self.a).exact(n)

    def first_disjoint(self, limit):
        """Plus petit k ≤ limit tel que A_k ∩ B_k = ∅"""
        for k in range(1, limit + 1):
            (alo, ahi), (blo, bhi) = self.a.exact(k), self.b.exact(k)
            if ahi < blo or bhi < alo:
                return k
        return None

    def limits(self):
        """Points limites a, b (None si la famille ne se réduit pas à un point)"""
        a, b = self.a.limit(), self.b.limit()
        return None if a is None or b is None else (a, b)

    def gap(self, first, last):
        """Plus petit écart entre A_k et B_k pour first ≤ k ≤ last (exact)"""
        gaps = []
        for k in range(first, last + 1):
            (alo, ahi), (blo, bhi) = self.a.exact(k), self.b.exact(k)
            gaps.append(max(blo - ahi, alo - bhi))
        return min(gaps)

    def verify(self, system, depth):
        """
        Vérifie exactement, pour 1 ≤ n ≤ depth :
        A_{n+1} ∪ B_{n+1} ⊆ f_{n-1}(A_n) ∩ f_{n-1}(B_n).

        Returns:
            FamilyReport
        """
        diameters = []
        for n in range(1, depth + 1):
            images = [interval_image(system, n - 1, *self.interval(n, side)) for side in (0, 1)]
            lo = max(img[0] for img in images)
            hi = min(img[1] for img in images)
            for side in (0, 1):
                nlo, nhi = self.interval(n + 1, side)
                if not (lo <= nlo and nhi <= hi):
                    raise ExpandingConditionError(
                        f"Inclusion d'expansion violée au niveau {n} (côté {'AB'[side]})"
                    )
            diameters.append(max(float(h - l) for l, h in
                                 (self.interval(n, 0), self.interval(n, 1))))
        shrinking = (all(b <= a for a, b in zip(diameters, diameters[1:]))
                     and len(diameters) > 1 and diameters[-1] < diameters[0])
        return FamilyReport(disjoint_at=self.first_disjoint(depth), shrinking=shrinking,
                            final_diameter=diameters[-1] if diameters else float('nan'))

    def to_json(self):
        return {'A': self.a.to_json(), 'B': self.b.to_json()}


def nested_family_from_json(value):
    from .core import parse_number

    def rule(obj):
        kind = obj.get('kind')
        if kind == 'harmonic':
            return HarmonicIntervals(obj.get('anchor', 'left'), int(obj.get('offset', 2)))
        if kind == 'constant':
            lo, hi = obj['interval']
            return ConstantInterval(parse_number(lo), parse_number(hi))
        raise ParameterError(f"Type d'intervalles inconnu: {kind}")

    return NestedFamily(a=rule(value['A']), b=rule(value['B']))


@dataclass(frozen=True)
class CodingAssignment:
    """C_1 suit a_0 ; C_j suit a_n pour m_n < j ≤ m_{n+1}"""

    alpha: SymbolSequence
    schedule: CheckpointSchedule

    def sides(self, j):
        """Côté (0 = A, 1 = B) de C_j pour un tableau d'indices j ≥ 1"""
        j = np.asarray(j, dtype=np.int64)
        m = np.array(self.schedule.m, dtype=np.int64)
        if np.any(j > m[-1]):
            raise ScheduleError(f"Calendrier trop court pour C_{int(j.max())}")
        n = np.maximum(np.searchsorted(m, j, side='left') - 1, 0)
        return self.alpha.bits(0, int(n.max()) + 1)[n]


@dataclass(frozen=True, eq=False)
class ExpandingPoint:
    """
    Point x tel que f_0^k(x) ∈ C_{k+1} ; E_k = [lo_k, hi_k] ⊆ C_{k+1}
    enclôt f_0^k(x) pour 0 ≤ k < depth.
    """

    point: float
    lo: np.ndarray
    hi: np.ndarray
    coding: CodingAssignment

    @property
    def depth(self):
        return len(self.lo)

    @property
    def midpoints(self):
        return (self.lo + self.hi) / 2.0

    @property
    def radii(self):
        return (self.hi - self.lo) / 2.0


def _coding_bounds(family, coding, levels):
    """Bornes flottantes (arrondies vers l'extérieur) de C_{k+1}"""
    sides = coding.sides(levels + 1)
    alo, ahi = family.a.floats(levels + 1)
    blo, bhi = family.b.floats(levels + 1)
    lo = np.where(sides == 1, blo, alo)
    hi = np.where(sides == 1, bhi, ahi)
    return np.nextafter(lo, -np.inf), np.nextafter(hi, np.inf)


def _inverse_branches(system, levels, lo, hi):
    """
    Branche inverse affine y -> c + s y de f_k restreinte à C_{k+1}.
    C_{k+1} doit tenir dans un seul morceau non plat de f_k.
    """
    xs, ys = system.rule.breakpoints_array(levels)
    x0, x1, y0, y1 = xs[:, :-1], xs[:, 1:], ys[:, :-1], ys[:, 1:]
    tol = INTERVAL_WIDTH_TOLERANCE
    fits = ((x0 <= lo[:, None] + tol) & (hi[:, None] <= x1 + tol)
            & (x1 > x0) & (y1 != y0))
    found = fits.any(axis=1)
    if not found.all():
        bad = int(levels[np.argmin(found)])
        raise ExpandingConditionError(f"C_{bad + 1} ne tient pas dans un morceau de f_{bad}")
    j = fits.argmax(axis=1)
    rows = np.arange(len(levels))
    s = (x1[rows, j] - x0[rows, j]) / (y1[rows, j] - y0[rows, j])
    c = x0[rows, j] - y0[rows, j] * s
    return c, s


def build_expanding_point(family, coding, system, depth):
    """
    Point codé x ∈ ∩ D_n avec f_0^k(x) ∈ C_{k+1} pour k < depth.

    Les enveloppes E_k sont obtenues par préimages successives :
    E_k = C_{k+1} ∩ f_k^{-1}(E_{k+1}), par blocs vectorisés, avec un nombre de
    pas rétrogrades réglé sur la contraction des branches inverses.

    Returns:
        ExpandingPoint
    """
    if not system.piecewise_linear:
        raise ParameterError("Famille affine par morceaux requise")
    if depth < 1:
        raise ParameterError(f"Profondeur invalide: {depth}")
    if 2 * depth > MEMORY_CAP_POINTS:
        raise CapacityError(f"Profondeur {depth} au-delà de la capacité")
    dom_lo, dom_hi = system.domain.bounds
    out_lo = np.empty(depth, dtype=np.float64)
    out_hi = np.empty(depth, dtype=np.float64)

    for k0 in range(0, depth, ENCLOSURE_CHUNK):
        k1 = min(k0 + ENCLOSURE_CHUNK, depth)
        levels = np.arange(k0, min(k1 + MAX_LOOKAHEAD, depth), dtype=np.int64)
        clo, chi = _coding_bounds(family, coding, levels)
        c, s = _inverse_branches(system, levels, clo, chi)
        contraction = float(np.max(np.abs(s)))
        if contraction >= 1.0:
            raise ExpandingConditionError("Branches inverses non contractantes")
        scale = ENCLOSURE_TARGET_WIDTH / (dom_hi - dom_lo)
        lookahead = min(MAX_LOOKAHEAD, math.ceil(math.log(scale) / math.log(contraction)) + 1
                        if contraction > 0 else 1)

        targets = np.arange(k0, k1, dtype=np.int64)
        e_lo = np.full(len(targets), dom_lo)
        e_hi = np.full(len(targets), dom_hi)
        for r in range(lookahead, -1, -1):
            lev = targets + r
            valid = lev < depth
            if not valid.any():
                continue
            idx = lev[valid] - k0
            a = c[idx] + s[idx] * e_lo[valid]
            b = c[idx] + s[idx] * e_hi[valid]
            e_lo[valid] = np.maximum(np.nextafter(np.minimum(a, b), -np.inf), clo[idx])
            e_hi[valid] = np.minimum(np.nextafter(np.maximum(a, b), np.inf), chi[idx])
        if np.any(e_lo > e_hi):
            bad = int(targets[np.argmax(e_lo > e_hi)])
            raise ExpandingConditionError(f"Enveloppe vide au niveau {bad}")
        out_lo[k0:k1], out_hi[k0:k1] = e_lo, e_hi
        logger.debug(f"Niveaux {k0}..{k1 - 1}: {lookahead} pas rétrogrades")

    point = (out_lo[0] + out_hi[0]) / 2.0
    return ExpandingPoint(point=float(point), lo=out_lo, hi=out_hi, coding=coding)


def verify_itinerary(ep, family, system):
    """
    Écart maximal à l'itinéraire : E_k ⊆ C_{k+1} et f_k(milieu E_k) ∈ E_{k+1},
    chaque test relâché de la tolérance d'intervalle (pondérée par la pente).

    Returns:
        écart maximal (0.0 si l'itinéraire est respecté)
    """
    worst = 0.0
    mids = ep.midpoints
    for k0 in range(0, ep.depth, ENCLOSURE_CHUNK):
        k1 = min(k0 + ENCLOSURE_CHUNK, ep.depth)
        levels = np.arange(k0, k1, dtype=np.int64)
        clo, chi = _coding_bounds(family, ep.coding, levels)
        tol = INTERVAL_WIDTH_TOLERANCE
        worst = max(worst, float(np.max(np.maximum(clo - ep.lo[k0:k1] - tol,
                                                   ep.hi[k0:k1] - chi - tol).clip(0))))
        c, s = _inverse_branches(system, levels, clo, chi)
        inner = levels[levels + 1 < ep.depth]
        if len(inner) == 0:
            continue
        i = inner - k0
        image = (mids[inner] - c[i]) / s[i]
        slack = tol * (1.0 + 1.0 / np.abs(s[i]))
        miss = np.maximum(ep.lo[inner + 1] - image, image - ep.hi[inner + 1]) - slack
        worst = max(worst, float(np.max(miss.clip(0))))
    return worst


@dataclass(frozen=True, eq=False)
class CodedPair:
    """Paire (x_α, x_β) de points codés et son δ = d(a, b)/2"""

    first: ExpandingPoint
    second: ExpandingPoint
    delta: float

    @property
    def points(self):
        return self.first.point, self.second.point

    def profile(self):
        """Profil de la paire le long de ℕ, depuis les milieux des enveloppes"""
        distances = np.abs(self.first.midpoints - self.second.midpoints)
        return profile_from_distances(
            distances, from_generator(ArithmeticGenerator(0, 1), len(distances)),
            x=self.first.point, y=self.second.point)

    def error_bounds(self):
        return self.first.radii + self.second.radii


def build_dc_pair_expanding(family, system, alpha, beta, depth):
    """
    Paire distributionnellement δ-brouillée codée par deux suites α ≠ β.

    Args:
        family: NestedFamily vérifiant la condition d'expansion
        system: MapFamily affine par morceaux
        alpha, beta: SymbolSequence
        depth: nombre d'instants couverts par les enveloppes

    Returns:
        CodedPair
    """
    horizon = min(depth, 4096)
    level = family.first_disjoint(horizon)
    if level is None:
        raise ParameterError("A_k ∩ B_k ≠ ∅ à tout niveau : δ = 0")
    limits = family.limits()
    if limits is not None:
        delta = system.domain.distance(*limits) / 2.0
    else:
        # familles non réduites à un point : demi-écart minimal entre A_k et B_k
        gap = family.gap(level, horizon)
        if gap <= 0:
            raise PreconditionError(f"A_k et B_k se recouvrent au-delà du niveau {level}")
        delta = float(gap) / 2.0
    schedule = schedule_covering(depth)
    first = build_expanding_point(family, CodingAssignment(alpha, schedule), system, depth)
    if alpha == beta:
        logger.warning("Codes identiques : les deux points coïncident")
        second = first
    else:
        second = build_expanding_point(family, CodingAssignment(beta, schedule), system, depth)
    logger.info(f"Paire codée construite: profondeur {depth}, δ = {delta}")
    return CodedPair(first=first, second=second, delta=delta)


# ============================================================================
# FUSION DE SUITES
# ============================================================================

@dataclass(frozen=True)
class MergedGenerator(SequenceGenerator):
    """Régénère la fusion de P et Q selon le calendrier n_k"""

    p: Any
    q: Any
    k_max: int

    kind = 'merged'

    def _terms(self):
        return merge_dc_sequence(self.p, self.q, self.k_max).terms

    def term_slice(self, start, stop):
        terms = self._terms()
        if stop > len(terms):
            raise ExtensionError(f"Fusion limitée à {len(terms)} termes")
        return terms[start:stop]

    def first_index_after(self, value):
        return int(np.searchsorted(self._terms(), value, side='right'))

    def contains(self, values):
        return np.isin(values, self._terms())

    def to_json(self):
        return {'kind': 'merged', 'P': self.p.to_json(), 'Q': self.q.to_json(),
                'k_max': self.k_max}


def merge_dc_sequence(P, Q, k_max):
    """
    T = {t_i} : t_1 = p_1, puis les blocs ]n_{2k-1}, n_{2k}] tirés dans P et
    ]n_{2k}, n_{2k+1}] tirés dans Q, chaque terme dépassant le précédent.

    Returns:
        IndexSequence (sources : 0 pour P, 1 pour Q)
    """
    n = merge_schedule(k_max)
    if n[-1] > MEMORY_CAP_POINTS:
        raise CapacityError(f"n_{k_max} = {n[-1]} au-delà de la capacité")
    parts = [P.after(-1, 1)]
    sources = [np.zeros(1, dtype=np.uint8)]
    for j in range(1, k_max):
        length = n[j] - n[j - 1]
        family, label = (P, 0) if j % 2 == 1 else (Q, 1)
        block = family.after(int(parts[-1][-1]), length)
        parts.append(block)
        sources.append(np.full(length, label, dtype=np.uint8))
    terms = np.concatenate(parts)

    top = int(terms[-1])
    common = np.intersect1d(P.up_to(top), Q.up_to(top))
    if len(common) and common[-1] > top // 2:
        raise PreconditionError(
            f"P ∩ Q semble infinie ({len(common)} termes communs ≤ {top})"
        )
    logger.debug(f"Fusion: {len(terms)} termes, {len(common)} communs à P et Q")
    return IndexSequence(terms, generator=MergedGenerator(P, Q, k_max),
                         sources=np.concatenate(sources))


# ============================================================================
# SONDE DE MÉLANGE FAIBLE
# ============================================================================

def _interior_samples(interval, count):
    lo, hi = (float(v) for v in interval)
    if not lo < hi:
        raise ParameterError(f"Intervalle ouvert vide: ]{lo}, {hi}[")
    return lo + (hi - lo) * (np.arange(count) + 0.5) / count


def _inside(values, interval):
    lo, hi = (float(v) for v in interval)
    return (values > lo) & (values < hi)


def weak_mixing_probe(system, opens, horizon, sample_density=MIXING_SAMPLES):
    """
    Plus petit n ≤ horizon tel que f_0^n(U_1) ∩ V_1 ≠ ∅ et f_0^n(U_2) ∩ V_2 ≠ ∅,
    détecté sur un échantillon de chaque U_i puis revérifié point par point.

    Args:
        system: MapFamily sur un intervalle
        opens: (U_1, V_1, U_2, V_2), intervalles ouverts (lo, hi)
        horizon: nombre maximal d'itérations
        sample_density: points échantillonnés par ouvert

    Returns:
        n, ou None si rien n'est trouvé (non concluant)
    """
    if not system.vectorized:
        raise ParameterError("Sonde réservée aux systèmes sur un intervalle")
    if len(opens) != 4 or horizon < 1 or sample_density < 1:
        raise ParameterError("Quatre ouverts, horizon ≥ 1 et densité ≥ 1 requis")
    u1, v1, u2, v2 = opens
    start1, start2 = _interior_samples(u1, sample_density), _interior_samples(u2, sample_density)
    for v in (v1, v2):
        _interior_samples(v, 1)
    x1, x2 = start1.copy(), start2.copy()
    for n in range(1, horizon + 1):
        x1, x2 = system.step(n - 1, x1), system.step(n - 1, x2)
        hit1, hit2 = _inside(x1, v1), _inside(x2, v2)
        if not (hit1.any() and hit2.any()):
            continue
        w1, w2 = float(start1[np.argmax(hit1)]), float(start2[np.argmax(hit2)])
        y1, y2 = system.advance(w1, 0, n), system.advance(w2, 0, n)
        if _inside(np.array([y1]), v1)[0] and _inside(np.array([y2]), v2)[0]:
            logger.info(f"Mélange faible détecté à n = {n}")
            return n
        logger.debug(f"Témoin non confirmé à n = {n}")
    logger.warning(f"Sonde non concluante jusqu'à n = {horizon}")
    return None
