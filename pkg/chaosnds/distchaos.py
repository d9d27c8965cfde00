"""
ChaosNDS - Chaos distributionnel et paires de Li-Yorke
Profils de paires, fonctions de distribution F* et F, verdicts à trois valeurs,
ensembles d'atteinte et balayage de paires
"""

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import combinations
from typing import Any, List, Optional

import numpy as np

from .constants import (
    DC_DELTA_FACTORS, DEFAULT_TAU_HI, DEFAULT_TAU_LO, DEFAULT_TAU_PROX,
    DELTA_PRIME_RATIO, EPS_GRID_FACTORS, WITNESS_BASE, WITNESS_MIN_BLOCK,
    WITNESS_ROUNDS, format_float
)
from .core import orbit_batch
from .exceptions import ChaosError, ParameterError
from .seqdensity import (
    IndexSequence, density_one_witness, explicit, relative_density, running_extrema
)

logger = logging.getLogger(__name__)


# ============================================================================
# LOGIQUE À TROIS VALEURS
# ============================================================================

class Flag(str, Enum):
    HOLDS = 'holds'
    FAILS = 'fails'
    UNDECIDED = 'undecided'


def flag_not(a):
    if a is Flag.HOLDS:
        return Flag.FAILS
    if a is Flag.FAILS:
        return Flag.HOLDS
    return Flag.UNDECIDED


def flag_and(*flags):
    if any(f is Flag.FAILS for f in flags):
        return Flag.FAILS
    if all(f is Flag.HOLDS for f in flags):
        return Flag.HOLDS
    return Flag.UNDECIDED


def flag_or(*flags):
    return flag_not(flag_and(*(flag_not(f) for f in flags)))


def _at_most(value, threshold):
    """holds si value ≤ seuil, fails si value > 2 seuil"""
    if value <= threshold:
        return Flag.HOLDS
    if value > 2.0 * threshold:
        return Flag.FAILS
    return Flag.UNDECIDED


def _at_least_one_minus(value, tau):
    """holds si value ≥ 1 - tau, fails si value < 1 - 2 tau"""
    if value >= 1.0 - tau:
        return Flag.HOLDS
    if value < 1.0 - 2.0 * tau:
        return Flag.FAILS
    return Flag.UNDECIDED


# ============================================================================
# TYPES
# ============================================================================

@dataclass(frozen=True)
class Tolerances:
    """tau_prox est absolu ; None signifie DEFAULT_TAU_PROX × diamètre"""

    tau_hi: float = DEFAULT_TAU_HI
    tau_lo: float = DEFAULT_TAU_LO
    tau_prox: Optional[float] = None

    def __post_init__(self):
        for name in ('tau_hi', 'tau_lo'):
            value = getattr(self, name)
            if not 0.0 < value < 0.5:
                raise ParameterError(f"{name} doit être dans ]0, 1/2[: {value}")
        if self.tau_prox is not None and self.tau_prox <= 0.0:
            raise ParameterError(f"tau_prox doit être positif: {self.tau_prox}")

    def proximity(self, diameter):
        return self.tau_prox if self.tau_prox is not None else DEFAULT_TAU_PROX * diameter


@dataclass(frozen=True, eq=False)
class PairProfile:
    """
    Distances d(f_0^n(x), f_0^n(y)) et distances à la diagonale,
    aux indices d'une suite, calculées en une seule passe.
    """

    indices: IndexSequence
    distances: np.ndarray
    diag_distances: np.ndarray
    x: Any = None
    y: Any = None
    diameter: float = 1.0

    def __post_init__(self):
        if not len(self.distances) == len(self.diag_distances) == len(self.indices):
            raise ParameterError("Profil incohérent (longueurs différentes)")
        if len(self.distances) == 0:
            raise ParameterError("Profil vide")

    @property
    def horizon(self):
        return len(self.distances)

    def restrict(self, Q):
        """Profil le long d'une sous-suite Q des indices"""
        terms = Q.terms
        pos = np.searchsorted(self.indices.terms, terms)
        if np.any(pos >= len(self.indices)) or not np.array_equal(self.indices.terms[pos], terms):
            raise ParameterError("La sous-suite sort des indices du profil")
        return replace(self, indices=Q, distances=self.distances[pos],
                       diag_distances=self.diag_distances[pos])


@dataclass(frozen=True)
class DistributionalEstimate:
    epsilon: float
    upper_F: float
    lower_F: float
    horizon: int
    window: int


@dataclass(frozen=True)
class PairVerdict:
    proximal: Flag
    asymptotic: Flag
    distal: Flag
    li_yorke: Flag
    li_yorke_delta: Flag
    dc_pair: Flag
    dc_delta_pair: Flag
    delta: float
    horizon: int
    window: int
    estimates: tuple = ()
    reconciled: bool = False

    FLAG_NAMES = ('proximal', 'asymptotic', 'distal', 'li_yorke',
                  'li_yorke_delta', 'dc_pair', 'dc_delta_pair')

    def flags(self):
        return {name: getattr(self, name) for name in self.FLAG_NAMES}


@dataclass(frozen=True)
class DiagonalNeighborhood:
    """[Δ]_r = {(x, y) : dist((x, y), Δ) < r} ; closed=True pour l'adhérence (≤ r)"""

    radius: float
    closed: bool = False

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError(f"Rayon de voisinage invalide: {self.radius}")

    def contains(self, diag):
        return diag <= self.radius if self.closed else diag < self.radius


@dataclass(frozen=True)
class HittingSet:
    """N((x, y), W, Q) : indices de Q où la paire est dans W (ou son complémentaire)"""

    x: Any
    y: Any
    target: DiagonalNeighborhood
    complement: bool
    base: IndexSequence
    hits: IndexSequence


@dataclass(frozen=True)
class DualVerdict:
    """Verdict direct et verdict par ensembles d'atteinte (δ' = δ/4)"""

    direct: PairVerdict
    direct_flag: Flag
    hitting_flag: Flag
    agreement: Optional[bool]


@dataclass(frozen=True)
class ScanRow:
    i: int
    j: int
    x: Any
    y: Any
    verdict: Optional[PairVerdict] = None
    status: str = 'ok'


# ============================================================================
# PROFILS ET ESTIMATIONS
# ============================================================================

def pair_profile(system, x, y, indices):
    """
    Profil de la paire (x, y) le long de indices (une passe synchronisée).

    Args:
        system: MapFamily
        x, y: points du domaine
        indices: IndexSequence (préfixe matérialisé utilisé)
    """
    orbits = orbit_batch(system, [x, y], indices.terms)
    domain = system.domain
    if system.vectorized:
        xs, ys = orbits[:, 0], orbits[:, 1]
    else:
        xs, ys = [row[0] for row in orbits], [row[1] for row in orbits]
    return PairProfile(indices=indices, distances=domain.distances(xs, ys),
                       diag_distances=domain.diag_distances(xs, ys),
                       x=x, y=y, diameter=domain.diameter())


def profile_from_distances(distances, indices=None, diameter=1.0, x=None, y=None):
    """Profil synthétique (distances réelles, diagonale = d/2)"""
    distances = np.asarray(distances, dtype=np.float64)
    if indices is None:
        indices = explicit(range(len(distances)))
    return PairProfile(indices=indices, distances=distances, diag_distances=distances / 2.0,
                       x=x, y=y, diameter=diameter)


def default_eps_grid(diameter, factors=EPS_GRID_FACTORS):
    return tuple(f * diameter for f in factors)


def estimate_F(profile, epsilon, window=None, checkpoints=None):
    """
    F*_{xy}(ε) et F_{xy}(ε) : max et min des moyennes de Cesàro de
    χ_[0,ε)(d_n) sur la fenêtre glissante (ou aux checkpoints).
    """
    if epsilon <= 0:
        raise ParameterError(f"ε doit être positif: {epsilon}")
    upper, lower, window = running_extrema(profile.distances < epsilon, window, checkpoints)
    return DistributionalEstimate(epsilon, upper, lower, profile.horizon, window)


def _trailing(values, window, checkpoints):
    """Queue de la suite pour les extrêmes ; avec checkpoints, elle part de c_min / 2"""
    if checkpoints is not None:
        return values[max(0, min(checkpoints) // 2 - 1):]
    return values[len(values) - 1 - window:]


def _reconcile(flags):
    """Ramène à 'undecided' les drapeaux contredits par une estimation à horizon fini"""
    changed = False
    if flags['li_yorke_delta'] is Flag.HOLDS and flags['li_yorke'] is not Flag.HOLDS:
        flags['li_yorke_delta'] = Flag.UNDECIDED
        changed = True
    if flags['dc_pair'] is Flag.HOLDS and flags['li_yorke'] is not Flag.HOLDS:
        flags['dc_pair'] = Flag.UNDECIDED
        changed = True
    if flags['dc_delta_pair'] is Flag.HOLDS and flags['dc_pair'] is not Flag.HOLDS:
        flags['dc_delta_pair'] = Flag.UNDECIDED
        changed = True
    if changed:
        logger.warning("Verdict réconcilié : drapeaux contradictoires marqués indécis")
    return changed


def classify_pair(profile, delta, tolerances=None, eps_grid=None, window=None,
                  checkpoints=None):
    """
    Classe la paire du profil.

    Args:
        profile: PairProfile
        delta: δ > 0
        tolerances: Tolerances (défauts si None)
        eps_grid: grille des ε (défaut : fractions du diamètre)
        window: fenêtre glissante (défaut horizon/10)
        checkpoints: points d'évaluation remplaçant la fenêtre

    Returns:
        PairVerdict
    """
    if delta <= 0:
        raise ParameterError(f"δ doit être positif: {delta}")
    tol = tolerances or Tolerances()
    grid = eps_grid or default_eps_grid(profile.diameter)
    prox = tol.proximity(profile.diameter)

    estimates = [estimate_F(profile, e, window, checkpoints) for e in grid]
    window = estimates[0].window
    recent = _trailing(profile.distances, window, checkpoints)
    low, high = float(recent.min()), float(recent.max())

    proximal = _at_most(low, prox)
    asymptotic = _at_most(high, prox)
    distal = flag_and(Flag.HOLDS if low >= delta else Flag.FAILS, flag_not(proximal))
    li_yorke = flag_and(proximal, flag_not(asymptotic))
    above = Flag.HOLDS if high > delta else (
        Flag.FAILS if high <= delta - prox else Flag.UNDECIDED)
    li_yorke_delta = flag_and(proximal, above)

    near_one = flag_and(*(_at_least_one_minus(e.upper_F, tol.tau_hi) for e in estimates))
    lows = {}
    for factor in DC_DELTA_FACTORS:
        est = estimate_F(profile, factor * delta, window, checkpoints)
        lows[factor] = _at_most(est.lower_F, tol.tau_lo)
    dc_delta_pair = flag_and(near_one, lows[1.0])
    dc_pair = flag_and(near_one, flag_or(*lows.values()))

    flags = dict(proximal=proximal, asymptotic=asymptotic, distal=distal,
                 li_yorke=li_yorke, li_yorke_delta=li_yorke_delta,
                 dc_pair=dc_pair, dc_delta_pair=dc_delta_pair)
    reconciled = _reconcile(flags)
    return PairVerdict(delta=delta, horizon=profile.horizon, window=window,
                       estimates=tuple(estimates), reconciled=reconciled, **flags)


# ============================================================================
# ENSEMBLES D'ATTEINTE
# ============================================================================

def diag_distance(x, y, domain):
    """Distance de (x, y) à la diagonale de X×X (métrique max)"""
    return domain.diag_distance(x, y)


def hitting_set(profile, target, complement=False):
    """
    N((x, y), W, Q) pour W = target ou son complémentaire.

    Returns:
        HittingSet (hits ⊆ indices du profil)
    """
    inside = target.contains(profile.diag_distances)
    mask = ~inside if complement else inside
    return HittingSet(x=profile.x, y=profile.y, target=target, complement=complement,
                      base=profile.indices, hits=explicit(profile.indices.terms[mask]))


def dc_verdict_dual(profile, delta, tolerances=None, eps_grid=None, window=None,
                    checkpoints=None):
    """
    Verdict DC direct et par ensembles d'atteinte.

    Côté atteinte : densité supérieure relative ≥ 1 - tau_hi des visites de [Δ]_ε
    pour tout ε, et ≥ 1 - tau_lo des visites du complémentaire de l'adhérence
    de [Δ]_{δ/4}. Côté direct, comparé : F* à 2ε et F(δ).
    """
    tol = tolerances or Tolerances()
    grid = eps_grid or default_eps_grid(profile.diameter)
    direct = classify_pair(profile, delta, tol, grid, window, checkpoints)

    near = [_at_least_one_minus(estimate_F(profile, 2.0 * e, window, checkpoints).upper_F,
                                tol.tau_hi) for e in grid]
    far = _at_most(estimate_F(profile, delta, window, checkpoints).lower_F, tol.tau_lo)
    direct_flag = flag_and(*near, far)

    base, horizon = profile.indices, profile.horizon
    hits_near = []
    for e in grid:
        hits = hitting_set(profile, DiagonalNeighborhood(e))
        est = relative_density(hits.hits, base, horizon, window, checkpoints)
        hits_near.append(_at_least_one_minus(est.upper, tol.tau_hi))
    outside = hitting_set(profile, DiagonalNeighborhood(DELTA_PRIME_RATIO * delta, closed=True),
                          complement=True)
    est = relative_density(outside.hits, base, horizon, window, checkpoints)
    hitting_flag = flag_and(*hits_near, _at_least_one_minus(est.upper, tol.tau_lo))

    if Flag.UNDECIDED in (direct_flag, hitting_flag):
        agreement = None
    else:
        agreement = direct_flag is hitting_flag
    return DualVerdict(direct=direct, direct_flag=direct_flag,
                       hitting_flag=hitting_flag, agreement=agreement)


# ============================================================================
# BALAYAGE DE PAIRES
# ============================================================================

def _orbit_columns(system, sample, terms):
    """Orbites de chaque point (None et message si le calcul échoue)"""
    try:
        batch = orbit_batch(system, sample, terms)
        if system.vectorized:
            return [(batch[:, k], None) for k in range(len(sample))]
        return [([row[k] for row in batch], None) for k in range(len(sample))]
    except ChaosError:
        logger.debug("Échec du calcul groupé, reprise point par point")
    columns = []
    for point in sample:
        try:
            one = orbit_batch(system, [point], terms)
            col = one[:, 0] if system.vectorized else [row[0] for row in one]
            columns.append((col, None))
        except ChaosError as e:
            columns.append((None, f"{type(e).__name__}: {e}"))
    return columns


def scan_pairs(system, sample, indices, delta, tolerances=None, threads=1,
               eps_grid=None, window=None):
    """
    Classe toutes les paires i < j d'un échantillon fini.

    Les orbites sont calculées une fois par point ; les verdicts sont répartis
    sur threads fils et renvoyés dans l'ordre (i, j), identiques quel que soit
    le nombre de fils.
    """
    if threads < 1:
        raise ParameterError(f"Nombre de fils invalide: {threads}")
    terms = indices.terms
    columns = _orbit_columns(system, list(sample), terms)
    domain = system.domain

    def work(pair):
        i, j = pair
        (ci, ei), (cj, ej) = columns[i], columns[j]
        if ei or ej:
            return ScanRow(i, j, sample[i], sample[j], status=ei or ej)
        try:
            profile = PairProfile(indices=indices, distances=domain.distances(ci, cj),
                                  diag_distances=domain.diag_distances(ci, cj),
                                  x=sample[i], y=sample[j], diameter=domain.diameter())
            verdict = classify_pair(profile, delta, tolerances, eps_grid, window)
            return ScanRow(i, j, sample[i], sample[j], verdict=verdict)
        except ChaosError as e:
            return ScanRow(i, j, sample[i], sample[j], status=f"{type(e).__name__}: {e}")

    pairs = list(combinations(range(len(sample)), 2))
    if threads == 1:
        rows = [work(p) for p in pairs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, pairs))
    logger.info(f"{len(rows)} paires classées ({sum(r.status != 'ok' for r in rows)} en erreur)")
    return rows


SCAN_COLUMNS = ['i', 'j', 'x', 'y', 'horizon', 'window', 'eps', 'upper_F', 'lower_F',
                'delta', *PairVerdict.FLAG_NAMES, 'status']


def write_scan_csv(rows, stream, domain):
    """Écrit les lignes du balayage (ε minimal de la grille pour F*, δ pour F)"""
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(SCAN_COLUMNS)
    for row in rows:
        x, y = domain.point_to_json(row.x), domain.point_to_json(row.y)
        if row.verdict is None:
            writer.writerow([row.i, row.j, x, y] + [''] * (len(SCAN_COLUMNS) - 5)
                            + [row.status])
            continue
        v = row.verdict
        finest = min(v.estimates, key=lambda e: e.epsilon)
        writer.writerow([row.i, row.j, x, y, v.horizon, v.window,
                         format_float(finest.epsilon), format_float(finest.upper_F),
                         format_float(finest.lower_F), format_float(v.delta),
                         *(v.flags()[name].value for name in PairVerdict.FLAG_NAMES),
                         row.status])


# ============================================================================
# SUITE LE LONG DE LAQUELLE DES PAIRES DE LI-YORKE SONT DC
# ============================================================================

@dataclass(frozen=True)
class SequenceVerdicts:
    witness: Any
    verdicts: List[DualVerdict] = field(default_factory=list)


def sequence_for_pairs(profiles, epsilon, delta, tolerances=None, rounds=WITNESS_ROUNDS,
                       base=WITNESS_BASE, min_block=WITNESS_MIN_BLOCK):
    """
    Construit Q rendant chaque paire distributionnellement δ-brouillée le long de Q.

    Pour chaque profil, les instants d'approche (d < ε) et d'éloignement (d > δ)
    forment deux familles ; Q est le témoin de densité 1 de toutes ces familles.
    Les verdicts sont évalués aux fins de blocs du témoin.
    """
    families = []
    for profile in profiles:
        terms = profile.indices.terms
        families.append(explicit(terms[profile.distances < epsilon]))
        families.append(explicit(terms[profile.distances > delta]))
    witness = density_one_witness(families, rounds=rounds, base=base, min_block=min_block)
    checkpoints = [b.end for b in witness.blocks]
    verdicts = [dc_verdict_dual(p.restrict(witness.sequence), delta, tolerances, (epsilon,),
                                checkpoints=checkpoints)
                for p in profiles]
    logger.info(f"Suite Q de {len(witness.sequence)} termes pour {len(profiles)} paires")
    return SequenceVerdicts(witness=witness, verdicts=verdicts)
