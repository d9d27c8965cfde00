"""
ChaosNDS - Suites d'indices et densités relatives
Densités supérieure et inférieure de P relativement à Q, témoins de densité 1,
équivalence de Cesàro et calendrier de fusion
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .constants import (
    DEFAULT_MATERIALIZATION, DEFAULT_TAU_LO, DEFAULT_WINDOW_RATIO, INT64_MAX,
    MEMORY_CAP_POINTS, WITNESS_BASE, WITNESS_MIN_BLOCK, WITNESS_ROUNDS
)
from .exceptions import (
    BoundViolationError, CapacityError, ConfigError, ExtensionError,
    InsufficientSequenceError, ParameterError, ScheduleOverflowError
)

logger = logging.getLogger(__name__)


def _int_root(value, exponent):
    """Plus grand r ≥ 0 tel que r^exponent ≤ value (entiers exacts)"""
    if value < 0:
        return -1
    r = int(round(value ** (1.0 / exponent)))
    while r ** exponent > value:
        r -= 1
    while (r + 1) ** exponent <= value:
        r += 1
    return r


def _check_length(count):
    if count > MEMORY_CAP_POINTS:
        raise CapacityError(f"{count} termes demandés, capacité {MEMORY_CAP_POINTS}")


# ============================================================================
# GÉNÉRATEURS
# ============================================================================

class SequenceGenerator:
    """Règle qui produit les termes d'une suite infinie strictement croissante"""

    kind = 'abstract'

    def term_slice(self, start, stop):
        """Termes d'indices start, …, stop - 1"""
        raise NotImplementedError

    def first_index_after(self, value):
        """Indice du premier terme strictement supérieur à value"""
        raise NotImplementedError

    def contains(self, values):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class ArithmeticGenerator(SequenceGenerator):
    """a, a + step, a + 2 step, …"""

    a: int = 0
    step: int = 1

    kind = 'arithmetic'

    def __post_init__(self):
        if self.a < 0 or self.step < 1:
            raise ParameterError(f"Suite arithmétique invalide (a={self.a}, pas={self.step})")

    def term_slice(self, start, stop):
        if self.a + self.step * (stop - 1) > INT64_MAX:
            raise CapacityError("Terme arithmétique hors de la plage int64")
        return self.a + self.step * np.arange(start, stop, dtype=np.int64)

    def first_index_after(self, value):
        return max(0, (value - self.a) // self.step + 1)

    def contains(self, values):
        values = np.asarray(values, dtype=np.int64)
        return (values >= self.a) & ((values - self.a) % self.step == 0)

    def to_json(self):
        return {'kind': 'arithmetic', 'a': self.a, 'step': self.step}


@dataclass(frozen=True)
class PowerGenerator(SequenceGenerator):
    """start^p, (start+1)^p, …"""

    exponent: int = 2
    start: int = 0

    kind = 'power'

    def __post_init__(self):
        if self.exponent < 1 or self.start < 0:
            raise ParameterError(f"Suite de puissances invalide (p={self.exponent})")

    def term_slice(self, start, stop):
        if (self.start + stop - 1) ** self.exponent > INT64_MAX:
            raise CapacityError("Puissance hors de la plage int64")
        base = np.arange(self.start + start, self.start + stop, dtype=np.int64)
        return base ** self.exponent

    def first_index_after(self, value):
        return max(0, _int_root(value, self.exponent) + 1 - self.start)

    def contains(self, values):
        values = np.asarray(values, dtype=np.int64)
        roots = np.abs(values).astype(np.float64) ** (1.0 / self.exponent)
        guess = np.rint(roots).astype(np.int64)
        out = np.zeros(len(values), dtype=bool)
        for delta in (-1, 0, 1):
            r = guess + delta
            out |= (r >= self.start) & (r ** self.exponent == values)
        return out & (values >= 0)

    def to_json(self):
        return {'kind': 'power', 'exponent': self.exponent, 'start': self.start}


@dataclass(frozen=True)
class ScheduleGenerator(SequenceGenerator):
    """Calendrier défini par récurrence ('checkpoint' ou 'merge'), entiers exacts"""

    recursion: str = 'checkpoint'
    depth: int = 8

    kind = 'schedule'

    def __post_init__(self):
        if self.recursion not in ('checkpoint', 'merge'):
            raise ParameterError(f"Récurrence inconnue: {self.recursion}")

    def values(self):
        if self.recursion == 'checkpoint':
            from .constructors import checkpoint_schedule
            return checkpoint_schedule(self.depth).m
        return merge_schedule(self.depth)

    def term_slice(self, start, stop):
        values = self.values()
        if stop > len(values):
            raise ExtensionError(f"Calendrier limité à {len(values)} termes")
        return np.array(values[start:stop], dtype=np.int64)

    def first_index_after(self, value):
        return int(np.searchsorted(np.array(self.values(), dtype=np.int64), value, side='right'))

    def contains(self, values):
        return np.isin(values, np.array(self.values(), dtype=np.int64))

    def to_json(self):
        return {'kind': 'schedule', 'recursion': self.recursion, 'depth': self.depth}


# ============================================================================
# SUITES D'INDICES
# ============================================================================

@dataclass(frozen=True, eq=False)
class IndexSequence:
    """
    Suite strictement croissante d'entiers naturels.
    terms est le préfixe matérialisé ; generator (optionnel) permet de le prolonger.
    sources étiquette l'origine de chaque terme pour les suites fusionnées.
    """

    terms: np.ndarray
    generator: Optional[SequenceGenerator] = None
    sources: Optional[np.ndarray] = None

    def __post_init__(self):
        terms = np.asarray(self.terms, dtype=np.int64)
        if terms.ndim != 1:
            raise ParameterError("Suite d'indices unidimensionnelle attendue")
        if len(terms) and (terms[0] < 0 or np.any(np.diff(terms) <= 0)):
            raise ParameterError("Suite d'indices non strictement croissante ou négative")
        terms.setflags(write=False)
        object.__setattr__(self, 'terms', terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.tolist())

    def __getitem__(self, i):
        return int(self.terms[i])

    @property
    def extensible(self):
        return self.generator is not None

    def prefix(self, count):
        """Les count premiers termes (prolongés par le générateur si besoin)"""
        if count <= len(self.terms):
            return IndexSequence(self.terms[:count], self.generator,
                                 None if self.sources is None else self.sources[:count])
        if self.generator is None:
            raise ExtensionError(
                f"Suite explicite de {len(self.terms)} termes, {count} demandés"
            )
        _check_length(count)
        return IndexSequence(self.generator.term_slice(0, count), self.generator)

    def up_to(self, bound):
        """Termes ≤ bound"""
        if self.generator is None:
            return self.terms[:np.searchsorted(self.terms, bound, side='right')]
        count = self.generator.first_index_after(bound)
        _check_length(count)
        return self.generator.term_slice(0, count)

    def after(self, value, count):
        """Les count premiers termes strictement supérieurs à value"""
        if self.generator is None:
            i = int(np.searchsorted(self.terms, value, side='right'))
            if i + count > len(self.terms):
                raise InsufficientSequenceError(
                    f"{count} termes demandés après {value}, "
                    f"{len(self.terms) - i} disponibles"
                )
            return self.terms[i:i + count]
        _check_length(count)
        i = self.generator.first_index_after(value)
        return self.generator.term_slice(i, i + count)

    def contains(self, values):
        """Appartenance de chaque valeur à la suite"""
        values = np.asarray(values, dtype=np.int64)
        if self.generator is None:
            return np.isin(values, self.terms)
        return self.generator.contains(values)

    def verify(self):
        """Le générateur reproduit exactement le préfixe matérialisé"""
        if self.generator is None:
            return True
        return bool(np.array_equal(self.generator.term_slice(0, len(self.terms)), self.terms))

    def to_json(self):
        if self.generator is not None:
            return {**self.generator.to_json(), 'length': len(self.terms)}
        return self.terms.tolist()

    @classmethod
    def from_json(cls, value):
        """Tableau explicite ou objet générateur {"kind": ...}"""
        if isinstance(value, list):
            try:
                return explicit(value)
            except (TypeError, ValueError, ParameterError) as e:
                raise ConfigError(f"Suite explicite invalide: {e}")
        if not isinstance(value, dict):
            raise ConfigError(f"Suite d'indices attendue, reçu {type(value).__name__}")
        kind = value.get('kind')
        length = int(value.get('length', DEFAULT_MATERIALIZATION))
        try:
            if kind == 'arithmetic':
                gen = ArithmeticGenerator(int(value.get('a', 0)), int(value.get('step', 1)))
            elif kind == 'power':
                gen = PowerGenerator(int(value.get('exponent', 2)), int(value.get('start', 0)))
            elif kind == 'schedule':
                gen = ScheduleGenerator(value.get('recursion', 'checkpoint'),
                                        int(value.get('depth', 8)))
                length = min(length, len(gen.values()))
            else:
                raise ConfigError(f"Type de suite inconnu: {kind}")
            return from_generator(gen, length)
        except ParameterError as e:
            raise ConfigError(str(e))


def explicit(terms):
    """Suite finie donnée par ses termes"""
    return IndexSequence(np.asarray(list(terms), dtype=np.int64))


def from_generator(generator, length=DEFAULT_MATERIALIZATION):
    _check_length(length)
    return IndexSequence(generator.term_slice(0, length), generator)


def arithmetic(a=0, step=1, length=DEFAULT_MATERIALIZATION):
    return from_generator(ArithmeticGenerator(a, step), length)


def naturals(length=DEFAULT_MATERIALIZATION):
    """ℕ = {0, 1, 2, …}"""
    return arithmetic(0, 1, length)


def powers(exponent, start=0, length=DEFAULT_MATERIALIZATION):
    return from_generator(PowerGenerator(exponent, start), length)


# ============================================================================
# DENSITÉS
# ============================================================================

@dataclass(frozen=True)
class DensityEstimate:
    """Extrêmes du rapport courant |P ∩ {q_1..q_n}| / n sur la fenêtre d'évaluation"""

    upper: float
    lower: float
    horizon: int
    window: int
    checkpoints: Optional[tuple] = None


def default_window(horizon):
    return int(horizon * DEFAULT_WINDOW_RATIO)


def running_extrema(indicator, window=None, checkpoints=None):
    """
    Extrêmes des moyennes de Cesàro c_n = (1/n) Σ_{i<n} indicator_i.

    Sans checkpoints, n parcourt la fenêtre glissante [N - window, N] ;
    avec checkpoints, n parcourt les points donnés.

    Returns:
        (max, min, fenêtre effective)
    """
    horizon = len(indicator)
    if horizon < 1:
        raise ParameterError("Horizon nul")
    means = np.cumsum(indicator, dtype=np.float64) / np.arange(1, horizon + 1)
    if checkpoints is not None:
        points = np.asarray(sorted(set(int(c) for c in checkpoints)), dtype=np.int64)
        if len(points) == 0 or points[0] < 1 or points[-1] > horizon:
            raise ParameterError(f"Points d'évaluation hors de [1, {horizon}]")
        values = means[points - 1]
        return float(values.max()), float(values.min()), horizon - int(points[0])
    window = default_window(horizon) if window is None else int(window)
    if window < 0:
        raise ParameterError(f"Fenêtre négative: {window}")
    window = min(window, horizon - 1)
    values = means[horizon - 1 - window:]
    return float(values.max()), float(values.min()), window


def relative_density(P, Q, horizon, window=None, checkpoints=None):
    """
    Densités relatives supérieure et inférieure de P par rapport à Q.

    Args:
        P, Q: IndexSequence
        horizon: nombre de termes de Q considérés
        window: fenêtre glissante (défaut horizon/10)
        checkpoints: points n d'évaluation (remplacent la fenêtre)

    Returns:
        DensityEstimate
    """
    if horizon < 1:
        raise ParameterError(f"Horizon invalide: {horizon}")
    q = Q.prefix(horizon).terms
    member = P.contains(q)
    upper, lower, window = running_extrema(member, window, checkpoints)
    return DensityEstimate(upper, lower, horizon, window,
                           None if checkpoints is None else tuple(checkpoints))


def merge_schedule(k_max):
    """n_1 = 1, n_{k+1} = 2k n_k ; renvoie (n_1, …, n_{k_max})"""
    if k_max < 1:
        raise ParameterError(f"k_max invalide: {k_max}")
    values = [1]
    for k in range(1, k_max):
        values.append(2 * k * values[-1])
        if values[-1] > INT64_MAX:
            raise ScheduleOverflowError(f"n_{k + 1} dépasse la plage int64")
    return tuple(values)


# ============================================================================
# TÉMOIN DE DENSITÉ 1
# ============================================================================

@dataclass(frozen=True)
class WitnessBlock:
    """Fin de bloc : famille tirée, longueur H de Q, cible 1 - 1/k"""

    family: int
    end: int
    k: int


@dataclass(frozen=True)
class DensityWitness:
    sequence: IndexSequence
    blocks: List[WitnessBlock] = field(default_factory=list)

    def checkpoints(self, family):
        """Fins des blocs tirés dans la famille donnée"""
        return [b.end for b in self.blocks if b.family == family]


def density_one_witness(families, rounds=WITNESS_ROUNDS, base=WITNESS_BASE,
                        min_block=WITNESS_MIN_BLOCK):
    """
    Construit Q telle que chaque famille ait une densité supérieure relative
    proche de 1 le long de Q.

    Les blocs de Q sont tirés tour à tour dans chaque famille ; à la ronde r
    chaque bloc est assez long pour que sa famille atteigne le rapport
    courant 1 - 1/base^r à la fin du bloc.

    Returns:
        DensityWitness (suite Q et calendrier des fins de blocs)
    """
    if not families:
        raise ParameterError("Aucune famille")
    if rounds < 1 or base < 2 or min_block < 1:
        raise ParameterError("rounds ≥ 1, base ≥ 2 et min_block ≥ 1 requis")

    parts, blocks = [], []
    counts = [0] * len(families)
    last, n = -1, 0
    for r in range(1, rounds + 1):
        k = base ** r
        for j, family in enumerate(families):
            length = max(min_block, (k - 1) * n - k * counts[j])
            try:
                block = family.after(last, length)
            except (ExtensionError, CapacityError) as e:
                raise InsufficientSequenceError(f"Famille {j}, ronde {r}: {e}")
            for i, other in enumerate(families):
                counts[i] += length if i == j else int(np.count_nonzero(other.contains(block)))
            parts.append(block)
            n += length
            last = int(block[-1])
            blocks.append(WitnessBlock(family=j, end=n, k=k))
            logger.debug(f"Bloc famille {j}: {length} termes, H={n}, cible 1-1/{k}")
    sequence = IndexSequence(np.concatenate(parts))
    return DensityWitness(sequence=sequence, blocks=blocks)


# ============================================================================
# ÉQUIVALENCE DE CESÀRO
# ============================================================================

@dataclass(frozen=True)
class CesaroEquivalence:
    """
    Comparaison de la moyenne de Cesàro et de la convergence hors d'un ensemble E
    de densité nulle, E = {i : a_i > θ(i)}.
    """

    cesaro_mean_tail: float
    exceptional_set: IndexSequence
    exceptional_density: float
    residual_limit: float
    density_bound: float
    mean_vanishes: bool
    converges_off_exceptional_set: bool

    @property
    def equivalent(self):
        """Moyenne nulle et convergence hors de E, toutes deux constatées"""
        return self.mean_vanishes and self.converges_off_exceptional_set

    @property
    def characterizations_agree(self):
        return self.mean_vanishes == self.converges_off_exceptional_set


def cesaro_density_equivalence(a, horizon, bound=None, window=None, tol=DEFAULT_TAU_LO):
    """
    Args:
        a: suite réelle bornée positive (indices 0, 1, …)
        horizon: nombre de termes utilisés
        bound: borne supérieure déclarée (optionnelle)
        window: fenêtre glissante (défaut horizon/10)
        tol: seuil des drapeaux de convergence

    Returns:
        CesaroEquivalence
    """
    values = np.asarray(a, dtype=np.float64)
    if len(values) < horizon or horizon < 1:
        raise ExtensionError(f"{len(values)} termes disponibles, horizon {horizon}")
    values = values[:horizon]
    if not np.all(np.isfinite(values)):
        raise BoundViolationError("Suite non bornée (valeur non finie)")
    if np.any(values < 0):
        raise BoundViolationError("Suite négative")
    if bound is not None and np.any(values > bound):
        raise BoundViolationError(f"Valeur au-delà de la borne {bound}")

    i = np.arange(horizon)
    means = np.cumsum(values) / (i + 1)
    theta = np.maximum(np.sqrt(means), 1.0 / np.sqrt(i + 1))
    exceptional = values > theta

    window = default_window(horizon) if window is None else window
    density, _, window = running_extrema(exceptional, window)
    tail = slice(horizon - 1 - window, horizon)
    off = values[tail][~exceptional[tail]]
    residual = float(off.max()) if len(off) else 0.0
    tail_mean = float(means[-1])

    result = CesaroEquivalence(
        cesaro_mean_tail=tail_mean,
        exceptional_set=IndexSequence(np.flatnonzero(exceptional)),
        exceptional_density=density,
        residual_limit=residual,
        density_bound=math.sqrt(tail_mean),
        mean_vanishes=tail_mean <= tol,
        converges_off_exceptional_set=density <= tol and residual <= tol,
    )
    if not result.characterizations_agree:
        logger.warning("Caractérisations de Cesàro en désaccord à cet horizon")
    return result
