"""
ChaosNDS - Espace symbolique Σ₂⁺
Suites binaires (préfixe fini + queue), métrique ρ, décalage et famille à blocs
"""

import logging
import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

import numpy as np

from .constants import CLAMP_TOLERANCE, RHO_DEPTH, RHO_MAX_EXACT_PERIOD
from .exceptions import ConfigError, ParameterError

logger = logging.getLogger(__name__)

_COMPACT = re.compile(r'^([01]*)\(([01]+)\)$')
_MASK64 = (1 << 64) - 1


def _splitmix_bits(seed, indices):
    """Bit pseudo-aléatoire déterministe par indice (compteur splitmix64)"""
    z = indices.astype(np.uint64)
    with np.errstate(over='ignore'):
        z = np.uint64(seed & _MASK64) + (z + np.uint64(1)) * np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(63)).astype(np.uint8)


@dataclass(frozen=True)
class Tail:
    """
    Règle de queue d'une suite symbolique.

    kind : 'constant' (pattern d'un bit), 'periodic' (pattern répété),
    'generator' (seed compteur ou règle vectorisée, décalée de offset).
    """

    kind: str
    pattern: str = '0'
    seed: Optional[int] = None
    rule: Optional[Callable] = None
    offset: int = 0

    def __post_init__(self):
        if self.kind in ('constant', 'periodic'):
            if not self.pattern or set(self.pattern) - {'0', '1'}:
                raise ParameterError(f"Motif binaire invalide: '{self.pattern}'")
            if self.kind == 'constant' and len(self.pattern) != 1:
                raise ParameterError("Une queue constante a un motif d'un bit")
        elif self.kind == 'generator':
            if (self.seed is None) == (self.rule is None):
                raise ParameterError("Queue génératrice : seed ou règle, exactement un")
        else:
            raise ParameterError(f"Type de queue inconnu: {self.kind}")

    @property
    def period(self):
        return len(self.pattern) if self.kind != 'generator' else None

    def bits_at(self, j):
        """Bits de la queue aux positions j (tableau d'entiers ≥ 0)"""
        if self.kind == 'constant':
            return np.full(len(j), int(self.pattern), dtype=np.uint8)
        if self.kind == 'periodic':
            motif = np.frombuffer(self.pattern.encode(), dtype=np.uint8) - 48
            return motif[j % len(motif)]
        if self.seed is not None:
            return _splitmix_bits(self.seed, j + self.offset)
        return np.asarray(self.rule(j + self.offset), dtype=np.uint8)

    def shifted(self, k):
        if self.kind == 'constant' or k == 0:
            return self
        if self.kind == 'periodic':
            r = k % len(self.pattern)
            return replace(self, pattern=self.pattern[r:] + self.pattern[:r])
        return replace(self, offset=self.offset + k)

    def to_json(self):
        if self.kind == 'constant':
            return {'kind': 'constant', 'bit': int(self.pattern)}
        if self.kind == 'periodic':
            return {'kind': 'periodic', 'pattern': self.pattern}
        if self.seed is not None:
            return {'kind': 'generator', 'seed': self.seed, 'offset': self.offset}
        if hasattr(self.rule, 'to_json'):
            return {**self.rule.to_json(), 'offset': self.offset}
        raise ParameterError("Règle de queue non sérialisable")


@dataclass(frozen=True)
class SymbolSequence:
    """Point de Σ₂⁺ : préfixe fini explicite suivi d'une queue"""

    prefix: str = ''
    tail: Tail = field(default_factory=lambda: Tail('constant'))

    def __post_init__(self):
        if set(self.prefix) - {'0', '1'}:
            raise ParameterError(f"Préfixe non binaire: '{self.prefix}'")

    @classmethod
    def constant(cls, bit, prefix=''):
        return cls(prefix, Tail('constant', pattern=str(int(bit))))

    @classmethod
    def periodic(cls, pattern, prefix=''):
        if len(pattern) == 1:
            return cls.constant(pattern, prefix)
        return cls(prefix, Tail('periodic', pattern=pattern))

    @classmethod
    def generator(cls, seed, prefix=''):
        if seed < 0:
            raise ParameterError(f"Graine négative: {seed}")
        return cls(prefix, Tail('generator', seed=seed))

    @classmethod
    def from_rule(cls, rule, prefix='', offset=0):
        return cls(prefix, Tail('generator', rule=rule, offset=offset))

    def bit(self, i):
        return int(self.bits(i, 1)[0])

    def bits(self, start, count):
        """Symboles d'indices start, …, start + count - 1"""
        idx = np.arange(start, start + count, dtype=np.int64)
        out = np.empty(count, dtype=np.uint8)
        n = len(self.prefix)
        head = idx < n
        if head.any():
            motif = np.frombuffer(self.prefix.encode(), dtype=np.uint8) - 48
            out[head] = motif[idx[head]]
        if not head.all():
            out[~head] = self.tail.bits_at(idx[~head] - n)
        return out

    def shift(self, k=1):
        """σ^k : supprime les k premiers symboles"""
        if k < 0:
            raise ParameterError(f"Décalage négatif: {k}")
        n = len(self.prefix)
        if k <= n:
            return SymbolSequence(self.prefix[k:], self.tail)
        return SymbolSequence('', self.tail.shifted(k - n))

    def __str__(self):
        if self.tail.kind != 'generator':
            return f"{self.prefix}({self.tail.pattern})"
        return f"{self.prefix}<{self.tail.to_json()}>"

    def to_json(self):
        if self.tail.kind != 'generator':
            return str(self)
        return {'prefix': self.prefix, 'tail': self.tail.to_json()}

    @classmethod
    def from_json(cls, value):
        """Accepte "préfixe(motif)" ou {"prefix": ..., "tail": {...}}"""
        try:
            if isinstance(value, str):
                match = _COMPACT.match(value.strip())
                if not match:
                    raise ConfigError(f"Suite symbolique illisible: '{value}'")
                return cls.periodic(match.group(2), prefix=match.group(1))
            if isinstance(value, dict):
                prefix = value.get('prefix', '')
                tail = value.get('tail', {'kind': 'constant', 'bit': 0})
                kind = tail.get('kind')
                if kind == 'constant':
                    return cls.constant(tail.get('bit', 0), prefix)
                if kind == 'periodic':
                    return cls.periodic(tail['pattern'], prefix)
                if kind == 'generator':
                    seq = cls.generator(int(tail['seed']), prefix)
                    return cls(prefix, seq.tail.shifted(int(tail.get('offset', 0))))
                if kind == 'blocks':
                    rule = LabelledBlocks(code=int(tail['code']), width=int(tail['width']))
                    return cls.from_rule(rule, prefix, int(tail.get('offset', 0)))
                raise ConfigError(f"Type de queue inconnu: {kind}")
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Suite symbolique mal formée: {e}")
        except ParameterError as e:
            raise ConfigError(str(e))
        raise ConfigError(f"Suite symbolique attendue, reçu {type(value).__name__}")


# ============================================================================
# MÉTRIQUE ρ
# ============================================================================

class RhoValue(NamedTuple):
    value: float
    error_bound: float
    exact: bool


def _weighted_sum(diffs, start):
    weights = np.ldexp(1.0, -(np.arange(len(diffs)) + start))
    return float(np.dot(diffs.astype(np.float64), weights))


def rho(alpha, beta, depth=RHO_DEPTH):
    """
    ρ(α, β) = Σ |α_i - β_i| / 2^i.

    Forme close (erreur nulle) si les deux queues sont constantes ou périodiques,
    sinon troncature à depth symboles avec borne d'erreur 2^(1-depth).
    """
    if depth < 1:
        raise ParameterError(f"Profondeur invalide: {depth}")
    if alpha == beta:
        return RhoValue(0.0, 0.0, True)
    if alpha.tail.kind != 'generator' and beta.tail.kind != 'generator':
        n0 = max(len(alpha.prefix), len(beta.prefix))
        period = math.lcm(alpha.tail.period, beta.tail.period)
        if period <= RHO_MAX_EXACT_PERIOD:
            diffs = alpha.bits(0, n0 + period) != beta.bits(0, n0 + period)
            head = _weighted_sum(diffs[:n0], 0)
            cycle = _weighted_sum(diffs[n0:], n0)
            return RhoValue(head + cycle / (1.0 - math.ldexp(1.0, -period)), 0.0, True)
    diffs = alpha.bits(0, depth) != beta.bits(0, depth)
    return RhoValue(_weighted_sum(diffs, 0), math.ldexp(1.0, 1 - depth), False)


def shift(alpha, k=1):
    """Décalage σ^k"""
    return alpha.shift(k)


def cylinder_diag_distance(alpha, beta, depth=RHO_DEPTH):
    """
    Distance de (α, β) à la diagonale de Σ₂⁺ × Σ₂⁺ (métrique max).

    Recherche exhaustive sur les représentants de cylindres de profondeur depth :
    z copie α sur les t premières positions de désaccord et β ensuite.
    Le résultat est encadré par ρ/2 ≤ résultat ≤ ρ.
    """
    if alpha == beta:
        return 0.0
    total = rho(alpha, beta, depth).value
    diffs = alpha.bits(0, depth) != beta.bits(0, depth)
    weights = np.ldexp(1.0, -np.flatnonzero(diffs))
    partial = np.concatenate(([0.0], np.cumsum(weights)))
    value = float(np.min(np.maximum(partial, total - partial)))
    assert total / 2.0 - CLAMP_TOLERANCE <= value <= total + CLAMP_TOLERANCE, (value, total)
    return value


def agreement_counts(alpha, beta, depth):
    """Nombre de positions < depth où α et β coïncident / diffèrent"""
    equal = alpha.bits(0, depth) == beta.bits(0, depth)
    agree = int(np.count_nonzero(equal))
    return agree, depth - agree


# ============================================================================
# FAMILLE À BLOCS (DISTRIBUTIONNELLEMENT BROUILLÉE DANS Σ₂⁺)
# ============================================================================

def block_of(indices):
    """
    Bloc k des positions : le bloc k occupe [2^(k+1) - 2, 2^(k+2) - 2),
    sa première moitié porte l'étiquette, la seconde est remplie de 0.

    Returns:
        (k, dans_étiquette) pour chaque position
    """
    _, exponent = np.frexp(np.asarray(indices, dtype=np.float64) + 2.0)
    k = exponent.astype(np.int64) - 2
    start = (np.int64(1) << (k + 1)) - 2
    return k, np.asarray(indices) < start + (np.int64(1) << k)


@dataclass(frozen=True)
class LabelledBlocks:
    """Règle de queue : bloc k = bit (k mod width) de code, puis bloc de synchronisation"""

    code: int
    width: int

    def __call__(self, indices):
        k, labelled = block_of(indices)
        bits = (self.code >> (k % self.width)) & 1
        return np.where(labelled, bits, 0).astype(np.uint8)

    def to_json(self):
        return {'kind': 'blocks', 'code': self.code, 'width': self.width}


def scrambled_block_family(count, seed):
    """
    Famille finie de suites deux à deux distributionnellement brouillées.

    Chaque membre reçoit une étiquette périodique distincte (code sur width bits) ;
    les blocs d'étiquette de longueur doublante sont suivis d'un bloc de 0
    commun. Deux membres distincts diffèrent donc sur une infinité de blocs
    d'étiquette et coïncident sur tous les blocs de synchronisation.
    Le bloc k porte le bit k mod width du code : toute fenêtre de width blocs
    consécutifs contient un désaccord.

    Args:
        count: nombre de membres (≥ 2)
        seed: graine du tirage des codes

    Returns:
        liste de SymbolSequence
    """
    if count < 2:
        raise ParameterError(f"Au moins deux membres requis: {count}")
    width = max(1, math.ceil(math.log2(count)))
    rng = np.random.default_rng(seed)
    codes = rng.permutation(1 << width)[:count]
    logger.debug(f"Famille à blocs: {count} membres, étiquettes sur {width} bits")
    return [SymbolSequence.from_rule(LabelledBlocks(code=int(c), width=width))
            for c in codes]


def block_window_check(alpha, beta, depth, window_blocks, first_block=0):
    """
    Vérifie que toute fenêtre de window_blocks blocs consécutifs (à partir de
    first_block et contenue dans [0, depth)) contient au moins un accord et au
    moins un désaccord.
    """
    equal = alpha.bits(0, depth) == beta.bits(0, depth)
    k = first_block
    while True:
        lo = (1 << (k + 1)) - 2
        hi = (1 << (k + window_blocks + 1)) - 2
        if hi > depth:
            return True
        window = equal[lo:hi]
        if window.all() or not window.any():
            logger.debug(f"Fenêtre de blocs {k}..{k + window_blocks - 1} sans alternance")
            return False
        k += 1
