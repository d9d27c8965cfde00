"""
ChaosNDS - Systèmes dynamiques non autonomes
Domaines métriques, familles d'applications et calcul d'orbites
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Optional, Sequence

import numpy as np

from .constants import (
    MEMORY_CAP_POINTS, CLAMP_TOLERANCE, RHO_DEPTH, SYMBOL_DIAMETER, format_float
)
from .exceptions import (
    CapacityError, ConfigError, DomainViolationError, ParameterError
)
from .symbolic import SymbolSequence, cylinder_diag_distance, rho

logger = logging.getLogger(__name__)


def parse_number(value):
    """
    Convertit une valeur JSON en rationnel exact.

    Accepte les entiers, les flottants et les chaînes "p/q" ou décimales.
    """
    if isinstance(value, bool):
        raise ConfigError(f"Nombre attendu, booléen reçu: {value}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not np.isfinite(value):
            raise ConfigError(f"Nombre non fini: {value}")
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"Nombre illisible '{value}': {e}")
    raise ConfigError(f"Nombre attendu, reçu {type(value).__name__}")


def number_to_json(value):
    """Écrit un rationnel exact sous forme "p/q" (ou entier)"""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def van_der_corput(index, base=2):
    """Terme d'indice index de la suite de van der Corput"""
    result, denom = 0.0, 1.0
    while index > 0:
        index, digit = divmod(index, base)
        denom *= base
        result += digit / denom
    return result


# ============================================================================
# DOMAINES MÉTRIQUES
# ============================================================================

class MetricDomain:
    """
    Espace métrique compact sur lequel agit une famille d'applications.
    Les sous-classes fournissent la distance, l'appartenance et l'échantillonnage.
    """

    kind = 'abstract'
    vectorized = False

    def distance(self, x, y):
        raise NotImplementedError

    def contains(self, x):
        raise NotImplementedError

    def diameter(self):
        raise NotImplementedError

    def clamp(self, x, strict=False):
        return x

    def diag_distance(self, x, y):
        """Distance de (x, y) à la diagonale pour la métrique max sur X×X"""
        raise NotImplementedError

    def distances(self, xs, ys):
        return np.array([self.distance(x, y) for x, y in zip(xs, ys)], dtype=np.float64)

    def diag_distances(self, xs, ys):
        return np.array([self.diag_distance(x, y) for x, y in zip(xs, ys)], dtype=np.float64)

    def sample(self, rng, count):
        raise NotImplementedError

    def base_points(self, count):
        """Ensemble dénombrable dense X_0 tronqué (suite à faible discrépance)"""
        raise NotImplementedError

    def point_from_json(self, value):
        raise NotImplementedError

    def point_to_json(self, x):
        raise NotImplementedError

    def to_config(self):
        raise NotImplementedError


@dataclass(frozen=True)
class RealInterval(MetricDomain):
    """Intervalle réel [lo, hi] muni de d(x, y) = |x - y|"""

    lo: Fraction = Fraction(0)
    hi: Fraction = Fraction(1)

    kind = 'interval'
    vectorized = True

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ParameterError(f"Intervalle vide: [{self.lo}, {self.hi}]")

    @property
    def bounds(self):
        return float(self.lo), float(self.hi)

    def distance(self, x, y):
        return abs(float(x) - float(y))

    def distances(self, xs, ys):
        return np.abs(np.asarray(xs, dtype=np.float64) - np.asarray(ys, dtype=np.float64))

    def diag_distance(self, x, y):
        return self.distance(x, y) / 2.0

    def diag_distances(self, xs, ys):
        return self.distances(xs, ys) / 2.0

    def contains(self, x):
        lo, hi = self.bounds
        try:
            value = float(x)
        except (TypeError, ValueError):
            return False
        return lo <= value <= hi

    def diameter(self):
        return float(self.hi - self.lo)

    def clamp(self, x, strict=False):
        lo, hi = self.bounds
        if isinstance(x, float) and lo <= x <= hi:
            return x
        clipped = np.clip(x, lo, hi)
        drift = float(np.max(np.abs(np.asarray(x) - clipped))) if np.size(x) else 0.0
        if drift > CLAMP_TOLERANCE:
            if strict:
                raise DomainViolationError(
                    f"Sortie du domaine [{lo}, {hi}] de {drift:.3e}"
                )
            logger.debug(f"Ramenage dans [{lo}, {hi}] (écart {drift:.3e})")
        if np.ndim(clipped) == 0:
            return float(clipped)
        return clipped

    def sample(self, rng, count):
        lo, hi = self.bounds
        return list(rng.uniform(lo, hi, size=count))

    def base_points(self, count):
        lo, hi = self.bounds
        return [lo + (hi - lo) * van_der_corput(i) for i in range(count)]

    def point_from_json(self, value):
        point = float(parse_number(value))
        if not self.contains(point):
            raise DomainViolationError(f"Point {value} hors de [{self.lo}, {self.hi}]")
        return point

    def point_to_json(self, x):
        return format_float(x)

    def to_config(self):
        return [number_to_json(self.lo), number_to_json(self.hi)]


@dataclass(frozen=True)
class SymbolSpace(MetricDomain):
    """Espace Σ₂⁺ des suites binaires muni de la métrique ρ"""

    depth: int = RHO_DEPTH

    kind = 'symbols'

    def distance(self, x, y):
        return rho(x, y, self.depth).value

    def diag_distance(self, x, y):
        return cylinder_diag_distance(x, y, self.depth)

    def contains(self, x):
        return isinstance(x, SymbolSequence)

    def diameter(self):
        return SYMBOL_DIAMETER

    def sample(self, rng, count):
        points = []
        for _ in range(count):
            prefix = ''.join(str(b) for b in rng.integers(0, 2, size=16))
            period = int(rng.integers(1, 5))
            pattern = ''.join(str(b) for b in rng.integers(0, 2, size=period))
            points.append(SymbolSequence.periodic(pattern, prefix=prefix))
        return points

    def base_points(self, count):
        # e_i : écriture binaire de i (poids faible en tête) puis 0^∞
        return [SymbolSequence.constant(0, prefix=format(i, 'b')[::-1] if i else '')
                for i in range(count)]

    def point_from_json(self, value):
        return SymbolSequence.from_json(value)

    def point_to_json(self, x):
        return x.to_json()

    def to_config(self):
        return {'depth': self.depth}


@dataclass(frozen=True)
class ProductDomain(MetricDomain):
    """Produit de deux domaines muni de la métrique max"""

    first: MetricDomain
    second: MetricDomain

    kind = 'product'

    def distance(self, x, y):
        return max(self.first.distance(x[0], y[0]), self.second.distance(x[1], y[1]))

    def diag_distance(self, x, y):
        # les composantes sont indépendantes pour la métrique max
        return max(self.first.diag_distance(x[0], y[0]),
                   self.second.diag_distance(x[1], y[1]))

    def contains(self, x):
        return (isinstance(x, tuple) and len(x) == 2
                and self.first.contains(x[0]) and self.second.contains(x[1]))

    def diameter(self):
        return max(self.first.diameter(), self.second.diameter())

    def clamp(self, x, strict=False):
        return (self.first.clamp(x[0], strict), self.second.clamp(x[1], strict))

    def sample(self, rng, count):
        return list(zip(self.first.sample(rng, count), self.second.sample(rng, count)))

    def base_points(self, count):
        return list(zip(self.first.base_points(count), self.second.base_points(count)))

    def point_from_json(self, value):
        if not isinstance(value, list) or len(value) != 2:
            raise ConfigError(f"Point produit attendu [x, y], reçu {value}")
        return (self.first.point_from_json(value[0]), self.second.point_from_json(value[1]))

    def point_to_json(self, x):
        return [self.first.point_to_json(x[0]), self.second.point_to_json(x[1])]

    def to_config(self):
        return None


def product_metric(domain, x, y):
    """Métrique max sur X×X : d'((x1, x2), (y1, y2)) = max(d(x1, y1), d(x2, y2))"""
    return ProductDomain(domain, domain).distance(x, y)


# ============================================================================
# RÈGLES (APPLICATIONS f_n)
# ============================================================================

class MapRule:
    """Règle pure (n, x) -> f_n(x); vectorisée sur les tableaux numpy si possible"""

    kind = 'abstract'
    vectorized = True
    autonomous = True

    def __call__(self, n, x):
        raise NotImplementedError

    def to_config(self):
        raise NotImplementedError


@dataclass(frozen=True)
class LogisticRule(MapRule):
    """f_n(x) = r_n x (1 - x), r_n périodique en n"""

    r: tuple = (4.0,)

    kind = 'logistic'

    def __post_init__(self):
        if not self.r or any(not 0.0 <= v <= 4.0 for v in self.r):
            raise ParameterError(f"Paramètre logistique hors de [0, 4]: {self.r}")

    @property
    def autonomous(self):
        return len(self.r) == 1

    def __call__(self, n, x):
        r = self.r[n % len(self.r)]
        return r * x * (1.0 - x)

    def to_config(self):
        return {'kind': 'logistic',
                'r': self.r[0] if len(self.r) == 1 else list(self.r)}


@dataclass(frozen=True)
class TentRule(MapRule):
    """f_n(x) = s_n min(x, 1 - x)"""

    slopes: tuple = (2.0,)

    kind = 'tent'

    def __post_init__(self):
        if not self.slopes or any(not 0.0 <= s <= 2.0 for s in self.slopes):
            raise ParameterError(f"Pente de la tente hors de [0, 2]: {self.slopes}")

    @property
    def autonomous(self):
        return len(self.slopes) == 1

    def __call__(self, n, x):
        s = self.slopes[n % len(self.slopes)]
        value = s * np.minimum(x, 1.0 - x)
        return float(value) if np.ndim(value) == 0 else value

    def to_config(self):
        return {'kind': 'tent',
                'slope': self.slopes[0] if len(self.slopes) == 1 else list(self.slopes)}


def _pl_value(table, x):
    """Valeur exacte d'une application affine par morceaux en x"""
    for (x0, y0), (x1, y1) in zip(table, table[1:]):
        if x0 <= x <= x1:
            if x1 == x0:
                return y0
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    raise DomainViolationError(f"Point {x} hors des points de cassure")


def _check_table(table):
    xs = [p[0] for p in table]
    if len(table) < 2 or any(b <= a for a, b in zip(xs, xs[1:])):
        raise ParameterError("Abscisses des points de cassure non strictement croissantes")
    return tuple((Fraction(x), Fraction(y)) for x, y in table)


class PiecewiseLinearBase(MapRule):
    """Partie commune des applications continues affines par morceaux"""

    def breakpoints(self, n):
        """Points de cassure exacts de f_n"""
        raise NotImplementedError

    def breakpoints_array(self, n):
        """Points de cassure flottants de f_n pour un tableau d'indices n, forme (N, K)"""
        raise NotImplementedError


@dataclass(frozen=True)
class PiecewiseLinearRule(PiecewiseLinearBase):
    """
    f_n affine par morceaux, table de points de cassure périodique en n.
    Les points de cassure sont rationnels exacts.
    """

    tables: tuple = ()
    config: Optional[dict] = field(default=None, compare=False, hash=False)

    kind = 'piecewise-linear'

    def __post_init__(self):
        if not self.tables:
            raise ParameterError("Aucune table de points de cassure")
        tables = tuple(_check_table(t) for t in self.tables)
        object.__setattr__(self, 'tables', tables)
        width = max(len(t) for t in tables)
        xs = np.empty((len(tables), width))
        ys = np.empty((len(tables), width))
        for i, table in enumerate(tables):
            padded = list(table) + [table[-1]] * (width - len(table))
            xs[i] = [float(p[0]) for p in padded]
            ys[i] = [float(p[1]) for p in padded]
        object.__setattr__(self, '_xs', xs)
        object.__setattr__(self, '_ys', ys)

    @property
    def autonomous(self):
        return len(self.tables) == 1

    def __call__(self, n, x):
        i = n % len(self.tables)
        value = np.interp(x, self._xs[i], self._ys[i])
        return float(value) if np.ndim(value) == 0 else value

    def breakpoints(self, n):
        return self.tables[n % len(self.tables)]

    def breakpoints_array(self, n):
        i = np.asarray(n) % len(self.tables)
        return self._xs[i], self._ys[i]

    def to_config(self):
        if self.config is not None:
            return dict(self.config)
        tables = [[[number_to_json(x), number_to_json(y)] for x, y in t] for t in self.tables]
        if len(tables) == 1:
            return {'kind': 'piecewise-linear', 'breakpoints': tables[0]}
        return {'kind': 'piecewise-linear', 'schedule': tables}


def doubling_rule(gamma):
    """
    Application continue de type doublement sur [0, 1] :
    pente 2 sur [0, 1/2], descente de 1 à 0 sur [1/2, 1/2+γ], montée sur [1/2+γ, 1].
    """
    gamma = Fraction(gamma)
    if not 0 < gamma < Fraction(1, 2):
        raise ParameterError(f"γ doit être dans ]0, 1/2[: {gamma}")
    half = Fraction(1, 2)
    table = ((0, 0), (half, 1), (half + gamma, 0), (1, 1))
    return PiecewiseLinearRule(tables=(table,),
                               config={'kind': 'doubling', 'gamma': number_to_json(gamma)})


@dataclass(frozen=True)
class ExpandingRule(PiecewiseLinearBase):
    """
    Applications non autonomes à trois morceaux de largeur w = 1/(n + 1 + offset) :
    montée sur [0, w], descente sur [w, 1 - w], montée sur [1 - w, 1].
    """

    offset: int = 2

    kind = 'expanding'
    autonomous = False

    def __post_init__(self):
        if self.offset < 2:
            raise ParameterError(f"Décalage minimal 2 (largeur < 1/2): {self.offset}")

    def width(self, n):
        return Fraction(1, n + 1 + self.offset)

    def __call__(self, n, x):
        w = 1.0 / (n + 1 + self.offset)
        value = np.interp(x, (0.0, w, 1.0 - w, 1.0), (0.0, 1.0, 0.0, 1.0))
        return float(value) if np.ndim(value) == 0 else value

    def breakpoints(self, n):
        w = self.width(n)
        return ((Fraction(0), Fraction(0)), (w, Fraction(1)),
                (1 - w, Fraction(0)), (Fraction(1), Fraction(1)))

    def breakpoints_array(self, n):
        w = 1.0 / (np.asarray(n, dtype=np.float64) + 1 + self.offset)
        xs = np.stack([np.zeros_like(w), w, 1.0 - w, np.ones_like(w)], axis=-1)
        ys = np.broadcast_to(np.array([0.0, 1.0, 0.0, 1.0]), xs.shape)
        return xs, ys

    def to_config(self):
        return {'kind': 'expanding', 'offset': self.offset}


@dataclass(frozen=True)
class ShiftRule(MapRule):
    """Décalage σ sur Σ₂⁺"""

    kind = 'shift'
    vectorized = False

    def __call__(self, n, x):
        return x.shift(1)

    def to_config(self):
        return {'kind': 'shift'}


@dataclass(frozen=True)
class ProductRule(MapRule):
    """f_n × g_n sur le produit de deux domaines"""

    first: MapRule
    second: MapRule

    kind = 'product'
    vectorized = False

    @property
    def autonomous(self):
        return self.first.autonomous and self.second.autonomous

    def __call__(self, n, x):
        return (self.first(n, x[0]), self.second(n, x[1]))

    def to_config(self):
        return {'kind': 'product',
                'factors': [self.first.to_config(), self.second.to_config()]}


# ============================================================================
# FAMILLES D'APPLICATIONS ET ORBITES
# ============================================================================

@dataclass(frozen=True)
class MapFamily:
    """
    Système non autonome x_{n+1} = f_n(x_n).
    strict=True impose un écart de ramenage < CLAMP_TOLERANCE à chaque pas.
    """

    rule: MapRule
    domain: MetricDomain
    description: str = ''
    strict: bool = False

    @property
    def vectorized(self):
        return self.rule.vectorized and self.domain.vectorized

    @property
    def piecewise_linear(self):
        return isinstance(self.rule, PiecewiseLinearBase)

    def step(self, n, x):
        """Applique f_n puis ramène le résultat dans le domaine"""
        return self.domain.clamp(self.rule(n, x), self.strict)

    def advance(self, x, start, steps):
        """Calcule f_{start+steps-1} ∘ … ∘ f_start (x)"""
        if isinstance(self.rule, ShiftRule):
            return x.shift(steps)
        for n in range(start, start + steps):
            x = self.step(n, x)
        return x

    def to_config(self):
        cfg = self.rule.to_config()
        domain = self.domain.to_config()
        if isinstance(self.domain, RealInterval):
            cfg['interval'] = domain
        elif isinstance(self.domain, SymbolSpace):
            cfg['depth'] = domain['depth']
        if self.strict:
            cfg['strict'] = True
        if self.description:
            cfg['description'] = self.description
        return cfg


@dataclass(frozen=True)
class Orbit:
    """Orbite x_0, …, x_horizon avec x_{n+1} = f_n(x_n)"""

    start: Any
    horizon: int
    points: Any

    def __len__(self):
        return self.horizon + 1

    def __getitem__(self, n):
        return self.points[n]


def _check_start(system, start):
    if not system.domain.contains(start):
        raise DomainViolationError(f"Point de départ {start} hors du domaine")


def _check_capacity(count):
    if count > MEMORY_CAP_POINTS:
        raise CapacityError(
            f"{count} points demandés, capacité {MEMORY_CAP_POINTS}"
        )


def compose_orbit(system, start, horizon):
    """
    Orbite de start jusqu'à l'horizon inclus.

    Args:
        system: MapFamily
        start: point du domaine
        horizon: nombre de pas (≥ 0)

    Returns:
        Orbit de longueur horizon + 1
    """
    if horizon < 0:
        raise ParameterError(f"Horizon négatif: {horizon}")
    _check_start(system, start)
    _check_capacity(horizon + 1)

    if system.domain.vectorized:
        points = np.empty(horizon + 1, dtype=np.float64)
    else:
        points = [None] * (horizon + 1)
    x = start
    points[0] = x
    for n in range(horizon):
        x = system.step(n, x)
        points[n + 1] = x
    return Orbit(start=start, horizon=horizon, points=points)


def _checked_indices(indices):
    previous = -1
    for p in indices:
        p = int(p)
        if p <= previous:
            raise ParameterError(f"Indices non strictement croissants ({previous}, {p})")
        previous = p
        yield p


def orbit_at_indices(system, start, indices) -> Iterator:
    """
    Flux paresseux des couples (p, f_0^p(start)) pour p dans indices.
    Mémoire O(1) quelle que soit la longueur de la suite.
    """
    _check_start(system, start)
    x, n = start, 0
    for p in _checked_indices(indices):
        while n < p:
            x = system.step(n, x)
            n += 1
        yield p, x


def orbit_batch(system, starts: Sequence, indices: Iterable[int]):
    """
    Évaluation synchronisée de plusieurs orbites aux mêmes indices.

    Returns:
        tableau (len(indices), len(starts)) pour les domaines vectorisés,
        liste de listes sinon
    """
    for s in starts:
        _check_start(system, s)
    index_list = list(_checked_indices(indices))
    _check_capacity(len(index_list) * max(1, len(starts)))

    if system.vectorized:
        x = np.array(starts, dtype=np.float64)
        out = np.empty((len(index_list), len(starts)), dtype=np.float64)
    else:
        x = list(starts)
        out = []
    n = 0
    for row, p in enumerate(index_list):
        while n < p:
            if system.vectorized:
                x = system.step(n, x)
            else:
                x = [system.step(n, v) for v in x]
            n += 1
        if system.vectorized:
            out[row] = x
        else:
            out.append(list(x))
    return out


def interval_image(system, n, lo, hi):
    """
    Image exacte de [lo, hi] par f_n pour une application affine par morceaux.

    Returns:
        (min, max) rationnels de f_n([lo, hi])
    """
    if not system.piecewise_linear:
        raise ParameterError("Image exacte réservée aux applications affines par morceaux")
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ParameterError(f"Intervalle vide [{lo}, {hi}]")
    table = system.rule.breakpoints(n)
    values = [_pl_value(table, lo), _pl_value(table, hi)]
    values += [y for x, y in table if lo < x < hi]
    return min(values), max(values)


# ============================================================================
# SCHÉMA JSON DES SYSTÈMES
# ============================================================================

def _as_tuple(value, name):
    values = value if isinstance(value, list) else [value]
    if not values:
        raise ConfigError(f"Liste vide pour '{name}'")
    return tuple(float(parse_number(v)) for v in values)


def _rule_from_config(cfg):
    kind = cfg.get('kind')
    if kind == 'logistic':
        return LogisticRule(r=_as_tuple(cfg.get('r', 4), 'r'))
    if kind == 'tent':
        return TentRule(slopes=_as_tuple(cfg.get('slope', 2), 'slope'))
    if kind == 'doubling':
        return doubling_rule(parse_number(cfg.get('gamma', '1/16')))
    if kind == 'piecewise-linear':
        if 'schedule' in cfg:
            raw = cfg['schedule']
        elif 'breakpoints' in cfg:
            raw = [cfg['breakpoints']]
        else:
            raise ConfigError("Clé 'breakpoints' ou 'schedule' requise")
        try:
            tables = tuple(tuple((parse_number(x), parse_number(y)) for x, y in t)
                           for t in raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Table de points de cassure mal formée: {e}")
        return PiecewiseLinearRule(tables=tables)
    if kind == 'expanding':
        return ExpandingRule(offset=int(cfg.get('offset', 2)))
    if kind == 'shift':
        return ShiftRule()
    raise ConfigError(f"Type d'application inconnu: {kind}")


def system_from_config(cfg):
    """
    Construit une MapFamily depuis un dictionnaire JSON.

    Exemple : {"kind": "logistic", "r": [3.5, 4.0], "interval": [0, 1]}
    """
    if not isinstance(cfg, dict):
        raise ConfigError(f"Objet système attendu, reçu {type(cfg).__name__}")
    kind = cfg.get('kind')
    try:
        if kind == 'product':
            factors = cfg.get('factors')
            if not isinstance(factors, list) or len(factors) != 2:
                raise ConfigError("Un produit demande exactement deux facteurs")
            first, second = (system_from_config(f) for f in factors)
            return MapFamily(rule=ProductRule(first.rule, second.rule),
                             domain=ProductDomain(first.domain, second.domain),
                             description=cfg.get('description', ''),
                             strict=bool(cfg.get('strict', False)))
        rule = _rule_from_config(cfg)
        if kind == 'shift':
            domain = SymbolSpace(depth=int(cfg.get('depth', RHO_DEPTH)))
        else:
            bounds = cfg.get('interval', [0, 1])
            if not isinstance(bounds, list) or len(bounds) != 2:
                raise ConfigError(f"Intervalle attendu [a, b], reçu {bounds}")
            domain = RealInterval(parse_number(bounds[0]), parse_number(bounds[1]))
    except ParameterError as e:
        raise ConfigError(f"Système '{kind}' invalide: {e}")
    return MapFamily(rule=rule, domain=domain,
                     description=cfg.get('description', ''),
                     strict=bool(cfg.get('strict', False)))


def system_to_config(system):
    """Inverse de system_from_config"""
    return system.to_config()
