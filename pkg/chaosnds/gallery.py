"""
ChaosNDS - Galerie de systèmes
Systèmes de référence chargés depuis un manifeste JSON, métadonnées revérifiées
"""

import json
import logging
from dataclasses import dataclass
from itertools import product
from typing import Optional

from .constants import CLAMP_TOLERANCE, GALLERY_MANIFEST, MIXING_GRID, MIXING_HORIZON
from .constructors import (
    NestedFamily, PeriodicPointPair, nested_family_from_json, weak_mixing_probe
)
from .core import MapFamily, parse_number, system_from_config
from .exceptions import (
    ChaosError, ConfigError, CorruptGalleryError, ExpandingConditionError,
    PreconditionError
)
from .symbolic import SymbolSequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GallerySystem:
    """Système de la galerie et ses métadonnées vérifiées"""

    id: str
    system: MapFamily
    fixed_points: tuple
    pair: Optional[PeriodicPointPair] = None
    family: Optional[NestedFamily] = None
    mixing: bool = False
    description: str = ''


def _read_manifest(manifest):
    path = manifest or GALLERY_MANIFEST
    try:
        with open(path, encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise CorruptGalleryError(f"Manifeste illisible {path}: {e}")
    if not isinstance(data.get('systems'), dict):
        raise CorruptGalleryError(f"Manifeste sans section 'systems': {path}")
    return data['systems']


def gallery_ids(manifest=None):
    """Identifiants disponibles"""
    return sorted(_read_manifest(manifest))


def _point(system, value):
    if system.domain.vectorized:
        return float(parse_number(value))
    return system.domain.point_from_json(value)


def _check_fixed_points(system, points, horizon):
    for x in points:
        for n in range(horizon):
            image = system.step(n, x)
            same = (abs(image - x) <= CLAMP_TOLERANCE if system.domain.vectorized
                    else image == x)
            if not same:
                raise CorruptGalleryError(f"{x} n'est pas fixe pour f_{n}")


def _check_family(system, family, meta):
    depth = int(meta.get('depth', 16))
    try:
        report = family.verify(system, depth)
    except ExpandingConditionError as e:
        raise CorruptGalleryError(f"Condition d'expansion: {e}")
    if report.disjoint_at != meta.get('disjoint_at'):
        raise CorruptGalleryError(
            f"disjoint_at déclaré {meta.get('disjoint_at')}, trouvé {report.disjoint_at}"
        )
    if report.shrinking != bool(meta.get('shrinking')):
        raise CorruptGalleryError(f"Rétrécissement déclaré {meta.get('shrinking')}, "
                                  f"trouvé {report.shrinking}")


def _check_mixing(system):
    """
    Sur un intervalle : sonde de mélange faible sur chaque couple de cases (I_i, I_j)
    d'une grille fixe, ouverts (I_i, I_j, I_j, I_i). Sur Σ₂⁺ : chaque cylindre [u]
    atteint chaque cylindre [v] après |u| pas (mots de longueur 2).
    """
    if system.vectorized:
        lo, hi = system.domain.bounds
        width = (hi - lo) / MIXING_GRID
        cells = [(lo + (j + 0.25) * width, lo + (j + 0.75) * width) for j in range(MIXING_GRID)]
        for u, v in product(cells, repeat=2):
            if weak_mixing_probe(system, (u, v, v, u), MIXING_HORIZON) is None:
                raise CorruptGalleryError(f"Mélange déclaré mais ]{u[0]}, {u[1]}[ "
                                          f"n'atteint pas ]{v[0]}, {v[1]}[")
        return
    words = [''.join(w) for w in product('01', repeat=2)]
    for u, v in product(words, repeat=2):
        image = system.advance(SymbolSequence.from_json(f"{u}{v}(0)"), 0, len(u))
        if ''.join(str(b) for b in image.bits(0, len(v))) != v:
            raise CorruptGalleryError(f"Mélange déclaré mais [{u}] n'atteint pas [{v}]")


def gallery_entry(system_id, entry):
    """
    Construit et vérifie une entrée (même schéma que le manifeste embarqué).

    Raises:
        CorruptGalleryError si une métadonnée ne correspond pas au système
    """
    try:
        system = system_from_config({**entry['system'], 'strict': True})
        horizon = int(entry.get('verify_horizon', 256))
        fixed = tuple(_point(system, v) for v in entry.get('fixed_points', []))
        _check_fixed_points(system, fixed, horizon)

        pair = None
        if entry.get('periodic_pair'):
            meta = entry['periodic_pair']
            pair = PeriodicPointPair(system=system, x=_point(system, meta['x']),
                                     y=_point(system, meta['y']),
                                     periods=tuple(meta.get('periods', (1, 1))),
                                     delta=float(parse_number(meta['delta'])),
                                     horizon=horizon)
            pair.verify()

        family = None
        if entry.get('nested_family'):
            meta = entry['nested_family']
            family = nested_family_from_json(meta)
            _check_family(system, family, meta)

        mixing = bool(entry.get('mixing', False))
        if mixing:
            _check_mixing(system)
    except PreconditionError as e:
        raise CorruptGalleryError(f"{system_id}: {e}")
    except (KeyError, TypeError, ValueError, ConfigError) as e:
        raise CorruptGalleryError(f"{system_id}: entrée mal formée ({e})")
    except CorruptGalleryError:
        raise
    except ChaosError as e:
        raise CorruptGalleryError(f"{system_id}: {type(e).__name__}: {e}")

    logger.info(f"Système '{system_id}' chargé et vérifié")
    return GallerySystem(id=system_id, system=system, fixed_points=fixed, pair=pair,
                         family=family, mixing=mixing,
                         description=entry.get('description', ''))


def load_gallery(system_id, manifest=None):
    """
    Args:
        system_id: identifiant de la galerie (voir gallery_ids)
        manifest: chemin d'un manifeste utilisateur (défaut : manifeste embarqué)

    Returns:
        GallerySystem
    """
    systems = _read_manifest(manifest)
    if system_id not in systems:
        raise ConfigError(f"Système inconnu '{system_id}' (disponibles: {sorted(systems)})")
    return gallery_entry(system_id, systems[system_id])
