"""
ChaosNDS - Configuration des expériences
Paramètres par défaut et lecture des fichiers JSON d'expérience
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Optional

from .constants import (
    DEFAULT_TAU_HI, DEFAULT_TAU_LO, EPS_GRID_FACTORS, MIXING_SAMPLES
)
from .exceptions import ConfigError

logger = logging.getLogger(__name__)

# Tolérances des verdicts
TOLERANCES_CONFIG = {
    'tau_hi': DEFAULT_TAU_HI,     # F* ≥ 1 - tau_hi
    'tau_lo': DEFAULT_TAU_LO,     # F ≤ tau_lo
    'tau_prox': None,             # None : fraction du diamètre
}

# Estimation des fonctions de distribution
ESTIMATION_CONFIG = {
    'horizon': 100000,            # Nombre d'instants
    'window': None,               # None : horizon / 10
    'eps_factors': list(EPS_GRID_FACTORS),
}

# Balayage de paires
SCAN_CONFIG = {
    'sample': 10,                 # Taille de l'échantillon aléatoire
    'threads': 1,                 # Fils de calcul
}

# Constructions
CONSTRUCTION_CONFIG = {
    'aapo_depth': 5,              # Profondeur du calendrier m_n
    'base_points': 16,            # Taille de X_0 tronqué
    'family_size': 2,             # Membres de la famille à blocs
    'k_max': 7,                   # Calendrier de fusion n_k
}

# Sonde de mélange faible
PROBE_CONFIG = {
    'horizon': 64,
    'samples': MIXING_SAMPLES,
}

# Réglages d'exécution sans effet sur les résultats (absents de l'en-tête)
RUNTIME_KEYS = ('threads',)

OPERATIONS = ('orbit', 'pair-stats', 'scan-pairs', 'density',
              'construct-aapo', 'construct-expanding', 'construct-merge',
              'probe-weak-mixing')


def get_tolerances_config():
    """Retourne la configuration des tolérances"""
    return TOLERANCES_CONFIG.copy()


def get_estimation_config():
    """Retourne la configuration d'estimation"""
    return ESTIMATION_CONFIG.copy()


def get_scan_config():
    """Retourne la configuration du balayage"""
    return SCAN_CONFIG.copy()


def get_construction_config():
    """Retourne la configuration des constructions"""
    return CONSTRUCTION_CONFIG.copy()


def get_probe_config():
    """Retourne la configuration de la sonde"""
    return PROBE_CONFIG.copy()


@dataclass
class ExperimentConfig:
    """
    Expérience : opération, paramètres (défauts complétés) et graine.
    Tous les paramètres sont recopiés dans l'en-tête du CSV produit.
    """

    operation: str
    params: dict = field(default_factory=dict)
    seed: Optional[int] = None
    source: str = ''

    def get(self, key, default=None):
        return self.params.get(key, default)

    def require(self, key):
        if key not in self.params:
            raise ConfigError(f"Paramètre '{key}' requis pour {self.operation}")
        return self.params[key]

    def require_seed(self):
        if self.seed is None:
            raise ConfigError(f"Graine (--seed ou \"seed\") requise pour {self.operation}")
        return self.seed

    def header(self):
        """Paramètres dans un ordre déterministe (hors réglages d'exécution)"""
        items = {'operation': self.operation, 'seed': self.seed, **self.params}
        for key in RUNTIME_KEYS:
            items.pop(key, None)
        return [(k, json.dumps(items[k], sort_keys=True, ensure_ascii=False))
                for k in sorted(items)]


def _defaults_for(operation):
    if operation == 'scan-pairs':
        return {**get_estimation_config(), 'tolerances': get_tolerances_config(),
                'threads': get_scan_config()['threads'],
                'sample': get_scan_config()['sample']}
    if operation == 'pair-stats':
        return {**get_estimation_config(), 'tolerances': get_tolerances_config()}
    if operation == 'construct-expanding':
        return {'tolerances': get_tolerances_config(),
                'family_size': get_construction_config()['family_size']}
    if operation == 'construct-aapo':
        cfg = get_construction_config()
        return {'depth': cfg['aapo_depth'], 'base_points': cfg['base_points']}
    if operation == 'construct-merge':
        return {'k_max': get_construction_config()['k_max']}
    if operation == 'probe-weak-mixing':
        return get_probe_config()
    return {}


def make_config(operation, params=None, seed=None, source=''):
    """Complète les paramètres avec les défauts de l'opération"""
    if operation not in OPERATIONS:
        raise ConfigError(f"Opération inconnue: {operation}")
    merged = {**_defaults_for(operation), **(params or {})}
    if 'tolerances' in merged:
        merged['tolerances'] = {**get_tolerances_config(), **(merged['tolerances'] or {})}
    if seed is not None and not isinstance(seed, int):
        raise ConfigError(f"Graine entière attendue: {seed}")
    return ExperimentConfig(operation=operation, params=merged, seed=seed, source=source)


def load_config(path, operation=None):
    """
    Lit un fichier JSON d'expérience.

    Le champ "operation" peut être omis si l'opération est donnée par la CLI ;
    "seed" est optionnel.
    """
    try:
        with open(path, encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"Configuration illisible {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON mal formé dans {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Objet JSON attendu dans {path}")
    declared = data.pop('operation', None)
    if operation and declared and declared != operation:
        raise ConfigError(f"Opération '{declared}' dans {path}, '{operation}' demandée")
    seed = data.pop('seed', None)
    logger.debug(f"Configuration chargée depuis {path}")
    return make_config(operation or declared, data, seed, source=str(path))
