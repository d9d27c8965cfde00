"""
ChaosNDS - Constantes partagées
Valeurs par défaut des calculs d'orbites, de densités et de verdicts
"""

import os

# ============================================================================
# CAPACITÉ ET PRÉCISION
# ============================================================================

# Nombre maximal de points matérialisés pour une orbite ou une suite
MEMORY_CAP_POINTS = 2 ** 27

# Longueur matérialisée par défaut d'une suite d'indices générée
DEFAULT_MATERIALIZATION = 1024

# Écart maximal toléré lors du ramenage d'un point dans l'intervalle
CLAMP_TOLERANCE = 1e-12

# Tolérance sur la largeur des intervalles (arithmétique d'intervalles)
INTERVAL_WIDTH_TOLERANCE = 1e-12

# Précision machine visée pour les enveloppes rétrogrades
ENCLOSURE_TARGET_WIDTH = 1e-17

# Nombre maximal de pas rétrogrades par bloc vectorisé
MAX_LOOKAHEAD = 256

# Taille d'un bloc de niveaux traité en une passe vectorisée
ENCLOSURE_CHUNK = 2 ** 20

# Plus grand entier natif (int64)
INT64_MAX = 2 ** 63 - 1

# ============================================================================
# ESPACE SYMBOLIQUE
# ============================================================================

# Profondeur de troncature de la métrique ρ
RHO_DEPTH = 64

# Période maximale traitée en forme close (au-delà : troncature)
RHO_MAX_EXACT_PERIOD = 4096

# Diamètre de Σ₂⁺ pour ρ
SYMBOL_DIAMETER = 2.0

# ============================================================================
# ESTIMATION DES FONCTIONS DE DISTRIBUTION
# ============================================================================

# Fenêtre glissante par défaut (fraction de l'horizon)
DEFAULT_WINDOW_RATIO = 0.1

# Grille des ε (fractions du diamètre)
EPS_GRID_FACTORS = (0.2, 0.1, 0.05, 0.01)

# Tolérances des verdicts
DEFAULT_TAU_HI = 0.05      # F* ≥ 1 - tau_hi
DEFAULT_TAU_LO = 0.05      # F ≤ tau_lo
DEFAULT_TAU_PROX = 1e-3    # proximité (fraction du diamètre)

# δ' = δ/4 pour le verdict par ensembles d'atteinte
DELTA_PRIME_RATIO = 0.25

# Valeurs de δ essayées pour le verdict dc_pair (fractions de δ)
DC_DELTA_FACTORS = (1.0, 0.5, 0.25)

# ============================================================================
# CONSTRUCTIONS
# ============================================================================

# Longueur minimale d'un bloc du témoin de densité 1
WITNESS_MIN_BLOCK = 8

# Paramètres par défaut du témoin (rondes, base des cibles 1 - 1/base^r)
WITNESS_ROUNDS = 2
WITNESS_BASE = 10

# Échantillons par intervalle pour la sonde de mélange faible
MIXING_SAMPLES = 257

# Vérification du drapeau de mélange de la galerie (cases de la grille, horizon)
MIXING_GRID = 4
MIXING_HORIZON = 64

# ============================================================================
# SORTIES ET CLI
# ============================================================================

# Chiffres significatifs des flottants écrits
FLOAT_DIGITS = 17

# Codes de sortie
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2

# Manifeste de la galerie embarqué
GALLERY_MANIFEST = os.path.join(os.path.dirname(__file__), 'gallery.json')


def format_float(value):
    """Écrit un flottant avec FLOAT_DIGITS chiffres significatifs"""
    return format(float(value), f'.{FLOAT_DIGITS}g')
