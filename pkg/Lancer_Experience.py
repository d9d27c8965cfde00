#!/usr/bin/env python3
"""
ChaosNDS - Lancement d'une expérience
Orbites, statistiques de paires, densités et constructions de paires brouillées

Exemples:
    python3 Lancer_Experience.py pair-stats --config configs/pair_logistique.json
    python3 Lancer_Experience.py construct merge --config configs/fusion.json --out fusion.csv
"""

import logging
import signal
import sys

from chaosnds.cli import main as run_cli
from chaosnds.constants import EXIT_NUMERIC
from chaosnds.gallery import gallery_ids

# Configuration du logging (stderr : la sortie standard porte le CSV)
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def _banner():
    lines = [
        "=" * 60,
        "    CHAOSNDS - EXPÉRIENCES",
        "=" * 60,
        "   Sous-commandes: orbit, pair-stats, scan-pairs, density,",
        "                   construct {aapo|expanding|merge}, probe weak-mixing",
        f"   Galerie: {', '.join(gallery_ids())}",
        "=" * 60,
    ]
    print('\n'.join(lines), file=sys.stderr)


def main():
    def signal_handler(sig, frame):
        """Arrêt propre : aucun fichier partiel n'est laissé"""
        logger.info("Signal d'arrêt reçu...")
        sys.exit(EXIT_NUMERIC)

    signal.signal(signal.SIGINT, signal_handler)
    signal.signal(signal.SIGTERM, signal_handler)

    if len(sys.argv) == 1:
        _banner()
    return run_cli(sys.argv[1:] or ['--help'])


if __name__ == '__main__':
    sys.exit(main())
