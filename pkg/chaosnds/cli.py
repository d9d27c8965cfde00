"""
ChaosNDS - Interface en ligne de commande
Sous-commandes : orbit, pair-stats, scan-pairs, density,
construct {aapo|expanding|merge}, probe weak-mixing
"""

import argparse
import csv
import io
import logging
import os
import sys
import tempfile

import numpy as np

from .config import load_config, make_config
from .constants import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, format_float
from .constructors import (
    build_aapo, build_dc_pair_expanding, checkpoint_schedule, concatenation_tracer,
    merge_dc_sequence, schedule_covering, verify_aapo, verify_average_shadowing,
    weak_mixing_probe
)
from .core import ShiftRule, compose_orbit, system_from_config
from .distchaos import (
    PairVerdict, Tolerances, classify_pair, dc_verdict_dual, default_eps_grid,
    pair_profile, scan_pairs, write_scan_csv
)
from .exceptions import ChaosError, ConfigError
from .gallery import load_gallery
from .seqdensity import IndexSequence, naturals, relative_density
from .symbolic import SymbolSequence, scrambled_block_family

logger = logging.getLogger(__name__)

PAIR_COLUMNS = ['x', 'y', 'horizon', 'window', 'eps', 'upper_F', 'lower_F', 'delta',
                *PairVerdict.FLAG_NAMES]


class _Parser(argparse.ArgumentParser):
    """Les erreurs d'usage deviennent des erreurs de configuration (code 1)"""

    def error(self, message):
        raise ConfigError(message)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help="fichier JSON d'expérience")
    common.add_argument('--out', help='fichier CSV de sortie (défaut : sortie standard)')
    common.add_argument('--threads', type=int, help='fils de calcul (scan-pairs)')
    common.add_argument('--seed', type=int, help='graine des tirages aléatoires')
    common.add_argument('--system', help='identifiant de la galerie')
    common.add_argument('--horizon', type=int, help="nombre d'instants")

    parser = _Parser(prog='chaosnds',
                     description='Chaos distributionnel des systèmes non autonomes')
    sub = parser.add_subparsers(dest='command', required=True)
    for name in ('orbit', 'pair-stats', 'scan-pairs', 'density'):
        sub.add_parser(name, parents=[common])
    construct = sub.add_parser('construct', parents=[common])
    construct.add_argument('kind', choices=['aapo', 'expanding', 'merge'])
    probe = sub.add_parser('probe', parents=[common])
    probe.add_argument('kind', choices=['weak-mixing'])
    for name in ('--u1', '--v1', '--u2', '--v2'):
        probe.add_argument(name, nargs=2, type=float, metavar=('LO', 'HI'))
    probe.add_argument('--samples', type=int, help='points échantillonnés par ouvert')
    return parser


def _config_from_args(args):
    operation = args.command if not hasattr(args, 'kind') else f"{args.command}-{args.kind}"
    if args.config:
        config = load_config(args.config, operation)
    else:
        config = make_config(operation)
    if args.seed is not None:
        config.seed = args.seed
    overrides = {'threads': args.threads, 'system': args.system, 'horizon': args.horizon,
                 'samples': getattr(args, 'samples', None)}
    config.params.update({k: v for k, v in overrides.items() if v is not None})
    opens = [getattr(args, name, None) for name in ('u1', 'v1', 'u2', 'v2')]
    if any(o is not None for o in opens):
        if not all(o is not None for o in opens):
            raise ConfigError("--u1, --v1, --u2 et --v2 vont ensemble")
        config.params['opens'] = [list(o) for o in opens]
    return config


# ============================================================================
# OUTILS COMMUNS
# ============================================================================

def _resolve_system(config):
    """Système de la galerie (identifiant) ou système en ligne (objet JSON)"""
    value = config.require('system')
    if isinstance(value, str):
        entry = load_gallery(value)
        return entry.system, entry
    if isinstance(value, dict) and 'gallery' in value:
        entry = load_gallery(value['gallery'], value.get('manifest'))
        return entry.system, entry
    return system_from_config(value), None


def _tolerances(config):
    try:
        return Tolerances(**config.get('tolerances', {}))
    except TypeError as e:
        raise ConfigError(f"Tolérances invalides: {e}")


def _grid(config, diameter):
    if config.get('eps_grid'):
        return tuple(float(e) for e in config.get('eps_grid'))
    return default_eps_grid(diameter, tuple(config.get('eps_factors')))


def _indices(config):
    horizon = int(config.require('horizon'))
    if config.get('indices') is not None:
        return IndexSequence.from_json(config.get('indices')).prefix(horizon)
    return naturals(horizon)


def _pair_rows(writer, domain, x, y, verdict):
    for est in verdict.estimates:
        writer.writerow([domain.point_to_json(x), domain.point_to_json(y), verdict.horizon,
                         verdict.window, format_float(est.epsilon), format_float(est.upper_F),
                         format_float(est.lower_F), format_float(verdict.delta),
                         *(verdict.flags()[name].value for name in PairVerdict.FLAG_NAMES)])


def _schedule_checkpoints(m, horizon):
    return [v for v in m[1:] if v <= horizon]


# ============================================================================
# OPÉRATIONS
# ============================================================================

def _run_orbit(config, stream):
    writer = csv.writer(stream, lineterminator='\n')
    system, _ = _resolve_system(config)
    start = system.domain.point_from_json(config.require('start'))
    orbit = compose_orbit(system, start, int(config.require('horizon')))
    stride = int(config.get('stride', 1))
    writer.writerow(['n', 'x'])
    for n in range(0, len(orbit), stride):
        writer.writerow([n, system.domain.point_to_json(orbit[n])])


def _run_pair_stats(config, stream):
    writer = csv.writer(stream, lineterminator='\n')
    system, _ = _resolve_system(config)
    domain = system.domain
    x = domain.point_from_json(config.require('x'))
    y = domain.point_from_json(config.require('y'))
    profile = pair_profile(system, x, y, _indices(config))
    grid = _grid(config, domain.diameter())
    delta = float(config.require('delta'))
    checkpoints = config.get('checkpoints')
    tol = _tolerances(config)
    verdict = classify_pair(profile, delta, tol, grid, config.get('window'), checkpoints)
    writer.writerow(PAIR_COLUMNS)
    _pair_rows(writer, domain, x, y, verdict)
    if config.get('dual'):
        dual = dc_verdict_dual(profile, delta, tol, grid, config.get('window'), checkpoints)
        writer.writerow(['direct', 'hitting', 'agreement'])
        writer.writerow([dual.direct_flag.value, dual.hitting_flag.value,
                         '' if dual.agreement is None else str(dual.agreement).lower()])


def _run_scan_pairs(config, stream):
    system, _ = _resolve_system(config)
    domain = system.domain
    sample = config.require('sample')
    if isinstance(sample, list):
        points = [domain.point_from_json(v) for v in sample]
    else:
        count = int(sample['random'] if isinstance(sample, dict) else sample)
        points = domain.sample(np.random.default_rng(config.require_seed()), count)
    rows = scan_pairs(system, points, _indices(config), float(config.require('delta')),
                      _tolerances(config), int(config.get('threads', 1)),
                      _grid(config, domain.diameter()), config.get('window'))
    write_scan_csv(rows, stream, domain)


def _run_density(config, stream):
    writer = csv.writer(stream, lineterminator='\n')
    P = IndexSequence.from_json(config.require('P'))
    Q = IndexSequence.from_json(config.get('Q', {'kind': 'arithmetic'}))
    horizons = config.get('horizons') or [config.require('horizon')]
    writer.writerow(['horizon', 'window', 'upper', 'lower'])
    for h in horizons:
        est = relative_density(P, Q, int(h), config.get('window'), config.get('checkpoints'))
        writer.writerow([est.horizon, est.window, format_float(est.upper),
                         format_float(est.lower)])


def _run_construct_aapo(config, stream):
    writer = csv.writer(stream, lineterminator='\n')
    system, entry = _resolve_system(config)
    if entry is None or entry.pair is None:
        raise ConfigError("construct aapo demande un système de la galerie avec paire périodique")
    schedule = checkpoint_schedule(int(config.get('depth')))
    horizon = int(config.get('horizon', schedule.m[-1]))
    code = SymbolSequence.from_json(config.require('code'))
    base = system.domain.base_points(int(config.get('base_points')))
    po = build_aapo(entry.pair, code, base, schedule, horizon)
    checkpoints = config.get('checkpoints') or _schedule_checkpoints(schedule.m, horizon)
    errors = verify_aapo(po, checkpoints)
    if isinstance(system.rule, ShiftRule):
        shadows = verify_average_shadowing(po, concatenation_tracer(po), checkpoints)
    else:
        shadows = [None] * len(checkpoints)
    writer.writerow(['checkpoint', 'aapo_mean', 'shadow_mean'])
    for n, e, s in zip(checkpoints, errors, shadows):
        writer.writerow([n, format_float(e), '' if s is None else format_float(s)])


def _run_construct_expanding(config, stream):
    writer = csv.writer(stream, lineterminator='\n')
    system, entry = _resolve_system(config)
    if entry is None or entry.family is None:
        raise ConfigError("construct expanding demande un système de la galerie avec famille")
    if config.get('alpha') is not None:
        alpha = SymbolSequence.from_json(config.require('alpha'))
        beta = SymbolSequence.from_json(config.require('beta'))
    else:
        family = scrambled_block_family(int(config.get('family_size')), config.require_seed())
        i, j = config.get('members', [0, 1])
        alpha, beta = family[i], family[j]
    depth = int(config.require('horizon'))
    pair = build_dc_pair_expanding(entry.family, system, alpha, beta, depth)
    checkpoints = config.get('checkpoints') or _schedule_checkpoints(
        schedule_covering(depth).m, depth)
    verdict = classify_pair(pair.profile(), pair.delta, _tolerances(config),
                            _grid(config, system.domain.diameter()) if config.get('eps_grid')
                            else None, config.get('window'), checkpoints or None)
    writer.writerow(PAIR_COLUMNS)
    _pair_rows(writer, system.domain, pair.points[0], pair.points[1], verdict)


def _run_construct_merge(config, stream):
    writer = csv.writer(stream, lineterminator='\n')
    P = IndexSequence.from_json(config.require('P'))
    Q = IndexSequence.from_json(config.require('Q'))
    T = merge_dc_sequence(P, Q, int(config.get('k_max')))
    writer.writerow(['i', 't', 'source'])
    for i, (t, s) in enumerate(zip(T.terms.tolist(), T.sources.tolist()), start=1):
        writer.writerow([i, t, 'PQ'[s]])


def _run_probe(config, stream):
    writer = csv.writer(stream, lineterminator='\n')
    system, _ = _resolve_system(config)
    opens = config.require('opens')
    if not isinstance(opens, list) or len(opens) != 4:
        raise ConfigError("Quatre ouverts [lo, hi] attendus (U1, V1, U2, V2)")
    n = weak_mixing_probe(system, [tuple(o) for o in opens], int(config.get('horizon')),
                          int(config.get('samples')))
    writer.writerow(['n'])
    writer.writerow(['' if n is None else n])


OPERATIONS = {
    'orbit': _run_orbit,
    'pair-stats': _run_pair_stats,
    'scan-pairs': _run_scan_pairs,
    'density': _run_density,
    'construct-aapo': _run_construct_aapo,
    'construct-expanding': _run_construct_expanding,
    'construct-merge': _run_construct_merge,
    'probe-weak-mixing': _run_probe,
}


def run(config):
    """
    Exécute une expérience.

    Returns:
        texte CSV (en-tête des paramètres puis lignes de résultats)
    """
    buffer = io.StringIO()
    for key, value in config.header():
        buffer.write(f"# {key}={value}\n")
    OPERATIONS[config.operation](config, buffer)
    return buffer.getvalue()


def _emit(text, out):
    """Écriture atomique : aucun fichier partiel en cas d'erreur"""
    if not out:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.chaosnds-', suffix='.csv')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(tmp, out)
    except OSError:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.info(f"Résultats écrits dans {out}")


def main(argv=None):
    """Point d'entrée ; renvoie le code de sortie (0, 1 configuration, 2 numérique)"""
    try:
        args = build_parser().parse_args(argv)
        config = _config_from_args(args)
        logger.info(f"Expérience '{config.operation}' ({config.source or 'ligne de commande'})")
        _emit(run(config), args.out)
        return EXIT_OK
    except ConfigError as e:
        logger.error(f"Configuration: {e}")
        return EXIT_CONFIG
    except ChaosError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_NUMERIC
    except OSError as e:
        logger.error(f"Écriture impossible: {e}")
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
