#!/usr/bin/env python3
"""
Generation des graphiques pour la documentation des constructions
"""

import os
import sys

import numpy as np
import matplotlib.pyplot as plt

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from chaosnds import (  # noqa: E402
    SymbolSequence, arithmetic, build_dc_pair_expanding, checkpoint_schedule,
    cesaro_density_equivalence, load_gallery, merge_dc_sequence, merge_schedule,
    naturals, pair_profile
)

# Creer le dossier images si necessaire
os.makedirs('docs/images', exist_ok=True)

# Style global
plt.style.use('seaborn-v0_8-whitegrid')
plt.rcParams['font.size'] = 10
plt.rcParams['figure.facecolor'] = 'white'


def running_fraction(mask):
    return np.cumsum(mask) / np.arange(1, len(mask) + 1)


def plot_schedules():
    """Calendriers m_n et n_k (echelle log)"""
    m = checkpoint_schedule(7).m
    n = merge_schedule(7)

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(range(len(m)), m, 'o-', color='#3498db', label='m_n (points de controle)')
    ax.semilogy(range(1, len(n) + 1), n, 's--', color='#e74c3c', label='n_k (fusion)')
    ax.set_xlabel('Indice', fontweight='bold')
    ax.set_ylabel('Valeur', fontweight='bold')
    ax.set_title('Croissance des calendriers', fontweight='bold', pad=15)
    ax.legend(loc='upper left')

    plt.tight_layout()
    plt.savefig('docs/images/schedules.png', dpi=150, bbox_inches='tight')
    plt.close()
    print("[OK] schedules.png")


def plot_expanding_pair():
    """Fractions courantes de la paire codee (famille expansive)"""
    entry = load_gallery('expanding-family')
    m = checkpoint_schedule(6).m
    pair = build_dc_pair_expanding(entry.family, entry.system, SymbolSequence.constant(0),
                                   SymbolSequence.from_json('000001(0)'), m[6])
    d = pair.profile().distances
    t = np.arange(1, len(d) + 1)

    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.semilogx(t, running_fraction(d < 0.01), color='#2ecc71', label='d < 0.01')
    ax.semilogx(t, running_fraction(d < pair.delta), color='#e67e22', linestyle='--',
                label=f'd < delta = {pair.delta}')
    for v in m[1:]:
        ax.axvline(x=v, color='grey', linewidth=0.8, linestyle=':')
    ax.set_xlabel('n', fontweight='bold')
    ax.set_ylabel('Fraction courante', fontweight='bold')
    ax.set_ylim(0, 1.05)
    ax.set_title('Paire codee : synchronisation puis separation', fontweight='bold', pad=15)
    ax.legend(loc='lower left')

    plt.tight_layout()
    plt.savefig('docs/images/expanding_pair.png', dpi=150, bbox_inches='tight')
    plt.close()
    print("[OK] expanding_pair.png")


def plot_merge():
    """Fraction des termes issus de P dans la suite fusionnee"""
    T = merge_dc_sequence(arithmetic(0, 2), arithmetic(1, 2), 7)
    from_p = running_fraction(T.sources == 0)

    fig, ax = plt.subplots(figsize=(8, 4))
    ax.semilogx(np.arange(1, len(T) + 1), from_p, color='#9b59b6')
    for v in merge_schedule(7):
        ax.axvline(x=v, color='grey', linewidth=0.8, linestyle=':')
    ax.set_xlabel('Nombre de termes de T', fontweight='bold')
    ax.set_ylabel('Part de P', fontweight='bold')
    ax.set_ylim(0, 1.05)
    ax.set_title('Fusion des suites (pairs / impairs)', fontweight='bold', pad=15)

    plt.tight_layout()
    plt.savefig('docs/images/merge.png', dpi=150, bbox_inches='tight')
    plt.close()
    print("[OK] merge.png")


def plot_cesaro():
    """Moyenne de Cesaro et ensemble exceptionnel (indicatrice des carres)"""
    horizon = 100000
    a = np.zeros(horizon)
    a[np.arange(int(np.sqrt(horizon - 1)) + 1) ** 2] = 1.0
    result = cesaro_density_equivalence(a, horizon)
    exceptional = np.zeros(horizon, dtype=bool)
    exceptional[result.exceptional_set.terms] = True
    t = np.arange(1, horizon + 1)

    fig, ax = plt.subplots(figsize=(8, 4))
    ax.loglog(t, np.cumsum(a) / t, color='#3498db', label='Moyenne de Cesaro')
    ax.loglog(t, np.maximum(running_fraction(exceptional), 1e-6), color='#e74c3c',
              linestyle='--', label='Densite de E')
    ax.set_xlabel('n', fontweight='bold')
    ax.set_title('Equivalence de Cesaro', fontweight='bold', pad=15)
    ax.legend(loc='upper right')

    plt.tight_layout()
    plt.savefig('docs/images/cesaro.png', dpi=150, bbox_inches='tight')
    plt.close()
    print("[OK] cesaro.png")


def plot_logistic_pair():
    """Distances le long de l'orbite d'une paire logistique"""
    entry = load_gallery('logistic-autonomous')
    profile = pair_profile(entry.system, 0.2, 0.2 + 1e-9, naturals(200))

    fig, ax = plt.subplots(figsize=(8, 4))
    ax.semilogy(np.maximum(profile.distances, 1e-17), color='#1abc9c', linewidth=1)
    ax.set_xlabel('n', fontweight='bold')
    ax.set_ylabel('d(f^n x, f^n y)', fontweight='bold')
    ax.set_title('Logistique r = 4 : separation d\'une paire voisine', fontweight='bold',
                 pad=15)

    plt.tight_layout()
    plt.savefig('docs/images/logistic_pair.png', dpi=150, bbox_inches='tight')
    plt.close()
    print("[OK] logistic_pair.png")


if __name__ == '__main__':
    print("Generation des graphiques...")
    print("-" * 40)

    plot_schedules()
    plot_expanding_pair()
    plot_merge()
    plot_cesaro()
    plot_logistic_pair()

    print("-" * 40)
    print("Tous les graphiques generes dans docs/images/")
