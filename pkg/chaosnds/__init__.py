"""
ChaosNDS - Package principal
Chaos distributionnel et de Li-Yorke des systèmes dynamiques discrets non autonomes
"""

from .exceptions import (
    ChaosError, ConfigError, ParameterError, DomainViolationError, CapacityError,
    ExtensionError, InsufficientSequenceError, BoundViolationError, ScheduleError,
    ScheduleOverflowError, ExpandingConditionError, PreconditionError, CorruptGalleryError
)
from .symbolic import (
    SymbolSequence, Tail, RhoValue, rho, shift, cylinder_diag_distance,
    agreement_counts, scrambled_block_family, block_window_check
)
from .core import (
    RealInterval, SymbolSpace, ProductDomain, MapFamily, Orbit,
    LogisticRule, TentRule, PiecewiseLinearRule, ExpandingRule, ShiftRule, ProductRule,
    doubling_rule, compose_orbit, orbit_at_indices, orbit_batch, interval_image,
    product_metric, system_from_config, system_to_config
)
from .seqdensity import (
    IndexSequence, DensityEstimate, DensityWitness, CesaroEquivalence,
    explicit, arithmetic, naturals, powers, relative_density, merge_schedule,
    density_one_witness, cesaro_density_equivalence
)
from .distchaos import (
    Flag, Tolerances, PairProfile, PairVerdict, DistributionalEstimate,
    DiagonalNeighborhood, HittingSet, DualVerdict, ScanRow,
    pair_profile, profile_from_distances, estimate_F, classify_pair, diag_distance,
    hitting_set, dc_verdict_dual, scan_pairs, sequence_for_pairs
)
from .constructors import (
    CheckpointSchedule, PeriodicPointPair, PseudoOrbit, NestedFamily, CodedPair,
    checkpoint_schedule, build_aapo, verify_aapo, verify_average_shadowing,
    concatenation_tracer, build_dc_pair_aapo, build_expanding_point, verify_itinerary,
    build_dc_pair_expanding, merge_dc_sequence, weak_mixing_probe
)
from .gallery import GallerySystem, gallery_ids, load_gallery
from .config import ExperimentConfig, load_config, make_config

__all__ = [
    'ChaosError',
    'ConfigError',
    'ParameterError',
    'DomainViolationError',
    'CapacityError',
    'ExtensionError',
    'InsufficientSequenceError',
    'BoundViolationError',
    'ScheduleError',
    'ScheduleOverflowError',
    'ExpandingConditionError',
    'PreconditionError',
    'CorruptGalleryError',
    'SymbolSequence',
    'Tail',
    'RhoValue',
    'rho',
    'shift',
    'cylinder_diag_distance',
    'agreement_counts',
    'scrambled_block_family',
    'block_window_check',
    'RealInterval',
    'SymbolSpace',
    'ProductDomain',
    'MapFamily',
    'Orbit',
    'LogisticRule',
    'TentRule',
    'PiecewiseLinearRule',
    'ExpandingRule',
    'ShiftRule',
    'ProductRule',
    'doubling_rule',
    'compose_orbit',
    'orbit_at_indices',
    'orbit_batch',
    'interval_image',
    'product_metric',
    'system_from_config',
    'system_to_config',
    'IndexSequence',
    'DensityEstimate',
    'DensityWitness',
    'CesaroEquivalence',
    'explicit',
    'arithmetic',
    'naturals',
    'powers',
    'relative_density',
    'merge_schedule',
    'density_one_witness',
    'cesaro_density_equivalence',
    'Flag',
    'Tolerances',
    'PairProfile',
    'PairVerdict',
    'DistributionalEstimate',
    'DiagonalNeighborhood',
    'HittingSet',
    'DualVerdict',
    'ScanRow',
    'pair_profile',
    'profile_from_distances',
    'estimate_F',
    'classify_pair',
    'diag_distance',
    'hitting_set',
    'dc_verdict_dual',
    'scan_pairs',
    'sequence_for_pairs',
    'CheckpointSchedule',
    'PeriodicPointPair',
    'PseudoOrbit',
    'NestedFamily',
    'CodedPair',
    'checkpoint_schedule',
    'build_aapo',
    'verify_aapo',
    'verify_average_shadowing',
    'concatenation_tracer',
    'build_dc_pair_aapo',
    'build_expanding_point',
    'verify_itinerary',
    'build_dc_pair_expanding',
    'merge_dc_sequence',
    'weak_mixing_probe',
    'GallerySystem',
    'gallery_ids',
    'load_gallery',
    'ExperimentConfig',
    'load_config',
    'make_config',
]
