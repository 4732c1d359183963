"""Planted linear-generative worlds for checking recovery."""
from .oracle_def import (
    OracleSpec,
    OracleWorld,
    PairStrategy,
    load_world,
    make_world,
    observe_canonical,
    observe_scalar,
    observe_scalars,
    sample_canonical_differences,
    sample_difference_set,
    sample_pairs,
    save_world,
)

__all__ = [
    "OracleSpec",
    "OracleWorld",
    "PairStrategy",
    "load_world",
    "make_world",
    "observe_canonical",
    "observe_scalar",
    "observe_scalars",
    "sample_canonical_differences",
    "sample_difference_set",
    "sample_pairs",
    "save_world",
]
