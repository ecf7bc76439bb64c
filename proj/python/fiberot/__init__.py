"""Discrete optimal transport on fibered spaces."""

from ._fiberot import (
    FiberotError,
    barycenter,
    brute_force_ot,
    certify,
    distance,
    generate,
    mk_distance,
    solve_ot,
    split_base_example,
    two_interval_example,
)

__all__ = [
    "FiberotError",
    "barycenter",
    "brute_force_ot",
    "certify",
    "distance",
    "generate",
    "mk_distance",
    "solve_ot",
    "split_base_example",
    "two_interval_example",
]
