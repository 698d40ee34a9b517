"""Eigenvalues in spectral gaps of indefinite block operators via Schur-complement min-max levels."""
from .gap_engine import (
    BlockOperator,
    SchurPair,
    SolveTrace,
    lambda0,
    levels,
    minmax_iterate,
    schur_pair,
    toy_laplacian_block,
    verify_gap,
)

__all__ = [
    "BlockOperator",
    "SchurPair",
    "SolveTrace",
    "lambda0",
    "levels",
    "minmax_iterate",
    "schur_pair",
    "toy_laplacian_block",
    "verify_gap",
]
