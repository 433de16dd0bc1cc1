"""Numerical tolerances and run configuration."""
from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # relative to the operator norm of the matrix being ranked
    rank: float = 1e-9
    # absolute, max entry deviation from M = M^dagger
    herm: float = 1e-10
    norm: float = 1e-9
    # fidelity threshold 1 - colinear for accumulated constraints
    colinear: float = 1e-8
    # terms below zero * (input scale) are dropped during reduction
    zero: float = 1e-11
    # second Schmidt coefficient above this counts as entangled
    product: float = 1e-9
    gauge_residual: float = 1e-8
    gram: float = 1e-12


DEFAULT_TOL = Tolerances()


def max_oracle_spins() -> int:
    """Cap on exact diagonalization size, overridable with FFSPIN_MAX_ORACLE_SPINS."""
    return int(os.environ.get("FFSPIN_MAX_ORACLE_SPINS", "12"))
