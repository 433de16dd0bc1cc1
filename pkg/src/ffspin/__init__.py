"""Frustration-free 2-local spin-1/2 Hamiltonians: reduction, ground spaces, entanglement bounds."""
from .config import DEFAULT_TOL, Tolerances
from .hamiltonian import Hamiltonian, LocalObservable, classify_naturality, validate
from .reduction import Frustrated, Reduced, reduce_to_complete
from .groundspace import GroundSpace, expectation_ground_manifold

__all__ = ["DEFAULT_TOL", "Tolerances", "Hamiltonian", "LocalObservable", "classify_naturality",
           "validate", "Frustrated", "Reduced", "reduce_to_complete", "GroundSpace",
           "expectation_ground_manifold"]
