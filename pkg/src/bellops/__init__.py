"""Double-ket operator calculus, Bell measurements and teleportation checks."""

from .matrix_core import DEFAULT_TOL, partial_trace, polar, random_density, random_unitary, svd, tensor
from .doubleket import DoubleKet, apply_local, as_vector, dk_inner, dyad_ptrace, from_vector, hat_map, schmidt
from .spanning import SpanningSet, check_all, znzn_basis
from .bell_measure import BellObservable, BellPOVM, bell_observable, bell_povm, measure
from .teleport import KrausChannel, TeleportRecord, ideal_teleport, noisy_teleport

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL", "partial_trace", "polar", "random_density", "random_unitary", "svd", "tensor",
    "DoubleKet", "apply_local", "as_vector", "dk_inner", "dyad_ptrace", "from_vector", "hat_map", "schmidt",
    "SpanningSet", "check_all", "znzn_basis",
    "BellObservable", "BellPOVM", "bell_observable", "bell_povm", "measure",
    "KrausChannel", "TeleportRecord", "ideal_teleport", "noisy_teleport",
]
