"""Spanning-set fixtures shared by the spanning and acceptance tests."""

import numpy as np

from bellops.spanning import SpanningSet, znzn_basis


def incomplete_sets():
    """Five families that are not operator bases, each failing for a different reason."""
    z2 = znzn_basis(2)
    z3 = znzn_basis(3)
    rng = np.random.default_rng(1234)
    g = [rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(3)]
    return {
        # spans too little, though its kernel relation holds
        "identity-only": SpanningSet([np.eye(2)], [0.5]),
        # orthogonal but only half of operator space
        "identity-and-Z": SpanningSet(z2.elements[:2], [0.5, 0.5]),
        # a complete basis with the wrong normalization
        "pauli-wrong-weight": SpanningSet(z2.elements, [0.25] * 4),
        # one element short
        "znzn3-missing-one": SpanningSet(z3.elements[:-1], z3.weights[:-1]),
        # too few random operators
        "random-three": SpanningSet(g, [1.0, 1.0, 1.0]),
    }
