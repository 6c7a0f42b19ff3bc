"""Bell POVMs built from unitary spanning sets, and Bell observables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, IncompleteError, InjectivityError, InvalidStateError, NotUnitaryError
from .matrix_core import DEFAULT_TOL, as_matrix, dagger, fro, is_density, is_unitary, matrix_to_dict
from .spanning import group_fourier, znzn_basis, znzn_element
from .doubleket import DoubleKet, is_max_entangled

MIN_GAP = 1e-9
MATCH_OVERLAP = 1 - 1e-8


@dataclass(frozen=True)
class BellPOVM:
    dim: int
    effects: tuple
    labels: tuple
    unitaries: tuple
    weights: tuple

    def __len__(self):
        return len(self.effects)

    def to_dict(self):
        return {
            "kind": "bell_povm",
            "dim": self.dim,
            "labels": [list(l) if isinstance(l, tuple) else l for l in self.labels],
            "weights": list(self.weights),
            "effects": [matrix_to_dict(e) for e in self.effects],
        }


@dataclass(frozen=True)
class BellObservable:
    labels: tuple
    values: tuple
    operator: np.ndarray

    def to_dict(self):
        return matrix_to_dict(
            self.operator,
            kind="bell_observable",
            labels=[list(l) if isinstance(l, tuple) else l for l in self.labels],
            f=list(self.values),
        )


def bell_povm(unitaries, weights, labels=None, tol=DEFAULT_TOL):
    """Effects ``w_k |U_k>><<U_k|``, validated to resolve the identity."""
    us = [as_matrix(u, "unitary") for u in unitaries]
    if not us:
        raise ValueError("no unitaries given")
    ws = [float(w) for w in weights]
    if len(ws) != len(us):
        raise DimensionError(f"{len(us)} unitaries but {len(ws)} weights")
    n = us[0].shape[0]
    labels = tuple(range(len(us))) if labels is None else tuple(labels)
    if len(labels) != len(us):
        raise DimensionError(f"{len(us)} unitaries but {len(labels)} labels")
    effects = []
    for lab, u, w in zip(labels, us, ws):
        if u.shape != (n, n):
            raise DimensionError(f"unitary {lab!r} has shape {u.shape}, expected {(n, n)}")
        if not is_unitary(u, tol):
            raise NotUnitaryError(f"element {lab!r} is not unitary")
        if w <= 0:
            raise ValueError(f"weight of {lab!r} must be positive")
        if not is_max_entangled(DoubleKet(u / np.sqrt(n))):
            raise NotUnitaryError(f"|U>>/sqrt(N) for {lab!r} is not maximally entangled")
        v = u.reshape(-1)
        e = w * np.outer(v, np.conj(v))
        e.flags.writeable = False
        effects.append(e)
    resid = fro(sum(effects) - np.eye(n * n))
    if resid > tol:
        raise IncompleteError(f"effects sum to identity only within {resid:.3e} (tol {tol:.1e})")
    for u in us:
        u.flags.writeable = False
    return BellPOVM(n, tuple(effects), labels, tuple(us), tuple(ws))


def povm_from_spanning(s, tol=DEFAULT_TOL):
    return bell_povm(s.elements, s.weights, s.labels, tol)


def znzn_povm(n):
    return povm_from_spanning(znzn_basis(n))


def measure(p, state, tol=DEFAULT_TOL):
    """Born-rule probabilities ``Tr[state Pi_k]``, in label order."""
    state = as_matrix(state, "state")
    d = p.dim * p.dim
    if state.shape != (d, d):
        raise DimensionError(f"state must be {d}x{d}, got {state.shape}")
    if not is_density(state, tol):
        raise InvalidStateError("state is not a unit-trace positive semidefinite matrix")
    probs = np.array([np.real(np.sum(e * state.T)) for e in p.effects])
    return probs


def _injectivity_collisions(labels, values, min_gap):
    order = np.argsort(values, kind="stable")
    out = []
    for a, b in zip(order[:-1], order[1:]):
        if abs(values[b] - values[a]) < min_gap:
            out.append((labels[a], labels[b]))
    return out


def bell_observable(p, f, min_gap=MIN_GAP):
    """``O = sum_k f_k Pi_k`` for a real injective labelling ``f``.

    ``f`` is either a sequence aligned with ``p.labels`` or a mapping from
    label to value.
    """
    if isinstance(f, dict):
        try:
            vals = [float(f[l]) for l in p.labels]
        except KeyError as exc:
            raise DimensionError(f"f has no value for label {exc}") from None
    else:
        vals = np.asarray(f, dtype=float).reshape(-1).tolist()
        if len(vals) != len(p):
            raise DimensionError(f"f has {len(vals)} values for {len(p)} outcomes")
    collisions = _injectivity_collisions(p.labels, np.asarray(vals), min_gap)
    if collisions:
        raise InjectivityError(collisions)
    op = sum(v * e for v, e in zip(vals, p.effects))
    op = 0.5 * (op + dagger(op))
    op.flags.writeable = False
    return BellObservable(p.labels, tuple(vals), op)


def spectral_match(obs, p):
    """Match eigenprojectors of ``obs`` to the normalized POVM effects.

    Returns ``(assignment, max_mismatch)`` where ``assignment[i]`` is the
    effect index matched to the i-th eigenvector (ascending eigenvalue) and
    ``max_mismatch`` is the largest Frobenius distance between a projector
    and its matched normalized effect.  Raises ``ValueError`` when some
    eigenvector has no unique effect with overlap above ``MATCH_OVERLAP``.
    """
    _, vecs = np.linalg.eigh(obs.operator)
    normed = [e / np.trace(e).real for e in p.effects]
    assignment = []
    worst = 0.0
    for i in range(vecs.shape[1]):
        v = vecs[:, i]
        proj = np.outer(v, np.conj(v))
        overlaps = np.array([np.real(np.conj(v) @ e @ v) for e in normed])
        hits = np.flatnonzero(overlaps > MATCH_OVERLAP)
        if hits.size != 1:
            raise ValueError(f"eigenvector {i} has no unique matching effect (best overlap {overlaps.max():.3e})")
        k = int(hits[0])
        assignment.append(k)
        worst = max(worst, fro(proj - normed[k]))
    return assignment, worst


def observable_tensor_form(n, f):
    """``O = N^-2 sum_g f~(-g) U_g (x) U_g^*`` for the clock-and-shift POVM.

    ``f~`` is :func:`group_fourier` of ``f``.  The reflected argument and the
    ``1/N^2`` factor make this equal to ``bell_observable(znzn_povm(n), f)``.
    """
    ft = group_fourier(n, f)
    out = np.zeros((n * n, n * n), dtype=complex)
    for m in range(n):
        for s in range(n):
            u = znzn_element(n, m, s)
            out += ft[(-m) % n, (-s) % n] * np.kron(u, np.conj(u))
    return out / (n * n)
