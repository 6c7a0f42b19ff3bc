"""Operator spanning sets and the clock-and-shift unitary basis.

A :class:`SpanningSet` is a finite weighted family ``{(w_k, B_k)}``.  The
four completeness statements are checked independently so that their
agreement can itself be tested.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .matrix_core import DEFAULT_TOL, as_matrix, dagger, fro, matrix_from_dict, matrix_to_dict, random_matrix

FRAME_EIG_TOL = 1e-8


@dataclass(frozen=True)
class SpanningSet:
    elements: tuple
    weights: tuple
    labels: tuple = field(default=None)

    def __post_init__(self):
        els = tuple(as_matrix(e, "element") for e in self.elements)
        if not els:
            raise ValueError("spanning set is empty")
        n = els[0].shape[0]
        for e in els:
            if e.shape != (n, n):
                raise DimensionError(f"all elements must be {n}x{n}, got {e.shape}")
            e.flags.writeable = False
        ws = tuple(float(w) for w in self.weights)
        if len(ws) != len(els):
            raise DimensionError(f"{len(els)} elements but {len(ws)} weights")
        if any(not w > 0 for w in ws):
            raise ValueError("weights must be positive")
        labels = tuple(range(len(els))) if self.labels is None else tuple(self.labels)
        if len(labels) != len(els):
            raise DimensionError(f"{len(els)} elements but {len(labels)} labels")
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self):
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)

    def stack(self):
        return np.stack(self.elements), np.asarray(self.weights)

    def to_dict(self):
        return {
            "dim": self.dim,
            "elements": [matrix_to_dict(e) for e in self.elements],
            "weights": list(self.weights),
            "labels": [list(l) if isinstance(l, tuple) else l for l in self.labels],
        }

    @classmethod
    def from_dict(cls, d):
        try:
            elements = [matrix_from_dict(e) for e in d["elements"]]
            weights = d["weights"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"not a spanning-set object: {exc}") from None
        labels = d.get("labels")
        if labels is not None:
            labels = [tuple(l) if isinstance(l, list) else l for l in labels]
        s = cls(elements, weights, labels)
        if "dim" in d and int(d["dim"]) != s.dim:
            raise DimensionError(f"declared dim {d['dim']} but elements are {s.dim}x{s.dim}")
        return s

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class CheckReport:
    statement: str
    max_residual: float
    passed: bool
    tol: float
    frame_min_eig: float | None = None

    def to_dict(self):
        return {
            "statement": self.statement,
            "max_residual": self.max_residual,
            "frame_min_eig": self.frame_min_eig,
            "pass": self.passed,
            "tol": self.tol,
        }


# -- clock and shift ----------------------------------------------------------

def znzn_element(n, m, shift):
    """``U(m, shift) = sum_k w^(k m) |k><k + shift|`` with ``w = exp(2 pi i / n)``."""
    if n < 1:
        raise ValueError("N must be >= 1")
    k = np.arange(n)
    u = np.zeros((n, n), dtype=complex)
    u[k, (k + shift) % n] = np.exp(2j * np.pi * k * m / n)
    return u


def znzn_basis(n):
    """The ``N^2`` unitaries ``U(m, n)``, row-major in ``(m, n)``, each with weight ``1/N``."""
    if n < 1:
        raise ValueError("N must be >= 1")
    labels = [(m, s) for m in range(n) for s in range(n)]
    return SpanningSet([znzn_element(n, m, s) for m, s in labels], [1.0 / n] * len(labels), labels)


def _check_indices(n, *idx):
    for i in idx:
        if not 0 <= i < n:
            raise IndexError(f"index {i} out of range for N={n}")


def commutation_phase(n, m, s, m2, s2):
    """Phase ``c`` with ``U(m,s) U(m2,s2) U(m,s)^dagger = c U(m2,s2)``."""
    _check_indices(n, m, s, m2, s2)
    return complex(np.exp(2j * np.pi * (s * m2 - m * s2) / n))


def group_fourier(n, f):
    """``f~(m, s) = sum_{m2, s2} exp(2 pi i (s m2 - m s2) / N) f(m2, s2)``.

    ``f`` may be an ``N x N`` table or a flat length-``N^2`` sequence in
    row-major ``(m, s)`` order; the result is an ``N x N`` array.
    """
    f = np.asarray(f, dtype=complex)
    if f.size != n * n:
        raise DimensionError(f"table has {f.size} entries, expected {n * n}")
    f = f.reshape(n, n)
    r = np.arange(n)
    # phase exponent s*m2 - m*s2, indices (m, s, m2, s2)
    expo = r[None, :, None, None] * r[None, None, :, None] - r[:, None, None, None] * r[None, None, None, :]
    kernel = np.exp(2j * np.pi * expo / n)
    return np.einsum("abcd,cd->ab", kernel, f)


# -- completeness statements -------------------------------------------------

def _random_ops(n, trials, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(trials):
        a = random_matrix(n, n, rng)
        out.append(a / fro(a))
    return out


def frame_operator(s):
    """``F = sum_k w_k vec(B_k) vec(B_k)^dagger`` on operator space."""
    b, w = s.stack()
    v = b.reshape(len(s), -1)
    return np.einsum("k,ki,kj->ij", w, v, np.conj(v))


def frame_min_eig(s):
    return float(np.linalg.eigvalsh(frame_operator(s))[0])


def check_statement1(s, trials=0, seed=0, tol=DEFAULT_TOL):
    """Reproducing kernel: ``sum_k w_k Tr[B_k^dagger B_j] B_k = B_j`` for every j.

    The "only A = 0 is orthogonal to every B" clause is checked through the
    smallest eigenvalue of the frame operator.  ``trials``/``seed`` are
    accepted for a uniform signature and unused.
    """
    b, w = s.stack()
    gram = np.einsum("kab,jab->kj", np.conj(b), b)  # Tr[B_k^dagger B_j]
    recon = np.einsum("k,kj,kab->jab", w, gram, b)
    resid = max(fro(recon[j] - b[j]) for j in range(len(s)))
    lam = frame_min_eig(s)
    return CheckReport("statement1", resid, bool(resid < tol and lam > FRAME_EIG_TOL), tol, lam)


def check_statement2(s, trials=20, seed=0, tol=DEFAULT_TOL):
    """Expansion ``sum_k w_k Tr[B_k^dagger A] B_k = A`` on random unit-norm A."""
    b, w = s.stack()
    ops = _random_ops(s.dim, trials, seed) + [np.eye(s.dim) / np.sqrt(s.dim)]
    resid = 0.0
    for a in ops:
        coeff = w * np.einsum("kab,ab->k", np.conj(b), a)
        resid = max(resid, fro(np.einsum("k,kab->ab", coeff, b) - a))
    return CheckReport("statement2", resid, bool(resid < tol), tol)


def check_statement3(s, tol=DEFAULT_TOL):
    """All ``N^4`` entries of ``sum_k w_k <n|B_k^dagger|m><l|B_k|j> = d_nj d_ml``."""
    b, w = s.stack()
    n = s.dim
    # <n|B^dagger|m> = conj(B[m, n])
    t = np.einsum("k,kmn,klj->nmlj", w, np.conj(b), b)
    eye = np.eye(n)
    target = np.einsum("nj,ml->nmlj", eye, eye)
    resid = float(np.max(np.abs(t - target)))
    return CheckReport("statement3", resid, bool(resid < tol), tol)


def check_statement4(s, trials=20, seed=0, tol=DEFAULT_TOL):
    """Depolarizing form ``sum_k w_k B_k^dagger A B_k = Tr[A] 1`` on random A."""
    b, w = s.stack()
    ops = _random_ops(s.dim, trials, seed)
    eye = np.eye(s.dim)
    resid = 0.0
    for a in ops:
        out = np.einsum("k,kba,bc,kcd->ad", w, np.conj(b), a, b)
        resid = max(resid, fro(out - np.trace(a) * eye))
    return CheckReport("statement4", resid, bool(resid < tol), tol)


def check_all(s, trials=20, seed=0, tol=DEFAULT_TOL):
    return [
        check_statement1(s, tol=tol),
        check_statement2(s, trials, seed, tol),
        check_statement3(s, tol),
        check_statement4(s, trials, seed, tol),
    ]


def max_entangled_projector(n):
    """``|1>><<1|`` on ``C^n (x) C^n``."""
    v = np.eye(n).reshape(-1)
    return np.outer(v, v).astype(complex)


def std_ent_check(s, tol=DEFAULT_TOL):
    """Residual of ``sum_k w_k B_k (x) B_k^* - |1>><<1|``."""
    total = sum(w * np.kron(e, np.conj(e)) for e, w in zip(s.elements, s.weights))
    resid = fro(total - max_entangled_projector(s.dim))
    return CheckReport("std_ent", resid, bool(resid < tol), tol)


def transposer_check(s, trials=20, seed=0, tol=DEFAULT_TOL):
    """Residual of ``sum_k w_k (B_k (x) B_k^dagger)|A>> - |A^T>>`` on random A."""
    n = s.dim
    total = sum(w * np.kron(e, dagger(e)) for e, w in zip(s.elements, s.weights))
    ops = _random_ops(n, trials, seed) + [np.eye(n) / np.sqrt(n)]
    resid = 0.0
    for a in ops:
        resid = max(resid, float(np.linalg.norm(total @ a.reshape(-1) - a.T.reshape(-1))))
    return CheckReport("transposer", resid, bool(resid < tol), tol)
