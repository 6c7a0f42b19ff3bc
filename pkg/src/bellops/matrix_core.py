"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
Composite indices follow row-major order with subsystem 1 as the slow
index, i.e. ``|i>_1 |j>_2`` is row ``i * dim2 + j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError

DEFAULT_TOL = 1e-10

__all__ = [
    "DEFAULT_TOL",
    "Polar",
    "SVD",
    "as_matrix",
    "dagger",
    "tensor",
    "partial_trace",
    "polar",
    "svd",
    "expm",
    "sqrtm_psd",
    "is_unitary",
    "is_density",
    "fro",
    "trace_distance",
    "fidelity",
    "random_unitary",
    "random_density",
    "random_matrix",
    "matrix_to_dict",
    "matrix_from_dict",
    "dumps",
]


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D complex array (a copy is not guaranteed)."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {m.shape}")
    if m.size == 0:
        raise DimensionError(f"{name} is empty")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def dagger(a):
    return np.conj(np.transpose(a))


def fro(a):
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def tensor(a, b):
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def partial_trace(m, dim1, dim2, keep=1):
    """Reduce an operator on ``C^dim1 (x) C^dim2`` to subsystem ``keep`` (1 or 2)."""
    m = as_matrix(m)
    n = dim1 * dim2
    if m.shape != (n, n):
        raise DimensionError(f"expected {n}x{n} operator for dims ({dim1}, {dim2}), got {m.shape}")
    t = m.reshape(dim1, dim2, dim1, dim2)
    if keep == 1:
        return np.einsum("ijkj->ik", t)
    if keep == 2:
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 1 or 2, got {keep!r}")


@dataclass(frozen=True)
class SVD:
    u: np.ndarray
    s: np.ndarray
    vh: np.ndarray

    def reconstruct(self):
        return (self.u * self.s) @ self.vh


@dataclass(frozen=True)
class Polar:
    """``a = unitary @ positive`` with ``positive = sqrt(a^dagger a)``."""

    unitary: np.ndarray
    positive: np.ndarray

    def reconstruct(self):
        return self.unitary @ self.positive


def svd(a):
    """Full SVD with singular values in descending order."""
    u, s, vh = np.linalg.svd(as_matrix(a))
    return SVD(u, s, vh)


def polar(a):
    """Right polar decomposition built from the SVD.

    For rank-deficient input the unitary factor is ``U @ W^dagger`` from the
    SVD, which fixes the otherwise free completion deterministically.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"polar needs a square matrix, got {a.shape}")
    u, s, vh = np.linalg.svd(a)
    w = dagger(vh)
    positive = (w * s) @ vh
    positive = 0.5 * (positive + dagger(positive))
    return Polar(u @ vh, positive)


def expm(a):
    """Matrix exponential (Pade scaling and squaring)."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expm needs a square matrix, got {a.shape}")
    return scipy.linalg.expm(a)


def sqrtm_psd(a):
    """Square root of a Hermitian positive semidefinite matrix via ``eigh``.

    Small negative eigenvalues from rounding are clipped to zero.
    """
    a = as_matrix(a)
    h = 0.5 * (a + dagger(a))
    w, v = np.linalg.eigh(h)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)


def is_unitary(u, tol=DEFAULT_TOL):
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return fro(dagger(u) @ u - np.eye(u.shape[0])) <= tol


def is_density(rho, tol=DEFAULT_TOL):
    """Hermitian, positive semidefinite and unit trace, each to ``tol``."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if fro(rho - dagger(rho)) > tol:
        return False
    if abs(np.trace(rho) - 1) > tol:
        return False
    return np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0] >= -tol


def trace_distance(rho, sigma):
    d = np.asarray(rho) - np.asarray(sigma)
    d = 0.5 * (d + dagger(d))
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(d))))


def fidelity(rho, sigma):
    """Uhlmann fidelity ``(Tr|sqrt(rho) sqrt(sigma)|)^2``."""
    sr = sqrtm_psd(rho)
    ss = sqrtm_psd(sigma)
    s = np.linalg.svd(sr @ ss, compute_uv=False)
    return float(np.sum(s) ** 2)


# Test-object generation. All generators are numpy's PCG64 seeded explicitly.

def _rng(seed):
    return np.random.default_rng(seed)


def random_matrix(rows, cols=None, seed=None):
    """Complex Ginibre matrix, entries with unit variance."""
    cols = rows if cols is None else cols
    rng = seed if isinstance(seed, np.random.Generator) else _rng(seed)
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(dim, seed=None):
    """Haar-random unitary: QR of a Ginibre matrix with the phases of ``diag(R)`` removed."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    z = random_matrix(dim, dim, seed)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density(dim, seed=None):
    """Full-rank density matrix from the Hilbert-Schmidt ensemble."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    g = random_matrix(dim, dim, seed)
    rho = g @ dagger(g)
    rho = 0.5 * (rho + dagger(rho))
    return rho / np.trace(rho).real


# JSON container: {"rows": r, "cols": c, "data": [[re, im], ...]} in row-major order.

def matrix_to_dict(m, **extra):
    m = as_matrix(m)
    flat = m.reshape(-1)
    out = {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(x.real), float(x.imag)] for x in flat],
    }
    out.update(extra)
    return out


def matrix_from_dict(d):
    try:
        rows, cols, data = int(d["rows"]), int(d["cols"]), d["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"not a matrix object: missing {exc}") from None
    if rows < 1 or cols < 1:
        raise DimensionError("rows and cols must be positive")
    if len(data) != rows * cols:
        raise DimensionError(f"expected {rows * cols} entries, got {len(data)}")
    arr = np.array([complex(float(re), float(im)) for re, im in data])
    return as_matrix(arr.reshape(rows, cols))


def dumps(obj):
    """Deterministic JSON text (sorted keys, shortest round-trip floats)."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)
