"""Bipartite pure states stored as coefficient matrices.

A vector ``sum_ij c_ij |i>_1 |j>_2`` is represented by the matrix ``C``;
flattening ``C`` row-major gives the composite coefficient vector.  All
transposes and conjugates refer to the fixed computational basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotUnitaryError
from .matrix_core import DEFAULT_TOL, as_matrix, dagger, fro, is_unitary, matrix_from_dict, matrix_to_dict

MAX_ENT_TOL = 1e-8


@dataclass(frozen=True)
class DoubleKet:
    """The vector ``|C>>`` for an ``N x M`` coefficient matrix ``C``."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.array(as_matrix(self.mat, "coefficient matrix"), copy=True)
        m.flags.writeable = False
        object.__setattr__(self, "mat", m)

    @property
    def dims(self):
        return self.mat.shape

    def norm(self):
        return fro(self.mat)

    def to_dict(self):
        return matrix_to_dict(self.mat, kind="doubleket")

    @classmethod
    def from_dict(cls, d):
        if d.get("kind") != "doubleket":
            raise ValueError("object is not tagged kind='doubleket'")
        return cls(matrix_from_dict(d))


def as_vector(k):
    """Composite coefficient vector (1-D, length ``N*M``)."""
    return k.mat.reshape(-1).copy()


def from_vector(v, n, m):
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != n * m:
        raise DimensionError(f"vector of length {v.size} cannot be reshaped to {n}x{m}")
    return DoubleKet(v.reshape(n, m))


def apply_local(a, b, k):
    """``(a (x) b)|C>> = |a C b^T>>``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    n, m = k.dims
    if a.shape[1] != n or b.shape[1] != m:
        raise DimensionError(f"cannot apply {a.shape} (x) {b.shape} to a {n}x{m} double-ket")
    return DoubleKet(a @ k.mat @ b.T)


def dk_inner(a, b):
    """``<<A|B>> = Tr[A^dagger B]``."""
    if a.dims != b.dims:
        raise DimensionError(f"dims differ: {a.dims} vs {b.dims}")
    return complex(np.sum(np.conj(a.mat) * b.mat))


def dyad_ptrace(a, b, keep):
    """Partial trace of ``|A>><<B|``.

    keep=1 gives ``A B^dagger`` on subsystem 1, keep=2 gives ``A^T B^*`` on
    subsystem 2.
    """
    if a.dims != b.dims:
        raise DimensionError(f"dims differ: {a.dims} vs {b.dims}")
    if keep == 1:
        return a.mat @ dagger(b.mat)
    if keep == 2:
        return a.mat.T @ np.conj(b.mat)
    raise ValueError(f"keep must be 1 or 2, got {keep!r}")


@dataclass(frozen=True)
class SchmidtForm:
    """``|psi>> = sum_i coefficients[i] |left[:, i]> |right[:, i]>``."""

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def reconstruct(self):
        return DoubleKet((self.left * self.coefficients) @ self.right.T)


def schmidt(k):
    """Schmidt decomposition from the SVD of the coefficient matrix.

    The first nonzero component of every left vector is made real positive
    and the compensating phase is moved onto the right vector.
    """
    u, s, vh = np.linalg.svd(k.mat)
    r = s.size
    left = u[:, :r].copy()
    # C = sum_i s_i u_i w_i^dagger and |u w^dagger>> = |u>|w^*>
    right = vh[:r, :].T.copy()
    for i in range(r):
        col = left[:, i]
        nz = np.flatnonzero(np.abs(col) > 1e-14)
        if nz.size:
            ph = col[nz[0]] / abs(col[nz[0]])
            left[:, i] /= ph
            right[:, i] *= ph
    return SchmidtForm(s, left, right)


def is_max_entangled(k, tol=MAX_ENT_TOL):
    """True iff ``C C^dagger = 1/N`` within ``tol`` (Frobenius)."""
    n, m = k.dims
    if n != m:
        raise DimensionError(f"maximal entanglement needs a square coefficient matrix, got {n}x{m}")
    return fro(k.mat @ dagger(k.mat) - np.eye(n) / n) <= tol


def local_connector(u, v, tol=DEFAULT_TOL):
    """The local unitary ``U V^dagger`` taking ``|V>>`` to ``|U>>``."""
    u = as_matrix(u, "u")
    v = as_matrix(v, "v")
    if u.shape != v.shape:
        raise DimensionError(f"shapes differ: {u.shape} vs {v.shape}")
    for name, x in (("u", u), ("v", v)):
        if not is_unitary(x, tol):
            raise NotUnitaryError(f"{name} is not unitary")
    return u @ dagger(v)


def hat_index_sum(a, n=None):
    """The raw contraction ``X[i, j] = sum_l <i|<j| a |l>|l>``.

    ``a |1>> = |X>>`` with this ``X``; see :func:`hat_map` for the operator
    that acts locally.
    """
    a = as_matrix(a)
    if n is None:
        n = int(round(np.sqrt(a.shape[0])))
    if a.shape != (n * n, n * n):
        raise DimensionError(f"expected a {n * n}x{n * n} operator, got {a.shape}")
    t = a.reshape(n, n, n, n)
    return np.einsum("ijll->ij", t)


def hat_map(a, n=None):
    """Local operator ``A_hat`` on one factor with ``a |1>> = (1 (x) A_hat) |1>>``.

    Equivalently ``a |1>> = |A_hat^T>>``, so ``A_hat`` is the transpose of
    :func:`hat_index_sum`.
    """
    return hat_index_sum(a, n).T.copy()
