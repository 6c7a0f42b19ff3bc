"""Displacement operators on a truncated Fock space.

The identities checked here hold exactly only in infinite dimension.  On
``n_max`` levels the top of the ladder is corrupted, so every residual is
measured on the projection onto levels below ``interior_cut``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix_core import dagger, expm, fro

DEFAULT_NMAX = 60
DEFAULT_INTERIOR = 40


@dataclass(frozen=True)
class FockSpace:
    n_max: int

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError("n_max must be >= 2")

    @property
    def a(self):
        """Annihilation operator, ``a|n> = sqrt(n)|n-1>``."""
        return np.diag(np.sqrt(np.arange(1, self.n_max)), k=1).astype(complex)

    @property
    def adag(self):
        return dagger(self.a)

    def number(self):
        return np.diag(np.arange(self.n_max)).astype(complex)


def annihilation(n_max):
    return FockSpace(n_max).a


def displacement(z, n_max=DEFAULT_NMAX):
    """``exp(z a^dagger - z^* a)`` with the truncated ladder operators."""
    a = annihilation(n_max)
    return expm(z * dagger(a) - np.conj(z) * a)


def z12_operator(n_max=DEFAULT_NMAX):
    """``a (x) 1 - 1 (x) a^dagger`` on two truncated modes."""
    a = annihilation(n_max)
    eye = np.eye(n_max)
    return np.kron(a, eye) - np.kron(eye, dagger(a))


def interior(m, cut):
    """Top-left ``cut x cut`` block, i.e. ``P m P`` on levels below ``cut``."""
    return m[:cut, :cut]


def commutator_interior_residual(n_max, cut):
    """``|| P [a, a^dagger] P - P ||`` (zero whenever ``cut < n_max``)."""
    a = annihilation(n_max)
    c = a @ dagger(a) - dagger(a) @ a
    return fro(interior(c - np.eye(n_max), cut))


def z12_normality_residual(n_max, cut):
    """Interior residual of ``[Z12, Z12^dagger]`` with both modes cut at ``cut``."""
    z = z12_operator(n_max)
    c = z @ dagger(z) - dagger(z) @ z
    t = c.reshape(n_max, n_max, n_max, n_max)[:cut, :cut, :cut, :cut]
    return float(np.linalg.norm(t))


def eigen_relation_residual(z, n_max=DEFAULT_NMAX, interior_cut=DEFAULT_INTERIOR):
    """Relative interior residual of ``Z12 |D(z)>> = z |D(z)>>``.

    With ``a`` real, ``Z12 |D>> = |a D - D a>>``; the residual is
    ``||P(aD - Da - zD)P|| / ||P D P||``.  The dense ``Z12`` is not formed.
    """
    if not interior_cut < n_max:
        raise ValueError("interior_cut must be < n_max")
    a = annihilation(n_max)
    d = displacement(z, n_max)
    r = a @ d - d @ a - z * d
    return fro(interior(r, interior_cut)) / fro(interior(d, interior_cut))


def eigen_relation_dense(z, n_max, interior_cut):
    """Same residual as :func:`eigen_relation_residual` through the dense ``Z12``."""
    d = displacement(z, n_max)
    v = d.reshape(-1)
    r = (z12_operator(n_max) @ v - z * v).reshape(n_max, n_max)
    return fro(interior(r, interior_cut)) / fro(interior(d, interior_cut))


def eigen_ladder(z, n_max_values, interior_cut):
    return [
        {"n_max": int(n), "interior_cut": int(interior_cut), "z": [float(np.real(z)), float(np.imag(z))],
         "residual": eigen_relation_residual(z, n, interior_cut)}
        for n in n_max_values
    ]


def decreasing(values, floor=1e-13):
    """Non-increasing along the ladder, treating values below ``floor`` as equal."""
    return all(b < a or (a < floor and b < floor) for a, b in zip(values, values[1:]))


def smallest_nmax(z, target, interior_cut, start=None, stop=400):
    """Smallest truncation meeting ``target`` for the eigen relation at ``z``."""
    n = interior_cut + 1 if start is None else start
    while n <= stop:
        if eigen_relation_residual(z, n, interior_cut) < target:
            return n
        n += 1
    return None


def weyl_residual(z, w, n_max=DEFAULT_NMAX, interior_cut=30):
    """Relative interior residual of ``D(z) D(w) = exp(i Im(z w^*)) D(z + w)``."""
    lhs = displacement(z, n_max) @ displacement(w, n_max)
    rhs = np.exp(1j * np.imag(z * np.conj(w))) * displacement(z + w, n_max)
    return fro(interior(lhs - rhs, interior_cut)) / fro(interior(rhs, interior_cut))


def unitarity_residual(z, n_max=DEFAULT_NMAX):
    d = displacement(z, n_max)
    return fro(d @ dagger(d) - np.eye(n_max))


@dataclass(frozen=True)
class DisplacementGrid:
    """Square lattice of spacing ``spacing`` clipped to ``|z| <= radius``; weights ``spacing^2 / pi``."""

    radius: float
    spacing: float
    n_max: int = DEFAULT_NMAX

    def __post_init__(self):
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")

    @property
    def points(self):
        if self.radius < 0:
            return np.zeros(0, dtype=complex)
        k = int(np.floor(self.radius / self.spacing))
        xs = self.spacing * np.arange(-k, k + 1)
        zs = (xs[:, None] + 1j * xs[None, :]).ravel()
        return zs[np.abs(zs) <= self.radius + 1e-12]

    @property
    def weights(self):
        return np.full(self.points.size, self.spacing**2 / np.pi)

    def operators(self):
        """Displacement operators at the grid points, in lattice order."""
        return [displacement(z, self.n_max) for z in self.points]


def wh_depolarizing_residual(a_op, grid, interior_cut):
    """Interior residual of ``sum_j w_j D(z_j)^dagger A D(z_j) - Tr[A] 1``.

    Summation runs in the fixed lattice order so results are reproducible.
    """
    pts = grid.points
    if pts.size == 0:
        raise ValueError("grid is empty")
    a_op = np.asarray(a_op, dtype=complex)
    n = grid.n_max
    if a_op.shape != (n, n):
        raise ValueError(f"operator must be {n}x{n}, got {a_op.shape}")
    acc = np.zeros((n, n), dtype=complex)
    for z, w in zip(pts, grid.weights):
        d = displacement(z, n)
        acc += w * (dagger(d) @ a_op @ d)
    target = np.trace(a_op) * np.eye(n)
    return fro(interior(acc - target, interior_cut))


def fock_projector(i, j, n_max):
    """``|i><j|`` on ``n_max`` levels."""
    m = np.zeros((n_max, n_max), dtype=complex)
    m[i, j] = 1.0
    return m


def quadrature_ladder(a_op, radius, spacings, n_max, interior_cut):
    return [
        {"n_max": int(n_max), "interior_cut": int(interior_cut), "R": float(radius), "spacing": float(h),
         "residual": wh_depolarizing_residual(a_op, DisplacementGrid(radius, h, n_max), interior_cut)}
        for h in spacings
    ]
