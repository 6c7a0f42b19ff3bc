"""Slow, index-by-index reference computations.

These deliberately avoid the package and numpy's vectorized helpers so
that the checks they support are independent of the code under test.
"""

import itertools

import numpy as np


def kron_loop(a, b):
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i, j, k, l in itertools.product(range(ra), range(ca), range(rb), range(cb)):
        out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def ptrace_loop(m, d1, d2, keep):
    if keep == 1:
        out = np.zeros((d1, d1), dtype=complex)
        for i, ip, j in itertools.product(range(d1), range(d1), range(d2)):
            out[i, ip] += m[i * d2 + j, ip * d2 + j]
    else:
        out = np.zeros((d2, d2), dtype=complex)
        for j, jp, i in itertools.product(range(d2), range(d2), range(d1)):
            out[j, jp] += m[i * d2 + j, i * d2 + jp]
    return out


def vec_loop(c):
    n, m = c.shape
    v = np.zeros(n * m, dtype=complex)
    for i in range(n):
        for j in range(m):
            v[i * m + j] = c[i, j]
    return v


def znzn_loop(n, m, s):
    u = np.zeros((n, n), dtype=complex)
    for k in range(n):
        u[k, (k + s) % n] = np.exp(2j * np.pi * k * m / n)
    return u


def ginibre(rng, r, c=None):
    c = r if c is None else c
    return rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))


def haar(rng, n):
    q, r = np.linalg.qr(ginibre(rng, n))
    d = np.diag(r)
    return q * (d / abs(d))


def density(rng, n):
    g = ginibre(rng, n)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def teleport_loop(rho, u, w, resource):
    """Unnormalized state on system 3 for effect ``w |U>><<U|`` by explicit index sums.

    ``(Pi (x) 1)(rho (x) R)`` traced over systems 1 and 2.
    """
    n = rho.shape[0]
    out = np.zeros((n, n), dtype=complex)
    R = resource.reshape(n, n, n, n)  # R[j, k, j', k'] for systems 2, 3
    for k, kp in itertools.product(range(n), repeat=2):
        acc = 0j
        # sum over i, j (bra side of trace) and i', j' (internal)
        for i, j, ip, jp in itertools.product(range(n), repeat=4):
            # <ij| Pi |i'j'> = w U[i, j] conj(U[i', j'])
            acc += w * u[i, j] * np.conj(u[ip, jp]) * rho[ip, i] * R[jp, k, j, kp]
        out[k, kp] = acc
    return out
