"""Teleportation on three equal-dimension systems.

System 1 carries the input, systems 2 and 3 share the resource, and the
Bell measurement acts on 1 and 2.  Every simulation is done twice where
possible: once with dense operators on the full ``N^3``-dimensional space
and once with the closed-form shortcut, so the two can be compared.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .bell_measure import povm_from_spanning
from .doubleket import hat_map
from .errors import ConsistencyError, DimensionError, InvalidStateError, NotUnitaryError
from .matrix_core import (
    DEFAULT_TOL,
    as_matrix,
    dagger,
    fidelity,
    fro,
    is_density,
    is_unitary,
    matrix_from_dict,
    matrix_to_dict,
    partial_trace,
    polar,
    sqrtm_psd,
    trace_distance,
)
from .spanning import SpanningSet, znzn_basis, znzn_element

# outcomes with probability below this get no normalized state
ZERO_PROB = 1e-14


# -- channels ----------------------------------------------------------------

@dataclass(frozen=True)
class KrausChannel:
    """``rho -> sum_mu A_mu rho A_mu^dagger``.

    ``trace_preserving=False`` skips the ``sum A^dagger A = 1`` check; the
    localized channels returned by :func:`localize_channel` need that.
    """

    kraus_ops: tuple
    trace_preserving: bool = True
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        ops = tuple(as_matrix(a, "Kraus operator") for a in self.kraus_ops)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for a in ops:
            if a.shape != (d, d):
                raise DimensionError(f"Kraus operators must all be {d}x{d}, got {a.shape}")
            a.flags.writeable = False
        object.__setattr__(self, "kraus_ops", ops)
        if self.trace_preserving:
            resid = self.tp_residual()
            if resid > self.tol:
                raise ValueError(f"channel is not trace preserving (residual {resid:.3e})")

    @property
    def dim(self):
        return self.kraus_ops[0].shape[0]

    def tp_residual(self):
        s = sum(dagger(a) @ a for a in self.kraus_ops)
        return fro(s - np.eye(self.dim))

    def __call__(self, rho):
        rho = as_matrix(rho)
        return sum(a @ rho @ dagger(a) for a in self.kraus_ops)

    def to_dict(self):
        return {"kind": "kraus", "ops": [matrix_to_dict(a) for a in self.kraus_ops]}

    @classmethod
    def from_dict(cls, d):
        if d.get("kind") != "kraus":
            raise ValueError("object is not tagged kind='kraus'")
        return cls([matrix_from_dict(a) for a in d["ops"]])

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def identity_channel(dim):
    return KrausChannel([np.eye(dim)])


def depolarizing(dim, p):
    """``rho -> (1-p) rho + p Tr[rho] 1/dim`` via the clock-and-shift unitaries."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    ops = []
    for m in range(dim):
        for s in range(dim):
            w = p / dim**2 + (1 - p if (m, s) == (0, 0) else 0.0)
            if w > 0:
                ops.append(np.sqrt(w) * znzn_element(dim, m, s))
    return KrausChannel(ops)


def amplitude_damping(gamma):
    if not 0 <= gamma <= 1:
        raise ValueError("gamma must lie in [0, 1]")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]])
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]])
    return KrausChannel([k0, k1])


def correlated_flip(p):
    """Two-qubit channel flipping both qubits together with probability ``p``."""
    x = np.array([[0, 1], [1, 0]])
    return KrausChannel([np.sqrt(1 - p) * np.eye(4), np.sqrt(p) * np.kron(x, x)])


def on_second(channel, dim):
    """Lift a channel on one factor to ``1 (x) channel`` on ``C^dim (x) C^dim``."""
    return KrausChannel([np.kron(np.eye(dim), a) for a in channel.kraus_ops])


def on_first(channel, dim):
    return KrausChannel([np.kron(a, np.eye(dim)) for a in channel.kraus_ops])


def localize_channel(e, n=None):
    """Channel with Kraus operators ``hat_map(A_mu)`` acting on one factor.

    It reproduces ``e`` on the maximally entangled state only; it is not
    trace preserving in general.
    """
    if n is None:
        n = int(round(np.sqrt(e.dim)))
    if n * n != e.dim:
        raise DimensionError(f"channel dimension {e.dim} is not a perfect square")
    return KrausChannel([hat_map(a, n) for a in e.kraus_ops], trace_preserving=False)


# -- records -----------------------------------------------------------------

@dataclass(frozen=True)
class TeleportRecord:
    label: object
    probability: float
    conditional: np.ndarray | None
    corrected: np.ndarray | None

    def to_dict(self, reference=None):
        out = {
            "label": list(self.label) if isinstance(self.label, tuple) else self.label,
            "probability": self.probability,
            "conditional": None if self.conditional is None else matrix_to_dict(self.conditional),
            "corrected": None if self.corrected is None else matrix_to_dict(self.corrected),
        }
        if reference is not None:
            out["fidelity"] = None if self.corrected is None else fidelity(reference, self.corrected)
        return out


def _as_basis(basis, n):
    if basis is None:
        return znzn_basis(n)
    if isinstance(basis, SpanningSet):
        return basis
    us = [as_matrix(u) for u in basis]
    return SpanningSet(us, [1.0 / n] * len(us))


def _check_rho(rho, tol):
    rho = as_matrix(rho, "rho")
    if not is_density(rho, tol):
        raise InvalidStateError("rho is not a density matrix")
    return rho


def max_entangled(n):
    """``|1>><<1| / N`` on two copies of ``C^N``."""
    v = np.eye(n).reshape(-1) / np.sqrt(n)
    return np.outer(v, v).astype(complex)


def simulate(rho, povm, resource):
    """Unnormalized states on system 3, one per effect, by dense evolution.

    ``resource`` is the (possibly mixed) state of systems 2 and 3.
    """
    n = povm.dim
    total = np.kron(rho, resource)
    eye = np.eye(n)
    out = []
    for eff in povm.effects:
        out.append(partial_trace(np.kron(eff, eye) @ total, n * n, n, keep=2))
    return out


def transfer_operator(n):
    """The contraction ``<<1|_12 |1>>_23`` as an ``N x N`` map from system 1 to 3."""
    bra12 = np.eye(n).reshape(1, -1)
    ket23 = np.eye(n).reshape(-1, 1)
    left = np.kron(bra12, np.eye(n))   # N^3 -> N
    right = np.kron(np.eye(n), ket23)  # N -> N^3
    return left @ right


def _records(labels, povm, unnorm, corrections):
    recs = []
    for lab, st, w in zip(labels, unnorm, corrections):
        p = float(np.trace(st).real)
        if p < ZERO_PROB:
            recs.append(TeleportRecord(lab, max(p, 0.0), None, None))
            continue
        cond = st / p
        cond = 0.5 * (cond + dagger(cond))
        corr = w @ cond @ dagger(w)
        recs.append(TeleportRecord(lab, p, cond, corr))
    return recs


def ideal_teleport(rho, basis=None, resource_v=None, tol=DEFAULT_TOL):
    """Teleport ``rho`` with the resource ``|V>>/sqrt(N)`` (default ``V = 1``).

    The correction for outcome ``U`` is the unitary ``U V^*``.
    """
    rho = _check_rho(rho, tol)
    n = rho.shape[0]
    s = _as_basis(basis, n)
    if s.dim != n:
        raise DimensionError(f"basis acts on dimension {s.dim}, rho on {n}")
    v = np.eye(n) if resource_v is None else as_matrix(resource_v, "resource")
    if v.shape != (n, n):
        raise DimensionError(f"resource must be {n}x{n}, got {v.shape}")
    if not is_unitary(v, tol):
        raise NotUnitaryError("resource matrix is not unitary")
    povm = povm_from_spanning(s, tol)
    vec = v.reshape(-1) / np.sqrt(n)
    unnorm = simulate(rho, povm, np.outer(vec, np.conj(vec)))
    corrections = [u @ np.conj(v) for u in povm.unitaries]
    return _records(povm.labels, povm, unnorm, corrections)


def noisy_teleport(rho, basis=None, channel=None, tol=DEFAULT_TOL):
    """Teleport through a resource ``E(|1>><<1|/N)`` for a channel ``E`` on systems 2, 3.

    The dense simulation is checked against the shortcut
    ``w/N * E_hat(U^dagger rho U)`` and a :class:`ConsistencyError` is raised
    if any outcome disagrees in probability or state beyond ``tol``.
    """
    rho = _check_rho(rho, tol)
    n = rho.shape[0]
    s = _as_basis(basis, n)
    if s.dim != n:
        raise DimensionError(f"basis acts on dimension {s.dim}, rho on {n}")
    e = identity_channel(n * n) if channel is None else channel
    if e.dim != n * n:
        raise DimensionError(f"channel acts on dimension {e.dim}, expected {n * n}")
    povm = povm_from_spanning(s, tol)
    unnorm = simulate(rho, povm, e(max_entangled(n)))
    local = localize_channel(e, n)
    for lab, u, w, full in zip(povm.labels, povm.unitaries, povm.weights, unnorm):
        short = (w / n) * local(dagger(u) @ rho @ u)
        pf, ps = np.trace(full).real, np.trace(short).real
        if abs(pf - ps) > tol:
            raise ConsistencyError(f"outcome {lab!r}: probability {pf!r} (full) vs {ps!r} (shortcut)")
        if pf > ZERO_PROB and trace_distance(full / pf, short / ps) > tol:
            raise ConsistencyError(f"outcome {lab!r}: conditional states differ")
    return _records(povm.labels, povm, unnorm, list(povm.unitaries))


def noisy_teleport_shortcut(rho, basis=None, channel=None):
    """Records computed only through the localized channel."""
    rho = as_matrix(rho)
    n = rho.shape[0]
    s = _as_basis(basis, n)
    e = identity_channel(n * n) if channel is None else channel
    local = localize_channel(e, n)
    povm = povm_from_spanning(s)
    unnorm = [(w / n) * local(dagger(u) @ rho @ u) for u, w in zip(povm.unitaries, povm.weights)]
    return _records(povm.labels, povm, unnorm, list(povm.unitaries))


@dataclass(frozen=True)
class PureOutcome:
    label: object
    probability: float
    vector: np.ndarray | None
    fidelity: float | None


def pure_resource_teleport(psi, s, basis=None, validate=True, tol=DEFAULT_TOL):
    """Teleport the pure state ``psi`` through the resource ``|S>>``.

    Each outcome gives the corrected, unnormalized vector
    ``sqrt(w) U S^T U^dagger psi`` whose squared norm is the outcome
    probability.  With ``validate`` the probabilities and states are checked
    against the dense simulation.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    npsi = np.linalg.norm(psi)
    if npsi == 0:
        raise ValueError("psi is the zero vector")
    psi = psi / npsi
    s = as_matrix(s, "S")
    n = psi.size
    if s.shape != (n, n):
        raise DimensionError(f"S must be {n}x{n}, got {s.shape}")
    ns = fro(s)
    if ns == 0:
        raise ValueError("S is zero")
    s = s / ns
    povm = povm_from_spanning(_as_basis(basis, n), tol)
    outcomes = []
    for lab, u, w in zip(povm.labels, povm.unitaries, povm.weights):
        vec = np.sqrt(w) * (u @ s.T @ dagger(u) @ psi)
        p = float(np.vdot(vec, vec).real)
        if p < ZERO_PROB:
            outcomes.append(PureOutcome(lab, max(p, 0.0), None, None))
        else:
            outcomes.append(PureOutcome(lab, p, vec, float(abs(np.vdot(psi, vec)) ** 2 / p)))
    if validate:
        res = s.reshape(-1)
        full = simulate(np.outer(psi, np.conj(psi)), povm, np.outer(res, np.conj(res)))
        for out, u, st in zip(outcomes, povm.unitaries, full):
            pf = float(np.trace(st).real)
            if abs(pf - out.probability) > tol:
                raise ConsistencyError(f"outcome {out.label!r}: probability mismatch")
            if out.vector is not None:
                corrected = u @ st @ dagger(u)
                if fro(corrected - np.outer(out.vector, np.conj(out.vector))) > tol:
                    raise ConsistencyError(f"outcome {out.label!r}: state mismatch")
    return outcomes


# -- minimum fidelity for qubit resources ------------------------------------

@dataclass(frozen=True)
class FidelityReport:
    epsilon: float | None
    analytic: float | None
    brute: float | None = None
    argmin: tuple | None = None
    real_family_min: float | None = None

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "F_analytic": self.analytic,
            "F_brute": self.brute,
            "argmin": None if self.argmin is None else [float(x) for x in self.argmin],
            "real_family_min": self.real_family_min,
        }


def s_epsilon(eps):
    """``(1+eps)|0><0| + (1-eps)|1><1|``."""
    return np.diag([1 + eps, 1 - eps]).astype(complex)


def _qubit(s):
    s = as_matrix(s, "S")
    if s.shape != (2, 2):
        raise DimensionError(f"S must be 2x2, got {s.shape}")
    if fro(s) == 0:
        raise ValueError("S is the zero matrix")
    return s


def min_fidelity_analytic(s):
    """``4 det(S~) / Tr[S~]^2`` with ``S~ = sqrt(S^dagger S)``.

    ``epsilon`` in the report is the parameter of the equivalent
    ``diag(1+eps, 1-eps)`` resource.
    """
    s = _qubit(s)
    st = sqrtm_psd(dagger(s) @ s)
    tr = np.trace(st).real
    f = float(4 * np.linalg.det(st).real / tr**2)
    f = min(max(f, 0.0), 1.0)
    return FidelityReport(float(np.sqrt(1 - f)), f)


def fidelity_ratio(t, psi):
    """``|<psi|T|psi>|^2 / <psi|T^dagger T|psi>`` for columns of ``psi``.

    Points where ``T psi = 0`` get 0, the limit along the approach to the kernel
    for positive ``T``.
    """
    tp = t @ psi
    num = np.abs(np.sum(np.conj(psi) * tp, axis=0)) ** 2
    den = np.sum(np.abs(tp) ** 2, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(den > 0, num / den, 0.0)
    return r


def _bloch(theta, phi):
    theta = np.atleast_1d(theta)
    phi = np.atleast_1d(phi)
    return np.vstack([np.cos(theta / 2) + 0j, np.exp(1j * phi) * np.sin(theta / 2)])


def min_fidelity_brute(s, grid_size=256, align=True, sweeps=30):
    """Minimize the fidelity ratio over all pure qubit states by search.

    A ``grid_size x grid_size`` grid in (theta, phi) is followed by
    alternating bounded scalar minimizations around the best grid point.
    With ``align`` the unitary polar factor of ``S`` is first removed, i.e.
    the resource is brought to the positive form reachable by a local
    unitary on the measured side; with ``align=False`` the ratio is taken
    literally with ``S^T``.  The minimum over the real family
    ``cos x|0> + sin x|1>`` is reported separately.
    """
    if grid_size < 100:
        raise ValueError("grid_size must be >= 100")
    s = _qubit(s)
    t = (polar(s).positive if align else s).T

    thetas = np.linspace(0.0, np.pi, grid_size)
    phis = np.linspace(0.0, 2 * np.pi, grid_size, endpoint=False)
    th, ph = np.meshgrid(thetas, phis, indexing="ij")
    vals = fidelity_ratio(t, _bloch(th.ravel(), ph.ravel())).reshape(th.shape)
    i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
    best_t, best_p, best = thetas[i], phis[j], float(vals[i, j])

    def f(theta, phi):
        return float(fidelity_ratio(t, _bloch(theta, phi))[0])

    dt = np.pi / (grid_size - 1)
    dp = 2 * np.pi / grid_size
    for _ in range(sweeps):
        prev = best
        r = minimize_scalar(lambda x: f(x, best_p), bounds=(max(best_t - dt, 0.0), min(best_t + dt, np.pi)),
                            method="bounded", options={"xatol": 1e-12})
        if r.fun < best:
            best_t, best = float(r.x), float(r.fun)
        r = minimize_scalar(lambda y: f(best_t, y), bounds=(best_p - dp, best_p + dp),
                            method="bounded", options={"xatol": 1e-12})
        if r.fun < best:
            best_p, best = float(r.x), float(r.fun)
        if prev - best < 1e-15:
            break

    xs = np.linspace(0.0, np.pi, 4 * grid_size, endpoint=False)
    fam = fidelity_ratio(t, np.vstack([np.cos(xs) + 0j, np.sin(xs) + 0j]))
    k = int(np.argmin(fam))
    dx = xs[1] - xs[0]
    r = minimize_scalar(lambda x: float(fidelity_ratio(t, np.array([[np.cos(x)], [np.sin(x)]], dtype=complex))[0]),
                        bounds=(xs[k] - dx, xs[k] + dx), method="bounded", options={"xatol": 1e-12})
    real_min = min(float(fam[k]), float(r.fun))

    best = min(max(best, 0.0), 1.0)
    return FidelityReport(None, None, best, (float(best_t), float(best_p % (2 * np.pi))), real_min)


def min_fidelity(s, grid_size=256):
    """Analytic and brute-force minimum fidelity in one report."""
    a = min_fidelity_analytic(s)
    b = min_fidelity_brute(s, grid_size)
    return FidelityReport(a.epsilon, a.analytic, b.brute, b.argmin, b.real_family_min)


def fidelity_sweep(eps_values, grid_size=256):
    """Rows ``(eps, F_analytic, F_brute)`` for the ``diag(1+eps, 1-eps)`` resources."""
    rows = []
    for eps in eps_values:
        rep = min_fidelity(s_epsilon(float(eps)), grid_size)
        rows.append({"epsilon": float(eps), "F_analytic": rep.analytic, "F_brute": rep.brute,
                     "F_expected": 1 - float(eps) ** 2})
    return rows


def perturbation_curve(rho, strengths, seed=0):
    """Worst corrected fidelity when the resource ``|1>>`` is bent by ``delta H``.

    ``H`` is a fixed random Hermitian direction; each strength gives the
    resource ``|1 + delta H>>`` (normalized) and the minimum over outcomes of
    the fidelity between ``rho`` and the corrected output.  No bound is
    claimed; this is an empirical curve.
    """
    rho = _check_rho(rho, DEFAULT_TOL)
    n = rho.shape[0]
    rng = np.random.default_rng(seed)
    h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = 0.5 * (h + dagger(h))
    povm = povm_from_spanning(znzn_basis(n))
    rows = []
    for delta in strengths:
        s = np.eye(n) + float(delta) * h
        res = s.reshape(-1) / fro(s)
        unnorm = simulate(rho, povm, np.outer(res, np.conj(res)))
        recs = _records(povm.labels, povm, unnorm, list(povm.unitaries))
        worst = min(fidelity(rho, r.corrected) for r in recs if r.corrected is not None)
        rows.append({"delta": float(delta), "min_fidelity": worst})
    return rows
