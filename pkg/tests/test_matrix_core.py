import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bellops.errors import DimensionError
from bellops.matrix_core import (
    dagger,
    dumps,
    expm,
    is_density,
    matrix_from_dict,
    matrix_to_dict,
    partial_trace,
    polar,
    random_density,
    random_unitary,
    svd,
    tensor,
)
from oracles import ginibre, kron_loop, ptrace_loop

X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_tensor_identities():
    np.testing.assert_array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))
    np.testing.assert_array_equal(tensor(np.diag([1, 2]), np.eye(2)), np.diag([1, 1, 2, 2]))


def test_tensor_pauli_x_against_block_loop():
    expected = kron_loop(X, X)
    np.testing.assert_array_equal(expected, np.fliplr(np.eye(4)))
    np.testing.assert_array_equal(tensor(X, X), expected)


def test_tensor_rectangular_against_loop():
    rng = np.random.default_rng(3)
    a, b = ginibre(rng, 2, 3), ginibre(rng, 4, 1)
    np.testing.assert_allclose(tensor(a, b), kron_loop(a, b), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_mixed_product(p, q, r, seed):
    rng = np.random.default_rng(seed)
    a, c = ginibre(rng, p, q), ginibre(rng, q, r)
    b, d = ginibre(rng, r, p), ginibre(rng, p, q)
    lhs = tensor(a, b) @ tensor(c, d)
    assert np.linalg.norm(lhs - tensor(a @ c, b @ d)) < 1e-12


def test_partial_trace_of_max_entangled_is_maximally_mixed():
    for n in (2, 3, 5):
        v = np.eye(n).reshape(-1) / np.sqrt(n)
        m = np.outer(v, v)
        np.testing.assert_allclose(partial_trace(m, n, n, keep=2), np.eye(n) / n, atol=1e-15)
        np.testing.assert_allclose(partial_trace(m, n, n, keep=1), np.eye(n) / n, atol=1e-15)


def test_partial_trace_of_product_state():
    rho, sigma = random_density(3, 1), random_density(2, 2)
    np.testing.assert_allclose(partial_trace(tensor(rho, sigma), 3, 2, keep=1), rho, atol=1e-14)
    np.testing.assert_allclose(partial_trace(tensor(rho, sigma), 3, 2, keep=2), sigma, atol=1e-14)


@pytest.mark.parametrize("d1,d2", [(2, 2), (2, 3), (3, 2)])
@pytest.mark.parametrize("keep", [1, 2])
def test_partial_trace_against_index_sum(d1, d2, keep):
    rng = np.random.default_rng(d1 * 10 + d2)
    h = ginibre(rng, d1 * d2)
    h = h + dagger(h)
    got = partial_trace(h, d1, d2, keep)
    np.testing.assert_allclose(got, ptrace_loop(h, d1, d2, keep), atol=1e-13)
    assert abs(np.trace(got) - np.trace(h)) < 1e-12


def test_partial_trace_rejects_bad_shape():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(5), 2, 2)
    with pytest.raises(ValueError):
        partial_trace(np.eye(4), 2, 2, keep=3)


def test_polar_examples():
    p = polar(np.eye(3))
    np.testing.assert_allclose(p.unitary, np.eye(3), atol=1e-15)
    np.testing.assert_allclose(p.positive, np.eye(3), atol=1e-15)
    u = random_unitary(4, 11)
    p = polar(u)
    np.testing.assert_allclose(p.unitary, u, atol=1e-13)
    np.testing.assert_allclose(p.positive, np.eye(4), atol=1e-13)
    p = polar(np.diag([2.0, -3.0]))
    np.testing.assert_allclose(p.unitary, np.diag([1, -1]), atol=1e-15)
    np.testing.assert_allclose(p.positive, np.diag([2, 3]), atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 5, 16])
def test_polar_and_svd_reconstruct(n):
    rng = np.random.default_rng(n)
    a = ginibre(rng, n)
    a *= 10 / np.linalg.norm(a)
    p = polar(a)
    assert np.linalg.norm(p.reconstruct() - a) < 1e-12
    assert np.linalg.norm(dagger(p.unitary) @ p.unitary - np.eye(n)) < 1e-12
    assert np.linalg.eigvalsh(p.positive)[0] > -1e-12
    np.testing.assert_allclose(p.positive @ p.positive, dagger(a) @ a, atol=1e-10)
    d = svd(a)
    assert np.linalg.norm(d.reconstruct() - a) < 1e-12
    assert np.all(np.diff(d.s) <= 0) and np.all(d.s >= 0)


def test_polar_rank_deficient_is_deterministic_and_unitary():
    a = np.array([[1, 1j], [1, 1j]])
    p1, p2 = polar(a), polar(a)
    np.testing.assert_array_equal(p1.unitary, p2.unitary)
    assert np.linalg.norm(dagger(p1.unitary) @ p1.unitary - np.eye(2)) < 1e-12
    assert np.linalg.norm(p1.reconstruct() - a) < 1e-12


def test_svd_examples():
    np.testing.assert_allclose(svd(np.eye(3)).s, [1, 1, 1])
    np.testing.assert_allclose(svd(np.diag([3.0, 0.0])).s, [3, 0])
    rng = np.random.default_rng(0)
    a = ginibre(rng, 3)
    assert np.linalg.norm(svd(a).reconstruct() - a) < 1e-12


def test_expm_examples():
    np.testing.assert_array_equal(expm(np.zeros((3, 3))), np.eye(3))
    # involution: exp(i t X) = cos t + i sin t X
    np.testing.assert_allclose(expm(1j * np.pi / 2 * X), 1j * X, atol=1e-15)
    np.testing.assert_allclose(expm(np.diag([1.0, 2.0])), np.diag([np.e, np.e**2]), rtol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_expm_properties(seed):
    rng = np.random.default_rng(seed)
    a = ginibre(rng, 6)
    np.testing.assert_allclose(dagger(expm(a)), expm(dagger(a)), atol=1e-10)
    np.testing.assert_allclose(expm(a) @ expm(-a), np.eye(6), atol=1e-10)
    k = a - dagger(a)
    u = expm(k)
    assert np.linalg.norm(dagger(u) @ u - np.eye(6)) < 1e-10


def test_random_unitary():
    u1 = random_unitary(1, 5)
    assert abs(abs(u1[0, 0]) - 1) < 1e-15
    u = random_unitary(4, 5)
    assert np.linalg.norm(u @ dagger(u) - np.eye(4)) < 1e-12
    np.testing.assert_array_equal(u, random_unitary(4, 5))
    assert np.linalg.norm(u - random_unitary(4, 6)) > 0.1


def test_random_density():
    rho = random_density(2, 9)
    w = np.linalg.eigvalsh(rho)
    assert np.all(w >= 0) and abs(w.sum() - 1) < 1e-14
    assert is_density(random_density(5, 1))
    np.testing.assert_array_equal(random_density(3, 4), random_density(3, 4))


def test_json_round_trip_is_exact():
    rng = np.random.default_rng(1)
    m = ginibre(rng, 3, 2) / 7
    back = matrix_from_dict(json.loads(dumps(matrix_to_dict(m))))
    np.testing.assert_array_equal(back, m)


def test_json_rejects_wrong_count():
    with pytest.raises(DimensionError):
        matrix_from_dict({"rows": 2, "cols": 2, "data": [[1, 0]]})
    with pytest.raises(ValueError):
        matrix_from_dict({"rows": 1})
