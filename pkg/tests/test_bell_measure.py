import numpy as np
import pytest

from bellops.bell_measure import (
    bell_observable,
    bell_povm,
    measure,
    observable_tensor_form,
    povm_from_spanning,
    spectral_match,
    znzn_povm,
)
from bellops.doubleket import DoubleKet, is_max_entangled
from bellops.errors import IncompleteError, InjectivityError, InvalidStateError, NotUnitaryError
from bellops.matrix_core import random_density, tensor
from bellops.spanning import SpanningSet, znzn_basis
from oracles import haar

BELL = {
    # standard qubit Bell vectors in the |00>,|01>,|10>,|11> basis
    "phi+": np.array([1, 0, 0, 1]) / np.sqrt(2),
    "phi-": np.array([1, 0, 0, -1]) / np.sqrt(2),
    "psi+": np.array([0, 1, 1, 0]) / np.sqrt(2),
    "psi-": np.array([0, 1, -1, 0]) / np.sqrt(2),
}


def test_qubit_povm_is_the_bell_basis():
    p = znzn_povm(2)
    assert len(p) == 4
    np.testing.assert_allclose(sum(p.effects), np.eye(4), atol=1e-15)
    projectors = [np.outer(v, v) for v in BELL.values()]
    for e in p.effects:
        assert min(np.linalg.norm(e - q) for q in projectors) < 1e-15


def test_qutrit_povm_sums_to_identity():
    p = znzn_povm(3)
    assert len(p) == 9
    assert np.linalg.norm(sum(p.effects) - np.eye(9)) < 1e-13


def test_single_unitary_is_rejected():
    with pytest.raises(IncompleteError):
        bell_povm([np.eye(2)], [2.0])


def test_non_unitary_is_rejected():
    with pytest.raises(NotUnitaryError):
        bell_povm([np.ones((2, 2))], [1.0])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_effects_are_rank_one_and_maximally_entangled(n):
    p = znzn_povm(n)
    for e, u, w in zip(p.effects, p.unitaries, p.weights):
        ev = np.linalg.eigvalsh(e)
        assert abs(ev[-1] - w * n) < 1e-12
        assert np.all(np.abs(ev[:-1]) < 1e-12)
        assert is_max_entangled(DoubleKet(u / np.sqrt(n)))


def test_conjugated_basis_gives_a_bell_povm():
    rng = np.random.default_rng(2)
    v = haar(rng, 3)
    b = znzn_basis(3)
    s = SpanningSet([v @ e for e in b.elements], b.weights)
    p = povm_from_spanning(s)
    assert np.linalg.norm(sum(p.effects) - np.eye(9)) < 1e-12


def test_measure_eigenstate_and_mixed():
    p = znzn_povm(3)
    for j in (0, 4, 8):
        u = p.unitaries[j]
        v = u.reshape(-1) / np.sqrt(3)
        probs = measure(p, np.outer(v, v.conj()))
        expected = np.zeros(9)
        expected[j] = 1
        np.testing.assert_allclose(probs, expected, atol=1e-14)
    np.testing.assert_allclose(measure(p, np.eye(9) / 9), np.full(9, 1 / 9), atol=1e-15)


def test_measure_product_with_mixed_half_is_uniform():
    rho = random_density(2, 3)
    probs = measure(znzn_povm(2), tensor(rho, np.eye(2) / 2))
    np.testing.assert_allclose(probs, np.full(4, 0.25), atol=1e-14)
    assert abs(probs.sum() - 1) < 1e-10


def test_measure_rejects_invalid_state():
    with pytest.raises(InvalidStateError):
        measure(znzn_povm(2), np.diag([2.0, -1.0, 0, 0]))


def test_observable_enumeration_spectrum():
    p = znzn_povm(2)
    obs = bell_observable(p, [0, 1, 2, 3])
    np.testing.assert_allclose(np.linalg.eigvalsh(obs.operator), [0, 1, 2, 3], atol=1e-14)
    np.testing.assert_allclose(obs.operator, obs.operator.conj().T)


def test_observable_rejects_non_injective():
    p = znzn_povm(2)
    with pytest.raises(InjectivityError) as info:
        bell_observable(p, [0.0] * 4)
    assert len(info.value.collisions) == 3
    with pytest.raises(InjectivityError) as info:
        bell_observable(p, [0, 1, 2, 1 + 1e-12])
    assert info.value.collisions == [((0, 1), (1, 1))]


def test_observable_from_mapping():
    p = znzn_povm(2)
    f = {lab: float(i) for i, lab in enumerate(p.labels)}
    np.testing.assert_allclose(bell_observable(p, f).operator, bell_observable(p, [0, 1, 2, 3]).operator)


def test_eigenprojectors_recover_effects():
    rng = np.random.default_rng(7)
    p = znzn_povm(3)
    obs = bell_observable(p, rng.standard_normal(9))
    assignment, mismatch = spectral_match(obs, p)
    assert sorted(assignment) == list(range(9))
    assert mismatch < 1e-10


def test_observable_projectors_reproduce_measurement():
    rng = np.random.default_rng(8)
    p = znzn_povm(2)
    f = rng.standard_normal(4)
    obs = bell_observable(p, f)
    vals, vecs = np.linalg.eigh(obs.operator)
    for seed in range(5):
        state = random_density(4, seed)
        probs = measure(p, state)
        for i in range(4):
            v = vecs[:, i]
            k = int(np.argmin(np.abs(np.asarray(f) - vals[i])))
            assert abs(np.real(v.conj() @ state @ v) - probs[k]) < 1e-12


def test_tensor_form_examples():
    for n in (2, 3):
        delta = np.zeros(n * n)
        delta[0] = 1
        proj = np.outer(np.eye(n).reshape(-1), np.eye(n).reshape(-1)) / n
        np.testing.assert_allclose(observable_tensor_form(n, delta), proj, atol=1e-14)
        np.testing.assert_allclose(observable_tensor_form(n, np.full(n * n, 2.5)), 2.5 * np.eye(n * n), atol=1e-13)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_tensor_form_matches_direct_form(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        f = rng.standard_normal(n * n)
        direct = bell_observable(znzn_povm(n), f).operator
        assert np.linalg.norm(direct - observable_tensor_form(n, f)) < 1e-10


def test_povm_json_metadata():
    d = znzn_povm(2).to_dict()
    assert d["dim"] == 2 and len(d["effects"]) == 4 and d["labels"][1] == [0, 1]
    o = bell_observable(znzn_povm(2), [0, 1, 2, 3]).to_dict()
    assert o["f"] == [0, 1, 2, 3] and o["rows"] == 4
