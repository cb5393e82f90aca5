import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ghzsim import opkit
from conftest import random_hermitian, taylor_expm


def test_pauli_x_single_spin():
    np.testing.assert_array_equal(opkit.pauli("x", 1, 1), [[0, 1], [1, 0]])


def test_pauli_z_embedded_first_of_three():
    np.testing.assert_array_equal(opkit.pauli("z", 1, 3), np.diag([1, 1, 1, 1, -1, -1, -1, -1]))


def test_pauli_squares_to_identity():
    y = opkit.pauli("y", 2, 2)
    np.testing.assert_array_equal(y @ y, np.eye(4))


@pytest.mark.parametrize("axis,spin,n", [("q", 1, 1), ("x", 0, 2), ("x", 3, 2), ("z", 1, 5)])
def test_pauli_rejects_bad_indices(axis, spin, n):
    with pytest.raises(opkit.OperatorError):
        opkit.pauli(axis, spin, n)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_anticommutation(n):
    for j in range(1, n + 1):
        for a in opkit.AXES:
            for b in opkit.AXES:
                pa, pb = opkit.pauli(a, j, n), opkit.pauli(b, j, n)
                expected = 2 * (a == b) * np.eye(2**n)
                assert np.max(np.abs(pa @ pb + pb @ pa - expected)) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_paulis_hermitian_traceless(n):
    for j in range(1, n + 1):
        for a in opkit.AXES:
            p = opkit.pauli(a, j, n)
            assert opkit.hermiticity_error(p) == 0
            assert opkit.trace(p) == 0


def test_algebra_helpers():
    x, y, z = (opkit.pauli(a, 1, 1) for a in "xyz")
    assert opkit.trace(x) == 0
    np.testing.assert_allclose(opkit.commutator(x, y), 2j * z)
    np.testing.assert_allclose(opkit.add(x, x), opkit.scale(2, x))
    np.testing.assert_allclose(opkit.mul(x, y), 1j * z)
    np.testing.assert_allclose(opkit.dagger(y), y)
    with pytest.raises(opkit.OperatorError):
        opkit.mul(x, opkit.pauli("x", 1, 2))
    with pytest.raises(opkit.OperatorError):
        opkit.n_spins(np.eye(3))


def test_unitary_dagger_times_itself():
    u = opkit.expm_hermitian_generator(opkit.pauli_product("xzy"), 0.37)
    assert np.max(np.abs(opkit.dagger(u) @ u - np.eye(8))) <= 1e-12


def test_expm_z_half_turn():
    u = opkit.expm_hermitian_generator(opkit.pauli("z", 1, 1), math.pi)
    assert np.max(np.abs(u + np.eye(2))) <= 1e-12


def test_expm_generates_ghz_from_all_up():
    # exp(+i pi/4 sx sx sy) |+++> = (|+++> - |--->)/sqrt(2); pass t = -pi/4
    u = opkit.expm_hermitian_generator(opkit.pauli_product("xxy"), -math.pi / 4)
    psi = u @ opkit.basis_state("+++")
    expected = (opkit.basis_state("+++") - opkit.basis_state("---")) / math.sqrt(2)
    assert np.max(np.abs(psi - expected)) <= 1e-12


def test_expm_rejects_non_hermitian():
    with pytest.raises(opkit.OperatorError):
        opkit.expm_hermitian_generator(np.array([[0, 1], [0, 0]]), 1.0)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4), t=st.floats(-10, 10))
def test_expm_matches_taylor_oracle(seed, n, t):
    h = random_hermitian(np.random.default_rng(seed), 2**n)
    u = opkit.expm_hermitian_generator(h, t)
    assert np.max(np.abs(u @ u.conj().T - np.eye(2**n))) <= 1e-10
    assert np.max(np.abs(u - taylor_expm(-1j * t * h))) <= 1e-8


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t1=st.floats(-5, 5), t2=st.floats(-5, 5))
def test_expm_group_property_and_unit_determinant(seed, t1, t2):
    h = random_hermitian(np.random.default_rng(seed), 8)
    h = h - np.trace(h) / 8 * np.eye(8)
    u12 = opkit.expm_hermitian_generator(h, t1 + t2)
    u1u2 = opkit.expm_hermitian_generator(h, t1) @ opkit.expm_hermitian_generator(h, t2)
    assert np.max(np.abs(u12 - u1u2)) <= 1e-10
    assert abs(abs(np.linalg.det(u12)) - 1) <= 1e-10


def test_z_eigenvalues_ordering():
    m = opkit.z_eigenvalues(3)
    np.testing.assert_array_equal(m[0], [1, 1, 1])
    np.testing.assert_array_equal(m[7], [-1, -1, -1])
    np.testing.assert_array_equal(m[3], [1, -1, -1])
