import numpy as np
import pytest

from maskkit import (
    StateSet,
    certify_hadamard_set,
    flatten_eigenspace,
    fourier_hadamard,
    gram_matrix,
    is_hadamard_unitary,
    random_states_with_gram,
)
from maskkit.gram import REASON_NON_FLAT
from helpers import hadamard_gram, maskable_instance, refusal_gram

TOL = 1e-9


def test_state_set_rejects_non_unit_rows():
    with pytest.raises(ValueError):
        StateSet.from_vectors(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_state_set_rejects_bad_shape():
    with pytest.raises(ValueError):
        StateSet.from_vectors(np.ones(3))


def test_gram_matrix_convention():
    # inner products are conjugate-linear in the first argument
    a = np.array([[1.0, 0.0], [0.0, 1j]], dtype=complex)
    s = StateSet.from_vectors(a)
    g = gram_matrix(s)
    assert g[0, 1] == np.vdot(a[0], a[1])
    assert np.max(np.abs(g - g.conj().T)) < 1e-15
    assert np.max(np.abs(np.diag(g) - 1.0)) < 1e-15


def test_combine_is_linear_in_coefficients():
    s = random_states_with_gram(np.eye(3), 4, seed=0)
    mu = np.array([0.2, -0.5j, 1.0])
    want = 0.2 * s.vectors[0] - 0.5j * s.vectors[1] + s.vectors[2]
    assert np.max(np.abs(s.combine(mu) - want)) < 1e-15


@pytest.mark.parametrize("seed", range(6))
def test_random_states_reproduce_requested_gram(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    dim = int(rng.integers(n, 8))
    _, g, _, _ = maskable_instance(rng, n, dim)
    states = random_states_with_gram(g, dim, seed=seed)
    assert states.dim == dim and states.n == n
    assert np.max(np.abs(states.gram() - g)) < TOL


def test_random_states_handle_rank_deficient_gram():
    f = fourier_hadamard(3).matrix
    g = hadamard_gram(f, np.array([2.0, 1.0, 0.0]))
    states = random_states_with_gram(g, 3, seed=2)
    assert np.max(np.abs(states.gram() - g)) < TOL


def test_random_states_reject_bad_diagonal():
    with pytest.raises(ValueError):
        random_states_with_gram(np.diag([2.0, 0.5]), 2, seed=0)


def test_random_states_reject_indefinite():
    g = np.array([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ValueError):
        random_states_with_gram(g, 2, seed=0)


@pytest.mark.parametrize("seed", range(8))
def test_certify_flat_instances(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(2, 7))
    dim = int(rng.integers(n, 8))
    states, g, _, spectrum = maskable_instance(rng, n, dim)
    cert = certify_hadamard_set(states)
    assert cert
    assert cert.residual < 1e-8
    assert is_hadamard_unitary(cert.unitary.matrix, tol=1e-8)
    assert np.max(np.abs(cert.gram() - g)) < 1e-8
    assert np.max(np.abs(np.sort(cert.spectrum) - np.sort(spectrum))) < 1e-8
    assert abs(np.sum(cert.spectrum) - n) < 1e-8


def test_certify_orthonormal_basis_fully_degenerate():
    states = StateSet.from_vectors(np.eye(4, dtype=complex))
    cert = certify_hadamard_set(states)
    assert cert
    assert np.max(np.abs(cert.spectrum - 1.0)) < TOL
    assert cert.residual < 1e-9


def test_certify_repeated_eigenvalue_blocks():
    # spectrum (1.4, 0.8, 0.8): one simple and one two-fold eigenvalue
    g = np.full((3, 3), 0.2, dtype=complex)
    np.fill_diagonal(g, 1.0)
    states = random_states_with_gram(g, 3, seed=5)
    cert = certify_hadamard_set(states)
    assert cert
    assert np.max(np.abs(cert.gram() - g)) < 1e-8


def test_certify_is_deterministic():
    states = random_states_with_gram(np.eye(3), 3, seed=7)
    a = certify_hadamard_set(states)
    b = certify_hadamard_set(states)
    assert np.array_equal(a.unitary.matrix, b.unitary.matrix)
    assert np.array_equal(a.spectrum, b.spectrum)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_refusal_on_sparse_eigenvectors_is_exact(n):
    rng = np.random.default_rng(n)
    states = random_states_with_gram(refusal_gram(n, rng), n, seed=n)
    result = certify_hadamard_set(states)
    assert not result
    assert result.reason == REASON_NON_FLAT
    assert result.inconclusive is False
    assert result.diagnostics["multiplicity"] == 1
    assert result.diagnostics["modulus_spread"] > 0.1


def test_refusal_object_is_falsy_with_diagnostics():
    rng = np.random.default_rng(0)
    states = random_states_with_gram(refusal_gram(4, rng), 4, seed=1)
    result = certify_hadamard_set(states)
    assert bool(result) is False
    assert "eigenvalue" in result.diagnostics


def test_flatten_eigenspace_full_space():
    # the whole C^3 always contains a flat orthonormal set (Fourier columns)
    r = flatten_eigenspace(np.eye(3, dtype=complex), 3, seed=0)
    assert r is not None
    x = np.eye(3) @ r
    assert np.max(np.abs(np.abs(x) - 1.0 / np.sqrt(3.0))) < 1e-7


def test_flatten_eigenspace_rejects_sparse_line():
    # a single basis vector can never be rotated flat for n >= 2
    basis = np.array([[1.0], [0.0], [0.0]], dtype=complex)
    assert flatten_eigenspace(basis, 3, seed=0, max_iters=50) is None


def test_certificate_gram_uses_spectrum():
    f = fourier_hadamard(2)
    from maskkit import HadamardCertificate

    cert = HadamardCertificate(f, np.array([1.5, 0.5]), 0.0)
    g = cert.gram()
    assert abs(g[0, 0] - 1.0) < 1e-15
    assert abs(g[0, 1] - 0.5) < 1e-15
