"""Shared oracles and instance generators for the test suite.

The oracles here are written independently of the library (explicit index
loops, no shared helpers) so they can arbitrate its answers.
"""

from dataclasses import dataclass

import numpy as np

from maskkit import StateSet, random_isometry, random_states_with_gram, random_unitary


def brute_partial_trace(psi, d_a: int, d_b: int, side: str = "A") -> np.ndarray:
    """Partial trace of |psi><psi| by explicit summation.

    Index convention: component (i, b) of the product space lives at
    position i * d_b + b.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    assert psi.size == d_a * d_b
    if side == "A":
        rho = np.zeros((d_a, d_a), dtype=complex)
        for i in range(d_a):
            for j in range(d_a):
                for b in range(d_b):
                    rho[i, j] += psi[i * d_b + b] * np.conj(psi[j * d_b + b])
    else:
        rho = np.zeros((d_b, d_b), dtype=complex)
        for b1 in range(d_b):
            for b2 in range(d_b):
                for a in range(d_a):
                    rho[b1, b2] += psi[a * d_b + b1] * np.conj(psi[a * d_b + b2])
    return rho


def random_hadamard(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random member of the Fourier matrix's equivalence class.

    Left/right diagonal phases and a column permutation preserve both
    unitarity and the flat 1/sqrt(n) entry modulus.
    """
    f = np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n) / np.sqrt(n)
    left = np.exp(2j * np.pi * rng.random(n))
    right = np.exp(2j * np.pi * rng.random(n))
    perm = rng.permutation(n)
    return (left[:, None] * f * right[None, :])[:, perm]


def random_spectrum(n: int, rng: np.random.Generator) -> np.ndarray:
    """Positive eigenvalues drawn from uniform(0.2, 1.8), rescaled to sum n."""
    values = rng.uniform(0.2, 1.8, size=n)
    return values * (n / values.sum())


def hadamard_gram(u: np.ndarray, spectrum: np.ndarray) -> np.ndarray:
    g = (u * np.asarray(spectrum)[None, :]) @ u.conj().T
    return (g + g.conj().T) / 2.0


def maskable_instance(rng: np.random.Generator, n: int, dim: int,
                      spectrum: np.ndarray | None = None):
    """States whose Gram is diagonalized by a random flat unitary.

    Returns (states, gram, u, spectrum).
    """
    u = random_hadamard(n, rng)
    if spectrum is None:
        spectrum = random_spectrum(n, rng)
    g = hadamard_gram(u, spectrum)
    states = random_states_with_gram(g, dim, seed=rng)
    return states, g, u, spectrum


def refusal_gram(n: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-diagonal Gram with a simple spectrum and sparse eigenvectors.

    Built from 2x2 blocks on index pairs (2i, 2i+1): eigenvalues 1 +/- d_i
    with eigenvectors supported on two coordinates only, so for n >= 3 no
    eigenvector can have flat moduli and certification must refuse exactly.
    """
    assert n >= 3
    g = np.eye(n, dtype=complex)
    deltas = np.linspace(0.25, 0.75, n // 2) + rng.uniform(-0.05, 0.05, n // 2)
    for i, delta in enumerate(deltas):
        p, q = 2 * i, 2 * i + 1
        phase = np.exp(2j * np.pi * rng.random())
        g[p, q] = delta * np.conj(phase)
        g[q, p] = delta * phase
    return g


@dataclass
class GeneralFamily:
    """Bipartite family sum_j w_j phi_j x psi_j^(k) with grouped weights.

    Weights are constant inside each group and the B-side frames of a group
    mix only among themselves, so every member has the same pair of
    marginals. ``torus`` maps any unimodular z to a coefficient vector that
    keeps the combination inside the family.
    """

    weights: np.ndarray          # (r,)
    phi: np.ndarray              # (d_a, r)
    psis: np.ndarray             # (n, d_b, r)
    mixer: np.ndarray            # (n, n) flat unitary behind the plant

    @property
    def n(self) -> int:
        return self.psis.shape[0]

    @property
    def r(self) -> int:
        return self.weights.size

    @property
    def dims(self) -> tuple[int, int]:
        return self.phi.shape[0], self.psis.shape[1]

    def member(self, k: int) -> np.ndarray:
        d_a, d_b = self.dims
        out = np.zeros(d_a * d_b, dtype=complex)
        for j in range(self.r):
            out += self.weights[j] * np.kron(self.phi[:, j], self.psis[k][:, j])
        return out

    def combination(self, mu) -> np.ndarray:
        mu = np.asarray(mu, dtype=complex)
        out = np.zeros(self.dims[0] * self.dims[1], dtype=complex)
        for k in range(self.n):
            out += mu[k] * self.member(k)
        return out

    def rho_a(self) -> np.ndarray:
        w2 = self.weights ** 2
        return (self.phi * w2[None, :]) @ self.phi.conj().T

    def rho_b(self) -> np.ndarray:
        w2 = self.weights ** 2
        psi0 = self.psis[0]
        return (psi0 * w2[None, :]) @ psi0.conj().T

    def torus(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return self.mixer @ z / np.sqrt(self.n)

    def marginal_deviation(self, mu) -> float:
        """Oracle: worst marginal mismatch of the combination, by brute force."""
        d_a, d_b = self.dims
        combined = self.combination(mu)
        dev_a = np.max(np.abs(brute_partial_trace(combined, d_a, d_b, "A") - self.rho_a()))
        dev_b = np.max(np.abs(brute_partial_trace(combined, d_a, d_b, "B") - self.rho_b()))
        return float(max(dev_a, dev_b))


def general_family(rng: np.random.Generator, n: int | None = None) -> GeneralFamily:
    """Random grouped family with a planted torus of valid combinations.

    Group l of the B-side frames evolves with k as P diag(e^{i theta_k}) Q
    where the theta rows are phase rows of one flat unitary, so coefficient
    vectors drawn from that unitary's torus keep every combined frame
    orthonormal.
    """
    if n is None:
        n = int(rng.integers(2, 6))
    r = int(rng.integers(1, n + 1))
    # split r into group multiplicities
    mults = []
    left = r
    while left > 0:
        take = int(rng.integers(1, left + 1))
        mults.append(take)
        left -= take
    m = len(mults)
    lam = rng.uniform(0.3, 1.7, size=m)
    lam *= n / np.dot(mults, lam)
    weights = np.sqrt(np.repeat(lam, mults) / n)

    d_a = r + int(rng.integers(0, 3))
    d_b = r + int(rng.integers(0, 3))
    phi = random_isometry(d_a, r, seed=rng)
    frame = random_isometry(d_b, r, seed=rng)

    mixer = random_hadamard(n, rng)
    theta = np.angle(mixer.conj().T)  # row j, column k

    psis = np.zeros((n, d_b, r), dtype=complex)
    start = 0
    for size in mults:
        block = frame[:, start:start + size]
        p = random_unitary(size, seed=rng)
        q = random_unitary(size, seed=rng)
        rows = theta[start:start + size, :]
        for k in range(n):
            psis[k][:, start:start + size] = block @ (p * np.exp(1j * rows[:, k])[None, :]) @ q
        start += size
    return GeneralFamily(weights=weights, phi=phi, psis=psis, mixer=mixer)


def pair_states(rng: np.random.Generator) -> StateSet:
    """Two linearly independent random qubit states."""
    while True:
        vecs = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        vecs /= np.linalg.norm(vecs, axis=1)[:, None]
        if abs(np.linalg.det(vecs.T)) > 1e-2:
            return StateSet.from_vectors(vecs)
