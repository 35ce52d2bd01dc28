"""Hadamard unitaries: constructors, recognition, and a dephased normal form.

A Hadamard unitary of order n is a unitary matrix all of whose entries have
modulus 1/sqrt(n). These are exactly the unitaries that map the standard
basis to a basis that is mutually unbiased with it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL

__all__ = [
    "HadamardUnitary",
    "HadamardCheck",
    "fourier_hadamard",
    "sylvester_hadamard",
    "qubit_family",
    "is_hadamard_unitary",
    "dephase",
]


@dataclass(frozen=True)
class HadamardCheck:
    """Diagnostics from a Hadamard-unitary test; truthy iff the test passed."""

    ok: bool
    modulus_deviation: float
    unitarity_deviation: float

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class HadamardUnitary:
    """A validated Hadamard unitary.

    Attributes:
        matrix: (n, n) complex array, unitary with all entries of modulus
            1/sqrt(n).
    """

    matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def theta(self) -> np.ndarray:
        """Entry phases in (-pi, pi]: matrix = exp(i*theta)/sqrt(n)."""
        return np.angle(self.matrix)

    @classmethod
    def from_matrix(cls, m, tol: float = DEFAULT_TOL) -> "HadamardUnitary":
        check = is_hadamard_unitary(m, tol)
        if not check:
            raise ValueError(
                "not a Hadamard unitary: "
                f"modulus deviation {check.modulus_deviation:.3e}, "
                f"unitarity deviation {check.unitarity_deviation:.3e}"
            )
        return cls(np.array(m, dtype=complex))

    def dagger(self) -> "HadamardUnitary":
        """Conjugate transpose; the Hadamard class is closed under it."""
        return HadamardUnitary(self.matrix.conj().T.copy())


def is_hadamard_unitary(m, tol: float = DEFAULT_TOL) -> HadamardCheck:
    """Test whether a matrix is a Hadamard unitary.

    Args:
        m: square matrix.
        tol: allowed deviation, applied to both the entry moduli
            (against 1/sqrt(n)) and the unitarity defect (max entry of
            ``|M^dag M - I|``).
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a nonempty square matrix, got shape {a.shape}")
    n = a.shape[0]
    mod_dev = float(np.max(np.abs(np.abs(a) - 1.0 / np.sqrt(n))))
    uni_dev = float(np.max(np.abs(a.conj().T @ a - np.eye(n))))
    return HadamardCheck(mod_dev <= tol and uni_dev <= tol, mod_dev, uni_dev)


def fourier_hadamard(n: int) -> HadamardUnitary:
    """The order-n Fourier matrix (1/sqrt(n)) * exp(2*pi*i*j*k/n)."""
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return HadamardUnitary(np.exp(2j * np.pi * j * k / n) / np.sqrt(n))


def sylvester_hadamard(k: int) -> HadamardUnitary:
    """Real Hadamard of order 2**k: k-fold tensor power of the 2x2 one."""
    if k < 0:
        raise ValueError(f"tensor power must be >= 0, got {k}")
    h2 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    out = np.array([[1.0]])
    for _ in range(k):
        out = np.kron(out, h2)
    return HadamardUnitary(out.astype(complex))


def qubit_family(theta: float, omega1: float, omega2: float) -> HadamardUnitary:
    """The 2x2 Hadamard family whose columns diagonalize a qubit-pair Gram.

    For a Gram matrix [[1, r*e^{-i*theta}], [r*e^{i*theta}, 1]] the columns
    of the returned matrix are its eigenvectors (eigenvalues 1+r then 1-r)
    for every choice of the free column phases omega1, omega2.
    """
    u = np.array(
        [
            [np.exp(1j * omega1), np.exp(1j * omega2)],
            [np.exp(1j * (omega1 + theta)), -np.exp(1j * (omega2 + theta))],
        ]
    ) / np.sqrt(2)
    return HadamardUnitary(u)


def dephase(u: HadamardUnitary | np.ndarray, tol: float = DEFAULT_TOL) -> HadamardUnitary:
    """Normal form under diagonal phase equivalence D1 @ U @ D2.

    Makes entry (0, 0) real positive, then the rest of the first column via
    row phases, then the first row via column phases. Idempotent, and equal
    Hadamards-up-to-diagonal-phases dephase to the same matrix.
    """
    h = u if isinstance(u, HadamardUnitary) else HadamardUnitary.from_matrix(u, tol)
    m = h.matrix
    row = np.exp(-1j * np.angle(m[:, 0]))
    col = np.exp(1j * (np.angle(m[0, 0]) - np.angle(m[0, :])))
    return HadamardUnitary(row[:, None] * m * col[None, :])
