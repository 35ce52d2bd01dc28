"""Gram matrices of state sets and Hadamard-diagonalizability certificates.

A set of unit states {a_k} is a *Hadamard set* when its Gram matrix
G_kl = <a_k|a_l> is diagonalized by a Hadamard unitary: G = U D U^dag with U
Hadamard and the columns of U eigenvectors of G. Certification is
constructive: it either exhibits U (a ``HadamardCertificate``) or returns a
typed refusal (``NotCertified``). For a simple eigenvalue the eigenvector is
unique up to phase, so a non-flat eigenvector is an exact disproof; for a
degenerate eigenspace a flat basis is searched by alternating projection,
and failure to converge is only ever reported as inconclusive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .hadamard import HadamardUnitary, fourier_hadamard, is_hadamard_unitary
from .linalg import (
    DEFAULT_TOL,
    GROUPING_TOL,
    _rng,
    canonicalize_columns,
    group_eigenspaces,
    hermitian_eig,
    random_isometry,
    random_unitary,
)

log = logging.getLogger(__name__)

FLATNESS_TOL = 1e-7
MAX_ITERS = 500
RESTARTS = 20

REASON_NON_FLAT = "non-flat eigenvector"
REASON_NO_CONVERGENCE = "flattening search did not converge"

__all__ = [
    "FLATNESS_TOL",
    "MAX_ITERS",
    "RESTARTS",
    "REASON_NON_FLAT",
    "REASON_NO_CONVERGENCE",
    "StateSet",
    "HadamardCertificate",
    "NotCertified",
    "gram_matrix",
    "certify_hadamard_set",
    "flatten_eigenspace",
    "random_states_with_gram",
]


@dataclass(frozen=True)
class StateSet:
    """An ordered set of unit vectors in C^dim.

    Attributes:
        dim: ambient dimension.
        vectors: (n, dim) array, one state per row.
    """

    dim: int
    vectors: np.ndarray

    @classmethod
    def from_vectors(cls, vectors, tol: float = DEFAULT_TOL) -> "StateSet":
        v = np.asarray(vectors, dtype=complex)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"expected a nonempty (n, dim) array, got shape {v.shape}")
        norms = np.linalg.norm(v, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > tol:
            raise ValueError(f"states must be unit vectors: worst norm error {worst:.3e}")
        return cls(int(v.shape[1]), v.copy())

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def matrix(self) -> np.ndarray:
        """States as columns, shape (dim, n)."""
        return self.vectors.T.copy()

    def gram(self) -> np.ndarray:
        return gram_matrix(self)

    def combine(self, mu) -> np.ndarray:
        """Linear combination sum_k mu_k a_k as a vector in C^dim."""
        c = np.asarray(mu, dtype=complex)
        if c.shape != (self.n,):
            raise ValueError(f"expected {self.n} coefficients, got shape {c.shape}")
        return c @ self.vectors


def gram_matrix(states: StateSet | np.ndarray) -> np.ndarray:
    """Gram matrix G_kl = <a_k|a_l> (conjugate-linear in the first slot)."""
    v = states.vectors if isinstance(states, StateSet) else np.asarray(states, dtype=complex)
    return v.conj() @ v.T


@dataclass(frozen=True)
class HadamardCertificate:
    """Constructive witness that a Gram matrix is Hadamard-diagonalizable.

    G = U D U^dag with U = ``unitary.matrix`` (columns are eigenvectors) and
    D = diag(``spectrum``), eigenvalues descending and clamped at zero.
    """

    unitary: HadamardUnitary
    spectrum: np.ndarray
    residual: float

    @property
    def n(self) -> int:
        return self.unitary.n

    def gram(self) -> np.ndarray:
        u = self.unitary.matrix
        return (u * self.spectrum[None, :]) @ u.conj().T


@dataclass(frozen=True)
class NotCertified:
    """Typed refusal from certification.

    ``inconclusive`` is False only for exact disproofs (a simple eigenvalue
    whose unique eigenvector is not flat); a flattening-search timeout is
    inconclusive and never claims the set is not a Hadamard set.
    """

    reason: str
    inconclusive: bool
    diagnostics: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return False


def flatten_eigenspace(
    basis,
    n: int,
    tol: float = FLATNESS_TOL,
    max_iters: int = MAX_ITERS,
    seed=0,
    init: np.ndarray | None = None,
) -> np.ndarray | None:
    """Search for a rotation making an eigenspace basis entrywise flat.

    Alternates between the rotation manifold {B @ R : R unitary} and the
    torus of matrices with all entry moduli 1/sqrt(n): project the current
    iterate onto the torus entrywise (keeping phases), then map back through
    the polar factor of B^dag @ (projection). Starts from ``init`` when
    given, else from a seeded random unitary.

    Args:
        basis: (n, m) orthonormal columns spanning the eigenspace.
        n: ambient order (sets the target modulus 1/sqrt(n)).
        tol: flatness target on max | |entry| - 1/sqrt(n) |.
        max_iters: iteration cap for this single start.
        seed: RNG seed (or Generator) for the random start.
        init: optional (m, m) unitary starting rotation.

    Returns:
        The (m, m) unitary R with ``basis @ R`` flat within ``tol``, or
        ``None`` if the iteration cap is reached. A ``None`` is not a
        disproof: the search is a heuristic. Accepted solutions are polished
        well past ``tol`` (toward machine precision) so that downstream
        constructions can rely on the flat moduli, not just the phases.
    """
    b = np.asarray(basis, dtype=complex)
    if b.ndim != 2 or b.shape[0] != n or b.shape[1] < 1 or b.shape[1] > n:
        raise ValueError(f"expected an (n, m) basis with 1 <= m <= n = {n}, got {b.shape}")
    m = b.shape[1]
    target = 1.0 / np.sqrt(n)
    polish = 1e-14
    r = np.asarray(init, dtype=complex) if init is not None else random_unitary(m, seed)
    best_r, best_dev = r, np.inf
    for it in range(max_iters):
        x = b @ r
        mags = np.abs(x)
        dev = float(np.max(np.abs(mags - target)))
        if dev < best_dev:
            best_dev, best_r = dev, r
        if dev <= polish:
            break
        phases = np.where(mags > 0, x / np.where(mags > 0, mags, 1.0), 1.0)
        y = target * phases
        u, _, vh = np.linalg.svd(b.conj().T @ y)
        r = u @ vh
    if best_dev <= tol:
        log.debug("flatten converged to %.3e after %d iterations", best_dev, it)
        return best_r
    return None


def _fourier_alignment(basis: np.ndarray, n: int) -> np.ndarray:
    """Initial rotation aligning a basis to the nearest Fourier columns."""
    m = basis.shape[1]
    f = fourier_hadamard(n).matrix
    scores = np.linalg.norm(basis.conj().T @ f, axis=0)
    pick = np.sort(np.argsort(-scores, kind="stable")[:m])
    u, _, vh = np.linalg.svd(basis.conj().T @ f[:, pick])
    return u @ vh


def certify_hadamard_set(
    states: StateSet,
    tol: float = DEFAULT_TOL,
    grouping_tol: float = GROUPING_TOL,
    flat_tol: float = FLATNESS_TOL,
    max_iters: int = MAX_ITERS,
    restarts: int = RESTARTS,
    seed: int = 0,
) -> HadamardCertificate | NotCertified:
    """Certify that a state set's Gram matrix is Hadamard-diagonalizable.

    Eigenvalues within ``grouping_tol`` of their neighbor are treated as one
    eigenspace. Simple eigenvectors must already be flat within ``flat_tol``
    (they are unique up to phase, so this refusal is exact). Degenerate
    eigenspaces go through ``flatten_eigenspace`` with ``restarts`` seeded
    starts; the first start tries a deterministic Fourier alignment.

    Returns:
        A ``HadamardCertificate``, or a ``NotCertified`` whose ``reason`` is
        either ``REASON_NON_FLAT`` (exact) or ``REASON_NO_CONVERGENCE``
        (inconclusive).
    """
    g = gram_matrix(states)
    values, vectors = hermitian_eig(g, tol)
    if values.size and values[-1] < -tol:
        raise ValueError(f"Gram matrix is not positive semidefinite: min eigenvalue {values[-1]:.3e}")
    values = np.clip(values, 0.0, None)
    n = states.n
    target = 1.0 / np.sqrt(n)
    columns = []
    for group in group_eigenspaces(values, vectors, grouping_tol):
        if group.multiplicity == 1:
            col = group.basis[:, 0]
            spread = float(np.max(np.abs(np.abs(col) - target)))
            if spread > flat_tol:
                log.info(
                    "refusing: simple eigenvalue %.6g has non-flat eigenvector (spread %.3e)",
                    group.value,
                    spread,
                )
                return NotCertified(
                    REASON_NON_FLAT,
                    inconclusive=False,
                    diagnostics={
                        "eigenvalue": group.value,
                        "multiplicity": 1,
                        "modulus_spread": spread,
                        "flat_tol": flat_tol,
                    },
                )
            columns.append(col[:, None])
            continue
        rotation = None
        for attempt in range(max(1, restarts)):
            init = _fourier_alignment(group.basis, n) if attempt == 0 else None
            rotation = flatten_eigenspace(
                group.basis, n, tol=flat_tol, max_iters=max_iters,
                seed=seed + attempt, init=init,
            )
            if rotation is not None:
                log.debug(
                    "eigenvalue %.6g (multiplicity %d) flattened on restart %d",
                    group.value, group.multiplicity, attempt,
                )
                break
        if rotation is None:
            return NotCertified(
                REASON_NO_CONVERGENCE,
                inconclusive=True,
                diagnostics={
                    "eigenvalue": group.value,
                    "multiplicity": group.multiplicity,
                    "restarts": restarts,
                    "max_iters": max_iters,
                },
            )
        columns.append(canonicalize_columns(group.basis @ rotation))
    u = np.hstack(columns)
    residual = max(
        float(np.linalg.norm(g - (u * values[None, :]) @ u.conj().T)),
        float(np.max(np.abs(u.conj().T @ u - np.eye(n)))),
        float(np.max(np.abs(np.abs(u) - target))),
    )
    unitary = HadamardUnitary.from_matrix(u, tol=max(10.0 * flat_tol, tol))
    return HadamardCertificate(unitary, values, residual)


def random_states_with_gram(gram, dim: int, seed=0, tol: float = DEFAULT_TOL) -> StateSet:
    """Realize a target Gram matrix as explicit states in C^dim.

    The canonical factor D^{1/2} E^dag (E, D from the eigendecomposition of
    the Gram matrix, restricted to its positive part) is embedded through a
    seeded random isometry, so the output's span is a random rank(G)-dim
    subspace but its Gram matrix is exact.
    """
    g = np.asarray(gram, dtype=complex)
    values, vectors = hermitian_eig(g, tol)
    if np.max(np.abs(np.diagonal(g) - 1.0)) > tol:
        raise ValueError("Gram matrix must have unit diagonal")
    if values.size and values[-1] < -tol:
        raise ValueError(f"Gram matrix is not positive semidefinite: min eigenvalue {values[-1]:.3e}")
    values = np.clip(values, 0.0, None)
    rank = int(np.sum(values > tol))
    if dim < rank:
        raise ValueError(f"dimension {dim} is below the Gram rank {rank}")
    factor = np.sqrt(values[:rank])[:, None] * vectors[:, :rank].conj().T  # (rank, n)
    embed = random_isometry(dim, rank, _rng(seed))
    return StateSet.from_vectors((embed @ factor).T, tol=max(tol, 1e-9))
