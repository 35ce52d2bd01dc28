"""Dense complex linear algebra for small bipartite systems.

Conventions used throughout the package:

* Vectors and matrices are plain ``numpy.ndarray`` with dtype complex128.
* Inner products are conjugate-linear in the *first* argument,
  ``<a|b> = a^dag b`` (``numpy.vdot`` order).
* A bipartite pure state on C^dA (x) C^dB is a single vector of length
  dA*dB with the composite index ``i*dB + j`` (``numpy.kron`` order).
* Eigen- and singular values are returned in descending order, and every
  returned eigenvector/Schmidt-vector column is phase-canonicalized: its
  largest-modulus entry (first such entry on ties) is made real positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9
GROUPING_TOL = 1e-8
SCHMIDT_CUTOFF = 1e-12

__all__ = [
    "DEFAULT_TOL",
    "GROUPING_TOL",
    "SCHMIDT_CUTOFF",
    "EigenGroup",
    "tensor_product",
    "partial_trace",
    "hermitian_eig",
    "group_eigenspaces",
    "schmidt_decompose",
    "complete_isometry",
    "canonicalize_columns",
    "random_unitary",
    "random_isometry",
    "random_state",
]


def _as_vector(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=complex)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D state vector, got shape {v.shape}")
    return v


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def tensor_product(u, v) -> np.ndarray:
    """Kronecker product of two vectors or two matrices."""
    return np.kron(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))


def partial_trace(psi, dim_a: int, dim_b: int, side: str = "A") -> np.ndarray:
    """Reduced density matrix of one subsystem of a bipartite pure state.

    Args:
        psi: state vector of length ``dim_a * dim_b``.
        dim_a: dimension of the A factor.
        dim_b: dimension of the B factor.
        side: ``"A"`` returns rho_A (B traced out), ``"B"`` returns rho_B.

    Returns:
        The reduced density matrix, shape (dim_a, dim_a) or (dim_b, dim_b).
    """
    v = _as_vector(psi)
    if dim_a < 1 or dim_b < 1 or v.size != dim_a * dim_b:
        raise ValueError(
            f"state of length {v.size} does not factor as {dim_a} x {dim_b}"
        )
    m = v.reshape(dim_a, dim_b)
    if side == "A":
        return m @ m.conj().T
    if side == "B":
        return m.T @ m.conj()
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def canonicalize_columns(columns: np.ndarray) -> np.ndarray:
    """Rephase each column so its largest-modulus entry is real positive.

    Ties pick the first such entry, which makes the output deterministic.
    Zero columns are returned unchanged.
    """
    cols = np.array(columns, dtype=complex)
    if cols.ndim == 1:
        cols = cols[:, None]
    lead = cols[np.argmax(np.abs(cols), axis=0), np.arange(cols.shape[1])]
    mags = np.abs(lead)
    phases = np.where(mags > 0, lead / np.where(mags > 0, mags, 1.0), 1.0)
    out = cols * phases.conj()[None, :]
    return out if np.asarray(columns).ndim > 1 else out[:, 0]


def hermitian_eig(h, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, descending and phase-fixed.

    Args:
        h: Hermitian matrix (validated entrywise within ``tol``).
        tol: largest allowed entry of ``|h - h^dag|``.

    Returns:
        ``(values, vectors)`` with values descending and vectors the matching
        unitary column matrix, each column phase-canonicalized.
    """
    a = _as_square(h)
    herm_dev = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if herm_dev > tol:
        raise ValueError(f"matrix is not Hermitian: max |H - H^dag| = {herm_dev:.3e}")
    values, vectors = np.linalg.eigh(a)
    order = np.argsort(-values, kind="stable")
    return values[order], canonicalize_columns(vectors[:, order])


@dataclass(frozen=True)
class EigenGroup:
    """A (possibly degenerate) eigenspace: representative value and basis."""

    value: float
    basis: np.ndarray  # (n, multiplicity), orthonormal columns

    @property
    def multiplicity(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


def group_eigenspaces(
    values, vectors, grouping_tol: float = GROUPING_TOL
) -> list[EigenGroup]:
    """Partition a descending spectrum into eigenspace groups.

    Consecutive eigenvalues closer than ``grouping_tol`` are merged into one
    group (chained, so a cluster wider than the tolerance still groups as
    long as neighbors are close).
    """
    w = np.asarray(values, dtype=float)
    e = np.asarray(vectors, dtype=complex)
    if e.shape[1] != w.size:
        raise ValueError("eigenvalue/eigenvector count mismatch")
    groups: list[EigenGroup] = []
    start = 0
    for i in range(1, w.size + 1):
        if i == w.size or abs(w[i] - w[i - 1]) > grouping_tol:
            block = e[:, start:i]
            groups.append(EigenGroup(float(np.mean(w[start:i])), block))
            start = i
    return groups


def schmidt_decompose(
    psi, dim_a: int, dim_b: int, cutoff: float = SCHMIDT_CUTOFF
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Schmidt decomposition of a bipartite pure state.

    Returns ``(weights, left, right)`` with descending positive weights
    (values at or below ``cutoff`` dropped) and orthonormal columns such that
    ``psi = sum_j weights[j] * kron(left[:, j], right[:, j])``.
    """
    v = _as_vector(psi)
    if v.size != dim_a * dim_b:
        raise ValueError(
            f"state of length {v.size} does not factor as {dim_a} x {dim_b}"
        )
    u, s, vh = np.linalg.svd(v.reshape(dim_a, dim_b), full_matrices=False)
    keep = s > cutoff
    u, s, vh = u[:, keep], s[keep], vh[keep, :]
    # fix the left-vector phases; compensate on the right so the sum is exact
    idx = np.argmax(np.abs(u), axis=0)
    lead = u[idx, np.arange(u.shape[1])]
    mags = np.abs(lead)
    phases = np.where(mags > 0, lead / np.where(mags > 0, mags, 1.0), 1.0)
    u = u * phases.conj()[None, :]
    vh = vh * phases[:, None]
    return s, u, vh.T


def complete_isometry(v1, target_dim: int | None = None, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Extend an isometry to a square unitary, keeping its columns verbatim.

    The added columns come from orthonormalizing the standard basis against
    the existing columns in index order (with re-orthogonalization), skipping
    basis vectors that are nearly dependent. This is deterministic and keeps
    the first ``v1.shape[1]`` columns of the result exactly equal to ``v1``.

    Args:
        v1: (rows, cols) matrix with orthonormal columns, cols <= rows.
        target_dim: output size; defaults to ``rows`` and must equal it.
        tol: isometry validation tolerance on ``|V1^dag V1 - I|``.
    """
    m = np.asarray(v1, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D isometry, got shape {m.shape}")
    rows, cols = m.shape
    if target_dim is None:
        target_dim = rows
    if target_dim != rows:
        raise ValueError(f"target_dim {target_dim} != row count {rows}")
    if cols > rows:
        raise ValueError(f"isometry cannot have more columns ({cols}) than rows ({rows})")
    dev = float(np.max(np.abs(m.conj().T @ m - np.eye(cols)))) if cols else 0.0
    if dev > tol:
        raise ValueError(f"columns are not orthonormal: max deviation {dev:.3e}")
    if cols == rows:
        return m.copy()
    basis = [m[:, j] for j in range(cols)]
    accept = min(1e-6, 0.5 / np.sqrt(rows))
    for i in range(rows):
        if len(basis) == rows:
            break
        e = np.zeros(rows, dtype=complex)
        e[i] = 1.0
        for _ in range(2):  # double projection for numerical hygiene
            for b in basis:
                e = e - b * np.vdot(b, e)
        norm = np.linalg.norm(e)
        if norm > accept:
            basis.append(e / norm)
    if len(basis) != rows:  # impossible for accept <= 1/sqrt(rows); guards bad input
        raise ValueError("failed to complete isometry from the standard basis")
    out = np.column_stack(basis)
    out[:, :cols] = m
    return out


def random_unitary(n: int, seed=0) -> np.ndarray:
    """Haar-distributed n x n unitary from a seed or Generator."""
    rng = _rng(seed)
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))[None, :]


def random_isometry(rows: int, cols: int, seed=0) -> np.ndarray:
    """Random (rows, cols) matrix with orthonormal columns."""
    if cols > rows:
        raise ValueError(f"isometry cannot have more columns ({cols}) than rows ({rows})")
    return random_unitary(rows, seed)[:, :cols]


def random_state(dim: int, seed=0) -> np.ndarray:
    """Haar-random unit vector in C^dim."""
    rng = _rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)
