"""Masker construction and verification for Hadamard state sets.

Given a certificate G = U D U^dag (U Hadamard, columns eigenvectors), the
states

    Psi_k = (1/sqrt(n)) * sum_j lambda_j e^{i Theta_jk} phi_j (x) psi_j,

with lambda_j = sqrt(D_jj), e^{i Theta_jk}/sqrt(n) = (U^dag)_jk and
orthonormal {phi_j}, {psi_j}, reproduce the Gram matrix of the input set
exactly while all sharing the same reduced density matrices

    rho_A = (1/n) sum_j lambda_j^2 |phi_j><phi_j|,
    rho_B = (1/n) sum_j lambda_j^2 |psi_j><psi_j|.

Because {a_k (x) anchor} and {Psi_k} then have equal Gram matrices, a
unitary mapping one family onto the other exists; applied to a_k (x) anchor
it hides k from both subsystems. A linear combination a(mu) = sum_k mu_k a_k
is masked by the *same* unitary iff |sum_k mu_k e^{i Theta_jk}| = 1 for
every positive-weight row j, i.e. |(U^dag mu)_j| = 1/sqrt(n).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .gram import HadamardCertificate, StateSet, gram_matrix
from .hadamard import qubit_family
from .linalg import DEFAULT_TOL, _rng, complete_isometry, partial_trace, tensor_product

log = logging.getLogger(__name__)

ISOMETRY_TOL = 1e-8

__all__ = [
    "FixedReducingSet",
    "Masker",
    "MaskingReport",
    "CombinationCheck",
    "Infeasible",
    "QubitTripleSolution",
    "fixed_reducing_states",
    "build_masker",
    "verify_masking",
    "combine",
    "combination_condition",
    "maskable_with",
    "torus_residuals",
    "sample_maskable",
    "solve_qubit_phases",
]


@dataclass(frozen=True)
class FixedReducingSet:
    """Bipartite states with identical marginals and a prescribed Gram matrix.

    Attributes:
        weights: (r,) positive Schmidt weights lambda_j / sqrt(n), descending;
            zero-weight terms are dropped so r = rank of the certified Gram.
        phi_a: (d_a, r) orthonormal columns (A-side Schmidt vectors).
        psi_b: (d_b, r) orthonormal columns (B-side Schmidt vectors).
        theta: (r, n) phase matrix; state k carries e^{i theta[j, k]} on
            Schmidt term j.
        n: number of states.
        r: number of retained Schmidt terms.
    """

    weights: np.ndarray
    phi_a: np.ndarray
    psi_b: np.ndarray
    theta: np.ndarray
    n: int
    r: int

    @property
    def dim_a(self) -> int:
        return self.phi_a.shape[0]

    @property
    def dim_b(self) -> int:
        return self.psi_b.shape[0]

    def _term_products(self) -> np.ndarray:
        # row j = phi_j (x) psi_j, shape (r, d_a*d_b)
        return np.einsum("aj,bj->jab", self.phi_a, self.psi_b).reshape(self.r, -1)

    def state(self, k: int) -> np.ndarray:
        """The k-th bipartite state Psi_k as a vector of length d_a*d_b."""
        coeff = self.weights * np.exp(1j * self.theta[:, k])
        return coeff @ self._term_products()

    def states(self) -> np.ndarray:
        """All states, shape (n, d_a*d_b)."""
        coeff = self.weights[:, None] * np.exp(1j * self.theta)  # (r, n)
        return coeff.T @ self._term_products()

    def combine(self, mu) -> np.ndarray:
        """Psi(mu) = sum_k mu_k Psi_k."""
        c = np.asarray(mu, dtype=complex)
        if c.shape != (self.n,):
            raise ValueError(f"expected {self.n} coefficients, got shape {c.shape}")
        return c @ self.states()

    def psi_vectors(self, k: int) -> np.ndarray:
        """B-side vectors psi_j^(k) = e^{i theta[j, k]} psi_j, shape (d_b, r)."""
        return self.psi_b * np.exp(1j * self.theta[:, k])[None, :]

    def rho_a(self) -> np.ndarray:
        return (self.phi_a * (self.weights**2)[None, :]) @ self.phi_a.conj().T

    def rho_b(self) -> np.ndarray:
        return (self.psi_b * (self.weights**2)[None, :]) @ self.psi_b.conj().T


@dataclass(frozen=True)
class Masker:
    """A unitary on C^{d_a} (x) C^{d_b} together with the fixed B-side anchor."""

    matrix: np.ndarray
    dim_a: int
    dim_b: int
    anchor: np.ndarray

    def apply(self, state) -> np.ndarray:
        """Image of ``state (x) anchor`` under the masker."""
        v = np.asarray(state, dtype=complex)
        if v.shape != (self.dim_a,):
            raise ValueError(f"expected an A-side vector of length {self.dim_a}")
        return self.matrix @ tensor_product(v, self.anchor)

    def unitarity_defect(self) -> float:
        d = self.matrix.shape[0]
        return float(np.linalg.norm(self.matrix.conj().T @ self.matrix - np.eye(d)))


@dataclass(frozen=True)
class MaskingReport:
    """Outcome of checking that masked states share their marginals."""

    rho_a: np.ndarray
    rho_b: np.ndarray
    per_state_deviations: np.ndarray
    max_deviation: float
    passed: bool
    tol: float


@dataclass(frozen=True)
class CombinationCheck:
    """Orthonormality diagnostics for combined B-side Schmidt frames."""

    ok: bool
    gram: np.ndarray
    max_deviation: float

    def __bool__(self) -> bool:
        return self.ok


def _positive_part(cert: HadamardCertificate, tol: float) -> np.ndarray:
    return cert.spectrum > tol


def fixed_reducing_states(
    cert: HadamardCertificate,
    states: StateSet,
    bases_a: np.ndarray | None = None,
    bases_b: np.ndarray | None = None,
    dim_b: int | None = None,
    tol: float = DEFAULT_TOL,
) -> FixedReducingSet:
    """Construct the fixed-reducing states for a certified set.

    Args:
        cert: Hadamard certificate of ``states``.
        states: the certified set (supplies n and d_a).
        bases_a: optional (d_a, >= r) orthonormal columns for the A-side
            Schmidt vectors; defaults to the standard basis.
        bases_b: optional (d_b, >= r) orthonormal columns for the B side.
        dim_b: B-side dimension when ``bases_b`` is omitted; defaults to d_a.
        tol: spectrum cutoff (weights with lambda^2 <= tol are dropped) and
            orthonormality validation tolerance.
    """
    n, d_a = states.n, states.dim
    if cert.n != n:
        raise ValueError(f"certificate order {cert.n} != state count {n}")
    if n > d_a:
        raise ValueError(f"need n <= d_a for the construction, got n={n}, d_a={d_a}")
    positive = _positive_part(cert, tol)
    r = int(np.sum(positive))
    if bases_a is None:
        bases_a = np.eye(d_a, dtype=complex)
    bases_a = np.asarray(bases_a, dtype=complex)
    if bases_b is None:
        bases_b = np.eye(dim_b if dim_b is not None else d_a, dtype=complex)
    bases_b = np.asarray(bases_b, dtype=complex)
    for name, b in (("bases_a", bases_a), ("bases_b", bases_b)):
        if b.ndim != 2 or b.shape[1] < r:
            raise ValueError(f"{name} must provide at least r = {r} columns")
        dev = float(np.max(np.abs(b.conj().T @ b - np.eye(b.shape[1]))))
        if dev > tol:
            raise ValueError(f"{name} columns are not orthonormal (deviation {dev:.3e})")
    if bases_b.shape[0] < r:
        raise ValueError(f"need r <= d_b, got r={r}, d_b={bases_b.shape[0]}")
    weights = np.sqrt(cert.spectrum[positive] / n)
    theta = np.angle(cert.unitary.matrix.conj().T[positive, :])
    return FixedReducingSet(
        weights=weights,
        phi_a=bases_a[:, :r].copy(),
        psi_b=bases_b[:, :r].copy(),
        theta=theta,
        n=n,
        r=r,
    )


def build_masker(
    states: StateSet,
    cert: HadamardCertificate,
    frs: FixedReducingSet,
    anchor: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    isometry_tol: float = ISOMETRY_TOL,
) -> Masker:
    """Build the masking unitary sending a_k (x) anchor to Psi_k.

    Both families {a_k (x) anchor} and {Psi_k} have the same Gram matrix
    G = U D U^dag, so restricting to the positive spectrum gives two
    isometries V1 = A~ U+ D+^{-1/2} and W1 = Psi~ U+ D+^{-1/2} with the same
    coordinates; completing both and forming W V^dag maps one family to the
    other.
    """
    n, d_a, d_b = states.n, states.dim, frs.dim_b
    if frs.n != n or cert.n != n:
        raise ValueError("state set, certificate and fixed-reducing set sizes disagree")
    if frs.dim_a != d_a:
        raise ValueError(f"fixed-reducing A dimension {frs.dim_a} != state dimension {d_a}")
    positive = _positive_part(cert, tol)
    if int(np.sum(positive)) != frs.r:
        raise ValueError(
            f"rank mismatch: certificate has {int(np.sum(positive))} positive eigenvalues, "
            f"fixed-reducing set retains {frs.r}"
        )
    if anchor is None:
        anchor = np.zeros(d_b, dtype=complex)
        anchor[0] = 1.0
    anchor = np.asarray(anchor, dtype=complex)
    if anchor.shape != (d_b,) or abs(np.linalg.norm(anchor) - 1.0) > tol:
        raise ValueError(f"anchor must be a unit vector of length {d_b}")
    a_tilde = np.column_stack([tensor_product(states.vectors[k], anchor) for k in range(n)])
    psi_tilde = frs.states().T
    u_plus = cert.unitary.matrix[:, positive]
    inv_root = 1.0 / np.sqrt(cert.spectrum[positive])
    v1 = (a_tilde @ u_plus) * inv_root[None, :]
    w1 = (psi_tilde @ u_plus) * inv_root[None, :]
    for name, iso in (("input frame", v1), ("fixed-reducing frame", w1)):
        dev = float(np.max(np.abs(iso.conj().T @ iso - np.eye(frs.r))))
        if dev > isometry_tol:
            raise ValueError(
                f"{name} is not an isometry (deviation {dev:.3e}); "
                "certificate and states are inconsistent"
            )
    v = complete_isometry(v1, tol=isometry_tol)
    w = complete_isometry(w1, tol=isometry_tol)
    return Masker(matrix=w @ v.conj().T, dim_a=d_a, dim_b=d_b, anchor=anchor)


def verify_masking(masker: Masker, states, tol: float = DEFAULT_TOL) -> MaskingReport:
    """Check that all masked inputs share both reduced density matrices.

    Args:
        masker: the unitary to test.
        states: a ``StateSet`` or an (m, d_a) array; rows need not be
            normalized (useful for probing rejected combinations).
        tol: pass threshold on the largest Frobenius deviation from the
            first state's marginals.
    """
    rows = states.vectors if isinstance(states, StateSet) else np.asarray(states, dtype=complex)
    if rows.ndim == 1:
        rows = rows[None, :]
    if rows.shape[0] < 1 or rows.shape[1] != masker.dim_a:
        raise ValueError(f"expected states of dimension {masker.dim_a}")
    d_a, d_b = masker.dim_a, masker.dim_b
    marg_a, marg_b = [], []
    for k in range(rows.shape[0]):
        img = masker.apply(rows[k])
        marg_a.append(partial_trace(img, d_a, d_b, "A"))
        marg_b.append(partial_trace(img, d_a, d_b, "B"))
    devs = np.array(
        [
            max(
                float(np.linalg.norm(marg_a[k] - marg_a[0])),
                float(np.linalg.norm(marg_b[k] - marg_b[0])),
            )
            for k in range(rows.shape[0])
        ]
    )
    worst = float(np.max(devs))
    return MaskingReport(
        rho_a=marg_a[0],
        rho_b=marg_b[0],
        per_state_deviations=devs,
        max_deviation=worst,
        passed=bool(worst <= tol),
        tol=tol,
    )


def combine(obj: StateSet | FixedReducingSet, mu) -> np.ndarray:
    """Linear combination of a state set's states or a fixed-reducing set's."""
    if isinstance(obj, (StateSet, FixedReducingSet)):
        return obj.combine(mu)
    raise TypeError(f"expected StateSet or FixedReducingSet, got {type(obj).__name__}")


def combination_condition(psis, mu, tol: float = 1e-8) -> CombinationCheck:
    """Test whether combined B-side Schmidt frames stay orthonormal.

    For bipartite states Psi_k = sum_j w_j phi_j (x) psi_j^(k) sharing their
    marginals, Psi(mu) = sum_k mu_k Psi_k shares them too iff the combined
    vectors psi_j(mu) = sum_k mu_k psi_j^(k) are orthonormal. This evaluates
    the Gram matrix of {psi_j(mu)} and compares it to the identity.

    Args:
        psis: per-state frames; ``psis[k]`` is (d_b, r) with column j equal
            to psi_j^(k) (an (n, d_b, r) array works too).
        mu: n coefficients.
        tol: max-entry threshold on |Gram - I|.
    """
    frames = np.asarray(psis, dtype=complex)
    if frames.ndim != 3:
        raise ValueError(f"expected per-state frames of shape (n, d_b, r), got {frames.shape}")
    c = np.asarray(mu, dtype=complex)
    if c.shape != (frames.shape[0],):
        raise ValueError(f"expected {frames.shape[0]} coefficients, got shape {c.shape}")
    combined = np.tensordot(c, frames, axes=(0, 0))  # (d_b, r)
    g = combined.conj().T @ combined
    dev = float(np.max(np.abs(g - np.eye(g.shape[0]))))
    return CombinationCheck(dev <= tol, g, dev)


def torus_residuals(cert: HadamardCertificate, mu, tol: float = DEFAULT_TOL) -> dict:
    """Maskability diagnostics for a coefficient vector.

    Reports the per-row moduli in both scalings: ``row_sums`` are
    |sum_k mu_k e^{i Theta_jk}| (target 1) and ``udag_mu`` are |(U^dag mu)_j|
    (target 1/sqrt(n)); rows are restricted to the positive spectrum, since
    components of mu in the Gram kernel do not change the combined state.
    """
    c = np.asarray(mu, dtype=complex)
    if c.shape != (cert.n,):
        raise ValueError(f"expected {cert.n} coefficients, got shape {c.shape}")
    positive = _positive_part(cert, tol)
    moduli = np.abs(cert.unitary.matrix.conj().T[positive, :] @ c)
    return {
        "udag_mu": moduli,
        "row_sums": np.sqrt(cert.n) * moduli,
        "residual": float(np.max(np.abs(np.sqrt(cert.n) * moduli - 1.0))) if moduli.size else 0.0,
    }


def maskable_with(cert: HadamardCertificate, mu, tol: float = DEFAULT_TOL) -> bool:
    """Whether a(mu) is masked by the masker built from this certificate.

    True iff |(U^dag mu)_j| = 1/sqrt(n) within ``tol`` for every
    positive-spectrum row j. Any unit coefficient vector e_k passes, and a
    passing mu automatically yields a unit-norm combination.
    """
    return torus_residuals(cert, mu, tol)["residual"] <= np.sqrt(cert.n) * tol


def sample_maskable(cert: HadamardCertificate, count: int, seed) -> np.ndarray:
    """Draw maskable coefficient vectors, shape (count, n).

    Each sample is U z / sqrt(n) for a uniformly random unimodular phase
    vector z, i.e. a uniform point on the maskable torus.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = _rng(seed)
    z = np.exp(1j * rng.uniform(-np.pi, np.pi, size=(count, cert.n)))
    return z @ cert.unitary.matrix.T / np.sqrt(cert.n)


def _bloch(v: np.ndarray) -> np.ndarray:
    x = 2.0 * np.conj(v[0]) * v[1]
    return np.array([x.real, x.imag, abs(v[0]) ** 2 - abs(v[1]) ** 2])


def _pole_state(axis: np.ndarray) -> np.ndarray:
    theta = np.arccos(np.clip(axis[2], -1.0, 1.0))
    phi = np.arctan2(axis[1], axis[0])
    return np.array([np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)])


class Infeasible(ValueError):
    """Raised when a qubit triple is numerically too degenerate to solve."""


@dataclass(frozen=True)
class QubitTripleSolution:
    """Masker for three qubit states plus the data used to build it.

    ``mu`` expresses the third state in the input pair's basis (exactly:
    pair.combine(mu) is the third state). The masker comes from the
    auxiliary antipodal pair on the Bloch circle through all three states;
    its certificate is qubit_family(0, omega1, omega2) and it masks the two
    input states and the third simultaneously.
    """

    omega1: float
    omega2: float
    mu: np.ndarray
    masker: Masker
    aux_pair: StateSet
    aux_certificate: HadamardCertificate
    pole: np.ndarray
    weight: float


def solve_qubit_phases(
    pair: StateSet,
    third,
    omega1: float = 0.0,
    omega2: float = 0.0,
    tol: float = DEFAULT_TOL,
) -> QubitTripleSolution:
    """Mask two linearly independent qubit states together with any third.

    Any three qubit rays lie on a common Bloch circle: all have the same
    overlap modulus with the circle's poles p+/p-. Writing every circle
    state as sqrt(w) e^{i alpha} p+ + sqrt(1-w) e^{i beta} p-, the bipartite
    images sqrt(w) e^{i alpha} |00> + sqrt(1-w) e^{i beta} |11> reproduce
    all pairwise inner products and share their marginals, so the unitary
    built for the antipodal pair c+/- = sqrt(w) p+ +/- sqrt(1-w) p- (whose
    Gram is real, certified by qubit_family(0, omega1, omega2)) masks every
    state on the circle at once, the three inputs included.

    Note the input pair's own masker family cannot do this: its maskable set
    is one fixed circle independent of the family phases, and a generic
    third state lies off it. The construction here moves to the circle the
    three states actually share.

    Args:
        pair: two linearly independent unit qubit states.
        third: a unit qubit state vector.
        omega1, omega2: free phases of the auxiliary certificate's Hadamard
            family member (any values give a valid masker).
        tol: numerical tolerance for the degeneracy checks.

    Returns:
        A ``QubitTripleSolution``; ``verify_masking(sol.masker, triple)``
        passes for the three input states.
    """
    if pair.dim != 2 or pair.n != 2:
        raise ValueError("pair must contain exactly two qubit states")
    t = np.asarray(third, dtype=complex)
    if t.shape != (2,) or abs(np.linalg.norm(t) - 1.0) > tol:
        raise ValueError("third must be a unit qubit vector")
    a = pair.matrix()  # (2, 2), columns a_1, a_2
    if abs(np.linalg.det(a)) <= tol:
        raise Infeasible("pair states are (numerically) linearly dependent")
    mu = np.linalg.solve(a, t)

    points = [_bloch(pair.vectors[0]), _bloch(pair.vectors[1]), _bloch(t)]
    axis = np.cross(points[0] - points[1], points[0] - points[2])
    norm = np.linalg.norm(axis)
    if norm <= tol:
        # collinear Bloch points (e.g. third on the pair's chord, or equal to
        # one of them): any axis orthogonal to the line works
        chord = points[0] - points[1]
        if np.linalg.norm(chord) <= tol:
            chord = points[0] - points[2]
        probe = np.array([1.0, 0.0, 0.0])
        if np.linalg.norm(np.cross(chord, probe)) <= tol:
            probe = np.array([0.0, 1.0, 0.0])
        axis = np.cross(chord, probe)
        norm = np.linalg.norm(axis)
    axis = axis / norm
    if axis @ points[0] < 0:
        axis = -axis  # make the + pole the heavy one (descending weights)
    height = float(axis @ points[0])
    weight = (1.0 + height) / 2.0

    spectrum = np.array([2.0 * weight, 2.0 * (1.0 - weight)])
    if spectrum[1] <= tol:
        raise Infeasible("the three states collapse onto one Bloch point")
    p_plus = _pole_state(axis)
    p_minus = _pole_state(-axis)
    root_w, root_c = np.sqrt(weight), np.sqrt(1.0 - weight)
    c1 = root_w * p_plus + root_c * p_minus
    c2 = root_w * p_plus - root_c * p_minus
    aux = StateSet.from_vectors(np.vstack([c1, c2]), tol=max(tol, 1e-9))
    family = qubit_family(0.0, omega1, omega2)
    residual = float(
        np.linalg.norm(aux.gram() - (family.matrix * spectrum[None, :]) @ family.matrix.conj().T)
    )
    cert = HadamardCertificate(unitary=family, spectrum=spectrum, residual=residual)
    frs = fixed_reducing_states(cert, aux, tol=tol)
    masker = build_masker(aux, cert, frs, tol=tol)
    log.debug(
        "qubit triple: circle weight %.6f, aux overlap %.6f, residual %.3e",
        weight, 2.0 * weight - 1.0, cert.residual,
    )
    return QubitTripleSolution(
        omega1=omega1,
        omega2=omega2,
        mu=mu,
        masker=masker,
        aux_pair=aux,
        aux_certificate=cert,
        pole=p_plus,
        weight=weight,
    )
