"""Validated states and measurements, incoherence residuals, random generators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BadRank,
    CompletenessViolation,
    DimensionMismatch,
    NotPsd,
    NumericalFailure,
    TraceNotOne,
    ValidationError,
)
from .numerics import (
    DEFAULT_TOL,
    Spectrum,
    Tolerances,
    as_square,
    check_hermitian,
    eigh,
    haar_unitary,
    psd_sqrt,
)

TRACE_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
ORTHOGONALITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    spectrum: Spectrum

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.spectrum.eigenvectors

    @classmethod
    def from_spectrum(cls, eigenvalues, eigenvectors, tol: Tolerances = DEFAULT_TOL) -> "DensityMatrix":
        """Build a state from a chosen eigenframe.

        Degenerate states admit many eigenbases; quantities expressed in the
        eigenframe (such as the Y matrices) depend on which one is used, so
        this lets a caller pin it.  Columns of ``eigenvectors`` must be
        orthonormal and eigenvalues descending.
        """
        lam = np.asarray(eigenvalues, dtype=float)
        V = np.asarray(eigenvectors, dtype=complex)
        d = lam.size
        if V.shape != (d, d):
            raise DimensionMismatch(f"need {d} eigenvectors of length {d}, got shape {V.shape}")
        ortho = float(np.linalg.norm(V.conj().T @ V - np.eye(d)))
        if ortho > tol.ortho:
            raise ValidationError(f"eigenvectors are not orthonormal (residual {ortho:.3e})", ortho)
        if np.any(np.diff(lam) > 0):
            raise ValidationError("eigenvalues must be in descending order")
        spec = Spectrum(lam.copy(), V.copy())
        rho = validate_state(spec.reconstruct(), tol)
        return cls(rho.matrix, spec)

    @classmethod
    def pure(cls, psi, tol: Tolerances = DEFAULT_TOL) -> "DensityMatrix":
        v = np.asarray(psi, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return validate_state(np.outer(v, v.conj()), tol)


@dataclass(frozen=True, eq=False)
class Povm:
    elements: tuple

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def n(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, j):
        return self.elements[j]

    @property
    def is_projective(self) -> bool:
        return False


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement(Povm):
    block_dims: tuple

    @property
    def projectors(self) -> tuple:
        return self.elements

    @property
    def is_projective(self) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class BasisMeasurement(ProjectiveMeasurement):
    vectors: np.ndarray  # column j is |j>


def validate_state(M, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    H = check_hermitian(M, tol)
    tr = float(np.trace(H).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise TraceNotOne(f"trace is {tr:.12g}, residual {abs(tr - 1.0):.3e}", abs(tr - 1.0))
    spec = eigh(H, tol)
    if spec.eigenvalues[-1] < -tol.psd:
        raise NotPsd(f"state has negative eigenvalue {spec.eigenvalues[-1]:.3e}", float(-spec.eigenvalues[-1]))
    return DensityMatrix(H, spec)


def _rank(P: np.ndarray) -> int:
    return int(round(float(np.trace(P).real)))


def validate_povm(Ms: Sequence, tol: Tolerances = DEFAULT_TOL) -> Povm:
    """Validate measurement elements, returning the most specific measurement type."""
    if len(Ms) == 0:
        raise ValidationError("a measurement needs at least one element")
    elements = [check_hermitian(M, tol) for M in Ms]
    d = elements[0].shape[0]
    if any(E.shape != (d, d) for E in elements):
        raise DimensionMismatch("measurement elements must share a dimension")
    for j, E in enumerate(elements):
        w = np.linalg.eigvalsh(E)
        if w[0] < -tol.psd:
            raise NotPsd(f"element {j} has negative eigenvalue {w[0]:.3e}", float(-w[0]))
    res = float(np.linalg.norm(sum(elements) - np.eye(d)))
    if res > COMPLETENESS_TOL:
        raise CompletenessViolation(f"elements do not sum to the identity: residual {res:.3e}", res)

    for E in elements:
        E.setflags(write=False)
    projective = all(
        np.linalg.norm(Ej @ Ek - (Ej if j == k else 0)) <= ORTHOGONALITY_TOL
        for j, Ej in enumerate(elements)
        for k, Ek in enumerate(elements)
    )
    if not projective:
        return Povm(tuple(elements))
    ranks = tuple(_rank(P) for P in elements)
    if all(r == 1 for r in ranks):
        vectors = np.column_stack([eigh(P, tol).eigenvectors[:, 0] for P in elements])
        return BasisMeasurement(tuple(elements), ranks, vectors)
    return ProjectiveMeasurement(tuple(elements), ranks)


def basis_measurement(vectors, tol: Tolerances = DEFAULT_TOL) -> BasisMeasurement:
    """Rank-one projective measurement from the columns of ``vectors``."""
    V = as_square(vectors)
    M = validate_povm([np.outer(V[:, j], V[:, j].conj()) for j in range(V.shape[1])], tol)
    if not isinstance(M, BasisMeasurement):
        raise ValidationError("vectors do not form an orthonormal basis")
    return M


def computational_basis(d: int) -> BasisMeasurement:
    return basis_measurement(np.eye(d))


def incoherence_residual(rho: DensityMatrix, M: Povm) -> float:
    """Largest ``||E_j rho E_k||_F`` over ``j != k``; zero for a single element."""
    if rho.dim != M.dim:
        raise DimensionMismatch(f"state dim {rho.dim} vs measurement dim {M.dim}")
    R = rho.matrix
    worst = 0.0
    for j, Ej in enumerate(M.elements):
        left = Ej @ R
        for k, Ek in enumerate(M.elements):
            if j != k:
                worst = max(worst, float(np.linalg.norm(left @ Ek)))
    return worst


def block_dephase(rho, P: ProjectiveMeasurement) -> np.ndarray:
    R = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return sum(Pj @ R @ Pj for Pj in P.projectors)


# random generators

def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_state(d: int, rank: int | None = None, seed=None) -> DensityMatrix:
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise BadRank(f"rank must lie in [1, {d}], got {rank}")
    rng = _rng(seed)
    G = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = G @ G.conj().T
    rho = rho / np.trace(rho).real
    return validate_state(0.5 * (rho + rho.conj().T))


def random_pure_vector(d: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_povm(d: int, n: int, seed=None) -> Povm:
    if n < 1:
        raise ValidationError(f"need at least one element, got {n}")
    rng = _rng(seed)
    if n == 1:
        return validate_povm([np.eye(d)])
    Gs = []
    for _ in range(n):
        X = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        Gs.append(X @ X.conj().T)
    S = sum(Gs)
    w = np.linalg.eigvalsh(S)
    if w[0] <= 1e-12 * w[-1]:
        raise NumericalFailure("sum of random PSD factors is singular")
    S_inv_half = np.linalg.inv(psd_sqrt(S))
    Es = [S_inv_half @ G @ S_inv_half for G in Gs]
    Es = [0.5 * (E + E.conj().T) for E in Es]
    return validate_povm(Es)


def random_partition(d: int, n: int, rng: np.random.Generator) -> list[int]:
    """Random composition of ``d`` into ``n`` positive parts."""
    if not 1 <= n <= d:
        raise ValidationError(f"cannot split dimension {d} into {n} blocks")
    cuts = np.sort(rng.choice(np.arange(1, d), size=n - 1, replace=False)) if n > 1 else np.array([], int)
    edges = np.concatenate([[0], cuts, [d]])
    return [int(x) for x in np.diff(edges)]


def random_projective(d: int, block_dims: Sequence[int] | None = None, seed=None) -> ProjectiveMeasurement:
    """Projective measurement with Haar-random eigenframe.

    When ``block_dims`` is omitted the number of blocks and their sizes are
    drawn at random as well.
    """
    rng = _rng(seed)
    if block_dims is None:
        n = int(rng.integers(1, d + 1))
        block_dims = random_partition(d, n, rng)
    if sum(block_dims) != d or min(block_dims) < 1:
        raise ValidationError(f"block dims {list(block_dims)} do not partition {d}")
    U = haar_unitary(d, rng)
    Ps, start = [], 0
    for dj in block_dims:
        cols = U[:, start:start + dj]
        Ps.append(cols @ cols.conj().T)
        start += dj
    return validate_povm(Ps)


def random_basis(d: int, seed=None) -> BasisMeasurement:
    return basis_measurement(haar_unitary(d, _rng(seed)))


def random_block_incoherent_state(P: ProjectiveMeasurement, seed=None) -> DensityMatrix:
    rng = _rng(seed)
    d = P.dim
    weights = rng.dirichlet(np.ones(len(P)))
    rho = np.zeros((d, d), dtype=complex)
    for p, Pj in zip(weights, P.projectors):
        sigma = random_state(d, seed=rng).matrix
        block = Pj @ sigma @ Pj
        rho += p * block / np.trace(block).real
    return validate_state(rho)
