"""Convex roof of the QFI coherence measure.

The roof minimizes the ensemble-averaged pure-state measure over all pure
state decompositions of ``rho``.  Decompositions are generated from a
``d' x d'`` unitary acting on the scaled eigenvectors of ``rho``:
``sqrt(p_k) |psi_k> = sum_l U_kl sqrt(lambda_l) |phi_l>``.

Equality between the roof and the measure itself holds exactly when the
``Y`` matrices of the measurement elements commute; a joint diagonalizer
then yields an optimal ensemble.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .coherence import cf_direct
from .errors import BadDimension, ConfigInvalid, DimensionMismatch, NotUnitary
from .numerics import DEFAULT_TOL, Tolerances, as_square, check_hermitian, comm_norm, haar_unitary, unitarity_residual
from .qfi import pure_qfi
from .states import DensityMatrix, Povm

WEIGHT_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class PureStateEnsemble:
    weights: np.ndarray
    vectors: np.ndarray  # row k is |psi_k>

    def __len__(self):
        return len(self.weights)

    def density_matrix(self) -> np.ndarray:
        V = self.vectors
        return (V.T * self.weights) @ V.conj()

    def reconstruction_error(self, rho: DensityMatrix) -> float:
        return float(np.linalg.norm(self.density_matrix() - rho.matrix))


def _support(rho: DensityMatrix, tol: Tolerances):
    lam = np.clip(rho.eigenvalues, 0.0, None)
    keep = lam + lam[:, None] > tol.zero_eig * float(lam.max())
    return lam, keep


def y_matrix(rho: DensityMatrix, A, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``Y_A`` expressed in the descending eigenframe of ``rho``."""
    A = check_hermitian(A, tol)
    if A.shape[0] != rho.dim:
        raise DimensionMismatch(f"observable dim {A.shape[0]} vs state dim {rho.dim}")
    lam, keep = _support(rho, tol)
    s = lam[:, None] + lam[None, :]
    coef = np.where(keep, 2.0 * np.sqrt(np.outer(lam, lam)) / np.where(keep, s, 1.0), 0.0)
    Phi = rho.eigenvectors
    Y = coef * (Phi.conj().T @ A @ Phi)
    return 0.5 * (Y + Y.conj().T)


def y_matrices(rho: DensityMatrix, E: Povm, tol: Tolerances = DEFAULT_TOL) -> list[np.ndarray]:
    return [y_matrix(rho, Ej, tol) for Ej in E.elements]


def commutation_criterion(rho: DensityMatrix, E: Povm, tol: Tolerances = DEFAULT_TOL) -> tuple[bool, float]:
    """Whether all ``Y_{E_j}`` commute pairwise, with the largest commutator norm."""
    Ys = y_matrices(rho, E, tol)
    worst = 0.0
    for j in range(len(Ys)):
        for k in range(j + 1, len(Ys)):
            worst = max(worst, comm_norm(Ys[j], Ys[k]))
    scale = max(float(np.linalg.norm(Y)) ** 2 for Y in Ys)
    return worst <= tol.commute * (1.0 + scale), worst


def _scaled_rows(rho: DensityMatrix, U: np.ndarray) -> np.ndarray:
    # row k is sqrt(p_k) |psi_k>
    d = rho.dim
    lam = np.clip(rho.eigenvalues, 0.0, None)
    return (U[:, :d] * np.sqrt(lam)) @ rho.eigenvectors.T


def _check_unitary(rho: DensityMatrix, U, tol: Tolerances) -> np.ndarray:
    U = as_square(U)
    if U.shape[0] < rho.dim:
        raise BadDimension(f"unitary dimension {U.shape[0]} is below the state dimension {rho.dim}")
    res = unitarity_residual(U)
    if res > tol.ortho:
        raise NotUnitary(f"matrix is not unitary (residual {res:.3e})", res)
    return U


def ensemble_from_unitary(rho: DensityMatrix, U, tol: Tolerances = DEFAULT_TOL) -> PureStateEnsemble:
    """Pure-state decomposition of ``rho`` generated by a ``d' x d'`` unitary.

    Members whose weight is at most 1e-14 are left out.
    """
    U = _check_unitary(rho, U, tol)
    rows = _scaled_rows(rho, U)
    p = np.sum(np.abs(rows) ** 2, axis=1)
    keep = p > WEIGHT_FLOOR
    vectors = rows[keep] / np.sqrt(p[keep])[:, None]
    return PureStateEnsemble(p[keep], vectors)


def gamma_check(rho: DensityMatrix, U, tol: Tolerances = DEFAULT_TOL) -> float:
    """Largest deviation of ``tr(Gamma_j Gamma_k) / sqrt(p_j p_k)`` from ``delta_jk``."""
    U = _check_unitary(rho, U, tol)
    dp = U.shape[0]
    lam = np.zeros(dp)
    lam[: rho.dim] = np.clip(rho.eigenvalues, 0.0, None)
    root = np.sqrt((lam[:, None] + lam[None, :]) / 2.0)
    # Gamma_k in the padded eigenframe: root * U_kl conj(U_kl')
    G = root[None, :, :] * U[:, :, None] * U.conj()[:, None, :]
    p = (np.abs(U) ** 2) @ lam
    keep = np.flatnonzero(p > WEIGHT_FLOOR)
    G = G[keep]
    gram = np.einsum("jab,kba->jk", G, G).real / np.sqrt(np.outer(p[keep], p[keep]))
    return float(np.max(np.abs(gram - np.eye(len(keep)))))


def average_pure_cf(ens: PureStateEnsemble, E: Povm, tol: Tolerances = DEFAULT_TOL) -> float:
    if ens.vectors.shape[1] != E.dim:
        raise DimensionMismatch(f"ensemble vectors have dim {ens.vectors.shape[1]}, POVM dim {E.dim}")
    total = 0.0
    for p, psi in zip(ens.weights, ens.vectors):
        if p > WEIGHT_FLOOR:
            total += p * sum(pure_qfi(psi, Ej, tol) for Ej in E.elements)
    return float(total)


def _roof_objective_factory(rho: DensityMatrix, E: Povm):
    """Ensemble average and its gradient as functions of the generating unitary.

    Returns ``objective(U) -> (value, B)`` where ``value`` is the ensemble
    average and ``B`` satisfies ``d value = 2 Re sum_kl B_kl dU_kl``.
    """
    Es = np.array(E.elements)
    second_moment = float(sum(np.trace(rho.matrix @ Ej @ Ej).real for Ej in E.elements))
    d = rho.dim
    lam = np.clip(rho.eigenvalues, 0.0, None)
    PhiS = rho.eigenvectors * np.sqrt(lam)  # column l is sqrt(lambda_l) |phi_l>

    def objective(U: np.ndarray):
        rows = U[:, :d] @ PhiS.T  # row k is sqrt(p_k) |psi_k>
        p = np.sum(np.abs(rows) ** 2, axis=1)
        keep = p > WEIGHT_FLOOR
        r, pk = rows[keep], p[keep]
        Er = np.einsum("jab,kb->kja", Es, r)  # E_j r_k
        m = np.einsum("ka,kja->kj", r.conj(), Er).real  # r_k^dag E_j r_k
        value = 4.0 * (second_moment - float(np.sum(m**2 / pk[:, None])))
        g = -4.0 * (
            2.0 * np.einsum("kj,kja->ka", m / pk[:, None], Er)
            - (np.sum(m**2, axis=1) / pk**2)[:, None] * r
        )
        B = np.zeros_like(U)
        B[np.flatnonzero(keep), :d] = g.conj() @ PhiS
        return value, B

    return objective


def hermitian_from_params(theta: np.ndarray, n: int) -> np.ndarray:
    """Hermitian ``n x n`` matrix from ``n^2`` real parameters.

    The first ``n`` entries fill the diagonal; the rest are real and
    imaginary parts of the strict upper triangle, row by row.
    """
    H = np.zeros((n, n), dtype=complex)
    H[np.diag_indices(n)] = theta[:n]
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    H[iu] = theta[n:n + m] + 1j * theta[n + m:n + 2 * m]
    H[(iu[1], iu[0])] = np.conj(H[iu])
    return H


def unitary_from_params(theta: np.ndarray, n: int) -> np.ndarray:
    """``exp(i H(theta))`` via the eigendecomposition of ``H``."""
    w, v = np.linalg.eigh(hermitian_from_params(theta, n))
    return (v * np.exp(1j * w)) @ v.conj().T


def _params_gradient(J: np.ndarray, n: int) -> np.ndarray:
    # d f = 2 Re sum_ij J_ji dH_ij, mapped onto the parametrization of H
    iu = np.triu_indices(n, 1)
    upper, lower = J[iu], J[(iu[1], iu[0])]
    return np.concatenate([
        2.0 * np.diagonal(J).real,
        2.0 * (upper + lower).real,
        2.0 * (1j * lower - 1j * upper).real,
    ])


@dataclass(frozen=True)
class RoofConfig:
    dprime: int | None = None
    starts: int = 16
    max_iter: int = 2000
    tol: float = 1e-10
    seed: int = 0
    stall_window: int = 50


@dataclass(frozen=True, eq=False)
class RoofResult:
    lower_bound: float
    roof_value: float
    ensemble: PureStateEnsemble
    unitary: np.ndarray
    criterion_commutes: bool
    max_comm_norm: float
    starts_used: int
    iterations: int
    start_values: tuple

    @property
    def gap(self) -> float:
        return self.roof_value - self.lower_bound


def _local_descent(objective, U0: np.ndarray, cfg: RoofConfig):
    n = U0.shape[0]
    history: list[float] = []

    def f(theta):
        w, v = np.linalg.eigh(hermitian_from_params(theta, n))
        X = (v * np.exp(1j * w)) @ v.conj().T
        value, B = objective(U0 @ X)
        # divided differences of exp(i x) on the spectrum of H
        half = 0.5 * (w[:, None] - w[None, :])
        L = 1j * np.exp(0.5j * (w[:, None] + w[None, :])) * np.sinc(half / np.pi)
        D = v.conj().T @ (B.T @ U0) @ v
        J = v @ (D * L.T) @ v.conj().T
        return value, _params_gradient(J, n)

    def callback(intermediate_result):
        history.append(float(intermediate_result.fun))
        w = cfg.stall_window
        if len(history) > w and history[-w - 1] - history[-1] < cfg.tol:
            raise StopIteration

    res = minimize(
        f,
        np.zeros(n * n),
        jac=True,
        method="BFGS",
        callback=callback,
        options={"maxiter": cfg.max_iter, "gtol": 1e-9},
    )
    return res.x, float(res.fun), int(res.nit)


def convex_roof_minimize(
    rho: DensityMatrix,
    E: Povm,
    config: RoofConfig | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> RoofResult:
    """Multi-start local minimization of the ensemble average over ``U(d')``.

    Each start draws a Haar-random unitary ``U_0`` and descends over
    ``U = U_0 exp(i H(theta))`` from ``theta = 0``.  The best start (lowest
    value, earliest index on ties) is reported.
    """
    cfg = config or RoofConfig()
    d = rho.dim
    dp = d if cfg.dprime is None else int(cfg.dprime)
    if not d <= dp <= d * d:
        raise ConfigInvalid(f"dprime must lie in [{d}, {d * d}], got {dp}")
    if cfg.starts < 1 or cfg.max_iter < 1 or cfg.tol <= 0:
        raise ConfigInvalid("starts and max_iter must be positive and tol > 0")
    if rho.dim != E.dim:
        raise DimensionMismatch(f"state dim {rho.dim} vs POVM dim {E.dim}")

    objective = _roof_objective_factory(rho, E)
    lower = cf_direct(rho, E, tol)
    rng = np.random.default_rng(cfg.seed)
    best = None
    values, iterations = [], 0
    for _ in range(cfg.starts):
        U0 = haar_unitary(dp, rng)
        theta, value, nit = _local_descent(objective, U0, cfg)
        iterations += nit
        values.append(value)
        if best is None or value < best[0]:
            best = (value, U0 @ unitary_from_params(theta, dp))
    value, U = best
    ens = ensemble_from_unitary(rho, U, tol)
    commutes, worst = commutation_criterion(rho, E, tol)
    return RoofResult(
        lower_bound=lower,
        roof_value=value,
        ensemble=ens,
        unitary=U,
        criterion_commutes=commutes,
        max_comm_norm=worst,
        starts_used=cfg.starts,
        iterations=iterations,
        start_values=tuple(values),
    )


def commuting_optimal_ensemble(
    rho: DensityMatrix,
    E: Povm,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 0,
) -> PureStateEnsemble | None:
    """Optimal ensemble from a joint diagonalizer of the ``Y`` matrices.

    Returns None when the ``Y`` matrices do not commute.  The joint frame is
    taken from a random positive combination of the ``Y`` matrices and
    accepted once every ``Y`` is diagonal in it; up to eight weight draws
    are tried before giving up on degenerate combinations.
    """
    commutes, _ = commutation_criterion(rho, E, tol)
    if not commutes:
        return None
    Ys = y_matrices(rho, E, tol)
    scale = 1.0 + max(float(np.linalg.norm(Y)) for Y in Ys)
    rng = np.random.default_rng(seed)
    for _ in range(8):
        w = rng.uniform(0.5, 1.5, size=len(Ys))
        _, W = np.linalg.eigh(sum(wj * Y for wj, Y in zip(w, Ys)))
        off = 0.0
        for Y in Ys:
            D = W.conj().T @ Y @ W
            off = max(off, float(np.linalg.norm(D - np.diag(np.diagonal(D)))))
        if off <= np.sqrt(tol.commute) * scale:
            # Y = W diag W^dag matches sum_k r_k U_kl conj(U_kl') with U = W^T
            return ensemble_from_unitary(rho, W.T, tol)
    return None
