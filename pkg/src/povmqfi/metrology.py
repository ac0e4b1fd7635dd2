"""Cramer-Rao bounds from the QFI, classical Fisher information, and a
Monte-Carlo maximum-likelihood phase estimation experiment."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherence import per_element_qfi
from .errors import ConfigInvalid, DimensionMismatch, FlatLikelihood
from .numerics import DEFAULT_TOL, Tolerances, check_hermitian, eigh
from .qfi import qfi
from .states import DensityMatrix, Povm

ZERO_INFO = 1e-12
FD_STEP = 1e-5
MIN_PROB = 1e-12
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def qcrb_bound(rho: DensityMatrix, A, N: int, tol: Tolerances = DEFAULT_TOL) -> float:
    """Lower bound ``1 / (N F)`` on the estimator variance; ``inf`` when ``F`` vanishes."""
    if N < 1:
        raise ConfigInvalid(f"repetitions must be positive, got {N}")
    F = qfi(rho, A, tol)
    return math.inf if F <= ZERO_INFO else 1.0 / (N * F)


@dataclass(frozen=True)
class EstimationBudget:
    repetitions: int
    information: tuple  # N * F(rho, E_j) per parameter

    @property
    def sum_bound(self) -> float:
        return math.fsum(self.information)

    @property
    def per_parameter_bounds(self) -> tuple:
        return tuple(math.inf if I <= self.repetitions * ZERO_INFO else 1.0 / I for I in self.information)

    def to_dict(self) -> dict:
        return {
            "repetitions": self.repetitions,
            "per_parameter_bounds": [None if math.isinf(b) else b for b in self.per_parameter_bounds],
            "unbounded": [math.isinf(b) for b in self.per_parameter_bounds],
            "information": list(self.information),
            "sum_bound": self.sum_bound,
        }


def uncertainty_budget(rho: DensityMatrix, E: Povm, N: int, tol: Tolerances = DEFAULT_TOL) -> EstimationBudget:
    if N < 1:
        raise ConfigInvalid(f"repetitions must be positive, got {N}")
    return EstimationBudget(N, tuple(N * F for F in per_element_qfi(rho, E, tol)))


class _Family:
    """Outcome probabilities of ``M`` on ``exp(-i A theta) rho exp(i A theta)``."""

    def __init__(self, rho: DensityMatrix, A, M: Povm, tol: Tolerances):
        A = check_hermitian(A, tol)
        if not (A.shape[0] == rho.dim == M.dim):
            raise DimensionMismatch("state, observable and measurement dimensions differ")
        w, V = eigh(A, tol)
        self.w = w
        # work in the eigenbasis of A, where the evolution is diagonal
        self.rho = V.conj().T @ rho.matrix @ V
        self.M = np.array([V.conj().T @ Mm @ V for Mm in M.elements])

    def probs(self, thetas) -> np.ndarray:
        """Array of shape ``(len(thetas), n_outcomes)``."""
        th = np.atleast_1d(np.asarray(thetas, dtype=float))
        phase = np.exp(-1j * np.outer(th, self.w))  # (t, a)
        # rho(theta)_ab = phase_a rho_ab conj(phase_b); p_m = sum_ab M_ba rho(theta)_ab
        rt = phase[:, :, None] * self.rho[None] * phase.conj()[:, None, :]
        return np.einsum("mba,tab->tm", self.M, rt).real


def classical_fisher(rho: DensityMatrix, A, M: Povm, theta0: float, tol: Tolerances = DEFAULT_TOL) -> float:
    fam = _Family(rho, A, M, tol)
    p = fam.probs([theta0])[0]
    dp = (fam.probs([theta0 + FD_STEP])[0] - fam.probs([theta0 - FD_STEP])[0]) / (2 * FD_STEP)
    keep = p >= MIN_PROB
    return float(np.sum(dp[keep] ** 2 / p[keep]))


@dataclass(frozen=True)
class EstimationRecord:
    theta_true: float
    repetitions: int
    trials: int
    classical_fisher: float
    quantum_fisher: float
    variance: float | None
    mean_estimate: float
    cfi_bound: float
    qcrb: float

    @property
    def ratio_to_cfi_bound(self) -> float | None:
        return None if self.variance is None else self.variance / self.cfi_bound

    def to_dict(self) -> dict:
        return {
            "theta_true": self.theta_true,
            "repetitions": self.repetitions,
            "trials": self.trials,
            "classical_fisher": self.classical_fisher,
            "quantum_fisher": self.quantum_fisher,
            "variance": self.variance,
            "mean_estimate": self.mean_estimate,
            "cfi_bound": self.cfi_bound,
            "qcrb": self.qcrb,
            "ratio_to_cfi_bound": self.ratio_to_cfi_bound,
        }


def _log_likelihood(counts: np.ndarray, probs: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        logp = np.log(np.clip(probs, 0.0, None))
    # outcomes never observed contribute nothing, even where p = 0
    return np.where(counts > 0, counts * logp, 0.0).sum(axis=-1)


def _golden_max(fn, a: float, b: float, xtol: float = 1e-6) -> float:
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def simulate_estimation(
    rho: DensityMatrix,
    A,
    M: Povm,
    theta_true: float,
    N: int,
    trials: int,
    seed=None,
    grid_points: int = 2001,
    tol: Tolerances = DEFAULT_TOL,
) -> EstimationRecord:
    """Repeat ``trials`` maximum-likelihood estimates from ``N`` shots each.

    The likelihood is maximized on a grid over ``[theta_true - 1,
    theta_true + 1]`` and refined by golden-section search to 1e-6.
    """
    if N < 1 or trials < 1:
        raise ConfigInvalid("repetitions and trials must be positive")
    cfi = classical_fisher(rho, A, M, theta_true, tol)
    if cfi <= 1e-6:
        raise FlatLikelihood(f"classical Fisher information {cfi:.3e} is too small to estimate from")
    fam = _Family(rho, A, M, tol)
    rng = np.random.default_rng(seed)
    p_true = np.clip(fam.probs([theta_true])[0], 0.0, None)
    counts = rng.multinomial(N, p_true / p_true.sum(), size=trials)

    grid = np.linspace(theta_true - 1.0, theta_true + 1.0, grid_points)
    ll = _log_likelihood(counts[:, None, :], fam.probs(grid)[None, :, :])
    step = grid[1] - grid[0]
    estimates = np.empty(trials)
    for t in range(trials):
        i = int(np.argmax(ll[t]))
        lo, hi = max(grid[0], grid[i] - step), min(grid[-1], grid[i] + step)
        estimates[t] = _golden_max(lambda th: float(_log_likelihood(counts[t], fam.probs([th])[0])), lo, hi)

    variance = float(np.var(estimates, ddof=1)) if trials >= 2 else None
    F = qfi(rho, A, tol)
    return EstimationRecord(
        theta_true=float(theta_true),
        repetitions=N,
        trials=trials,
        classical_fisher=cfi,
        quantum_fisher=F,
        variance=variance,
        mean_estimate=float(np.mean(estimates)),
        cfi_bound=1.0 / (N * cfi),
        qcrb=math.inf if F <= ZERO_INFO else 1.0 / (N * F),
    )
