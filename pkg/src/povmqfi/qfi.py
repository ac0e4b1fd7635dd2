"""Quantum Fisher information of a state under the unitary family exp(-i A theta).

Convention: the spectral formula with prefactor 2 outside the pair sum, so a
pure state gives four times the variance of ``A``.  The ``Z_A`` route,
``tr(rho A^2) - tr(Z_A^2)``, is a quarter of that and is rescaled by 4.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotNormalized
from .numerics import DEFAULT_TOL, Tolerances, check_hermitian
from .states import DensityMatrix


def _prepare(rho: DensityMatrix, A, tol: Tolerances):
    A = check_hermitian(A, tol)
    if A.shape[0] != rho.dim:
        raise DimensionMismatch(f"observable dim {A.shape[0]} vs state dim {rho.dim}")
    lam = rho.eigenvalues.copy()
    lam[(lam < 0) & (lam >= -tol.psd)] = 0.0
    lam = np.clip(lam, 0.0, None)
    Phi = rho.eigenvectors
    A_eig = Phi.conj().T @ A @ Phi
    return lam, Phi, A, A_eig


def _pair_mask(lam: np.ndarray, tol: Tolerances) -> tuple[np.ndarray, np.ndarray]:
    s = lam[:, None] + lam[None, :]
    lam_max = float(lam.max()) if lam.size else 0.0
    return s, s > tol.zero_eig * lam_max


def qfi(rho: DensityMatrix, A, tol: Tolerances = DEFAULT_TOL) -> float:
    lam, _, _, A_eig = _prepare(rho, A, tol)
    s, keep = _pair_mask(lam, tol)
    diff2 = (lam[:, None] - lam[None, :]) ** 2
    ratio = np.where(keep, diff2 / np.where(keep, s, 1.0), 0.0)
    return float(max(0.0, 2.0 * np.sum(ratio * np.abs(A_eig) ** 2)))


def pure_qfi(psi, A, tol: Tolerances = DEFAULT_TOL) -> float:
    """Four times the variance of ``A`` in the normalized vector ``psi``."""
    v = np.asarray(psi, dtype=complex).ravel()
    A = check_hermitian(A, tol)
    if A.shape[0] != v.size:
        raise DimensionMismatch(f"observable dim {A.shape[0]} vs vector length {v.size}")
    norm_err = abs(np.vdot(v, v).real - 1.0)
    if norm_err > 1e-10:
        raise NotNormalized(f"state vector norm^2 deviates from 1 by {norm_err:.3e}", norm_err)
    Av = A @ v
    mean = np.vdot(v, Av).real
    second = np.vdot(Av, Av).real
    return float(max(0.0, 4.0 * (second - mean**2)))


def z_matrix(rho: DensityMatrix, A, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``Z_A`` in the computational basis; coefficient is 0 when both eigenvalues vanish."""
    lam, Phi, _, A_eig = _prepare(rho, A, tol)
    s, keep = _pair_mask(lam, tol)
    coef = np.where(keep, np.sqrt(2.0 * np.outer(lam, lam) / np.where(keep, s, 1.0)), 0.0)
    Z = Phi @ (coef * A_eig) @ Phi.conj().T
    return 0.5 * (Z + Z.conj().T)


def qfi_via_z(rho: DensityMatrix, A, tol: Tolerances = DEFAULT_TOL) -> float:
    _, _, A, _ = _prepare(rho, A, tol)
    Z = z_matrix(rho, A, tol)
    first = np.trace(rho.matrix @ A @ A).real
    second = np.trace(Z @ Z).real
    return float(4.0 * (first - second))
