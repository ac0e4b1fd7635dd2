"""Canonical Naimark extension of a POVM.

The extended space is ``H (x) H_R`` with the system factor first, so the
flat index of ``|a> (x) |j>`` is ``a * n + j``.  Register labels are zero
based here: register vector ``0`` is the ancilla preparation state that the
usual one-based notation calls ``|1>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotIsometry, NotUnitaryTwist, NumericalFailure
from .numerics import DEFAULT_TOL, Tolerances, as_square, complete_to_unitary, psd_sqrt, unitarity_residual
from .states import DensityMatrix, Povm, validate_state

EMBED_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausRoots:
    roots: tuple
    twists: tuple | None = None

    @property
    def n(self) -> int:
        return len(self.roots)

    @property
    def dim(self) -> int:
        return self.roots[0].shape[1]

    def elements(self) -> list[np.ndarray]:
        return [A.conj().T @ A for A in self.roots]


@dataclass(frozen=True, eq=False)
class NaimarkExtension:
    V: np.ndarray
    lifted_projectors: tuple
    n: int
    dim: int

    @property
    def extension_dim(self) -> int:
        return self.n * self.dim


def kraus_roots(E: Povm, twists: Sequence | None = None, tol: Tolerances = DEFAULT_TOL) -> KrausRoots:
    """Roots ``A_j = U_j sqrt(E_j)``; twists default to the identity."""
    roots = [psd_sqrt(Ej, tol) for Ej in E.elements]
    if twists is not None:
        if len(twists) != len(roots):
            raise DimensionMismatch(f"{len(twists)} twists for {len(roots)} elements")
        checked = []
        for j, U in enumerate(twists):
            U = as_square(U)
            if U.shape != roots[j].shape:
                raise DimensionMismatch(f"twist {j} has shape {U.shape}, expected {roots[j].shape}")
            res = unitarity_residual(U)
            if res > tol.ortho:
                raise NotUnitaryTwist(f"twist {j} is not unitary (residual {res:.3e})", res)
            checked.append(U)
        roots = [U @ A for U, A in zip(checked, roots)]
        twists = tuple(checked)
    return KrausRoots(tuple(roots), twists)


def _as_roots(E_or_roots, tol: Tolerances) -> KrausRoots:
    return E_or_roots if isinstance(E_or_roots, KrausRoots) else kraus_roots(E_or_roots, tol=tol)


def block_to_tensor_layout(Q: np.ndarray, n: int, d: int) -> np.ndarray:
    """Reorder a register-major block matrix into system (x) register layout."""
    return Q.reshape(n, d, n, d).transpose(1, 0, 3, 2).reshape(n * d, n * d)


def register_projectors(d: int, n: int) -> list[np.ndarray]:
    """``I_d (x) |j><j|`` for each register label ``j``."""
    out = []
    for j in range(n):
        e = np.zeros((n, n))
        e[j, j] = 1.0
        out.append(np.kron(np.eye(d), e))
    return out


def ancilla_state(rho: DensityMatrix | np.ndarray, n: int) -> np.ndarray:
    """``rho (x) |0><0|`` on the extended space (register label 0)."""
    R = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    e = np.zeros((n, n))
    e[0, 0] = 1.0
    return np.kron(R, e)


def build_extension(roots: KrausRoots, tol: Tolerances = DEFAULT_TOL) -> NaimarkExtension:
    n, d = roots.n, roots.dim
    completeness = float(np.linalg.norm(sum(roots.elements()) - np.eye(d)))
    if completeness > EMBED_TOL:
        raise NotIsometry(f"sum of A_j^dag A_j deviates from I by {completeness:.3e}", completeness)
    Q = complete_to_unitary(roots.roots, tol)
    V = block_to_tensor_layout(Q, n, d)
    Vh = V.conj().T
    lifted = tuple(Vh @ Pbar @ V for Pbar in register_projectors(d, n))
    return NaimarkExtension(V, lifted, n, d)


def embed_state(rho: DensityMatrix, E_or_roots, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """The embedded state ``sum_jk A_j rho A_k^dag (x) |j><k|``.

    Cross-checked against ``V (rho (x) |0><0|) V^dag`` for the canonical
    extension.
    """
    roots = _as_roots(E_or_roots, tol)
    if roots.dim != rho.dim:
        raise DimensionMismatch(f"state dim {rho.dim} vs POVM dim {roots.dim}")
    n, d = roots.n, roots.dim
    R = rho.matrix
    blocks = [[A_j @ R @ A_k.conj().T for A_k in roots.roots] for A_j in roots.roots]
    # blocks[j][k] sits at register entry |j><k|
    rho_eps = np.array(blocks).transpose(2, 0, 3, 1).reshape(n * d, n * d)

    ext = build_extension(roots, tol)
    via_v = ext.V @ ancilla_state(R, n) @ ext.V.conj().T
    mismatch = float(np.linalg.norm(rho_eps - via_v))
    if mismatch > EMBED_TOL:
        raise NumericalFailure(f"embedded state disagrees with V(rho x |0><0|)V^dag by {mismatch:.3e}")
    return validate_state(rho_eps, tol)


@dataclass(frozen=True)
class ProbabilityReport:
    direct: tuple
    lifted: tuple
    residuals: tuple

    @property
    def max_residual(self) -> float:
        return max(self.residuals)


def probability_check(rho: DensityMatrix, E: Povm, tol: Tolerances = DEFAULT_TOL) -> ProbabilityReport:
    """Compare ``tr(E_j rho)`` with ``tr(P~_j (rho (x) |0><0|))`` per outcome."""
    ext = build_extension(kraus_roots(E, tol=tol), tol)
    lifted_rho = ancilla_state(rho, ext.n)
    direct = [float(np.trace(Ej @ rho.matrix).real) for Ej in E.elements]
    lifted = [float(np.trace(P @ lifted_rho).real) for P in ext.lifted_projectors]
    residuals = [abs(a - b) for a, b in zip(direct, lifted)]
    return ProbabilityReport(tuple(direct), tuple(lifted), tuple(residuals))
