"""Worked instances: the qutrit state whose convex roof exceeds the measure."""

from __future__ import annotations

import numpy as np

from .states import DensityMatrix

OMEGA = np.exp(2j * np.pi / 3)


def counterexample_frame() -> np.ndarray:
    """Eigenvectors (columns) of the qutrit counterexample state.

    The first two are the Fourier vectors spanning the support; the third
    completes the basis and carries eigenvalue 0.
    """
    f1 = np.array([1, 1, 1]) / np.sqrt(3)
    f2 = np.array([1, OMEGA, OMEGA.conjugate()]) / np.sqrt(3)
    f3 = np.array([1, OMEGA.conjugate(), OMEGA]) / np.sqrt(3)
    return np.column_stack([f1, f2, f3])


def counterexample_state() -> DensityMatrix:
    """Equal mixture of the first two Fourier vectors, pinned to that eigenframe."""
    return DensityMatrix.from_spectrum([0.5, 0.5, 0.0], counterexample_frame())


def counterexample_y_reference() -> list[np.ndarray]:
    """Closed-form Y matrices of the counterexample for ``|j><j|``, j = 1, 2, 3."""
    w, wc = OMEGA, OMEGA.conjugate()
    mats = [
        [[1, 1, 0], [1, 1, 0], [0, 0, 0]],
        [[1, w, 0], [wc, 1, 0], [0, 0, 0]],
        [[1, wc, 0], [w, 1, 0], [0, 0, 0]],
    ]
    return [np.array(m, dtype=complex) / 3 for m in mats]
