"""QFI-based coherence measures relative to a POVM.

Two routes are kept side by side:

* ``cf_direct``   -- sum over elements of ``qfi(rho, E_j)``;
* ``cf_embedded`` -- the same sum evaluated on the Naimark-embedded state
  against the register projectors ``I (x) |j><j|``.

They coincide for projective measurements and can differ otherwise;
:func:`naimark_gap` reports both.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import DimensionMismatch
from .naimark import KrausRoots, embed_state, kraus_roots, register_projectors
from .numerics import DEFAULT_TOL, Tolerances, eigh, haar_unitary
from .qfi import qfi
from .states import (
    BasisMeasurement,
    DensityMatrix,
    Povm,
    ProjectiveMeasurement,
    block_dephase,
    incoherence_residual,
    random_block_incoherent_state,
    random_partition,
    random_povm,
    random_projective,
    random_state,
    validate_state,
)

AGREEMENT_TOL = 1e-8


def _check_dims(rho: DensityMatrix, E: Povm):
    if rho.dim != E.dim:
        raise DimensionMismatch(f"state dim {rho.dim} vs measurement dim {E.dim}")


def per_element_qfi(rho: DensityMatrix, E: Povm, tol: Tolerances = DEFAULT_TOL) -> list[float]:
    _check_dims(rho, E)
    return [qfi(rho, Ej, tol) for Ej in E.elements]


def cf_direct(rho: DensityMatrix, E: Povm, tol: Tolerances = DEFAULT_TOL) -> float:
    return float(sum(per_element_qfi(rho, E, tol)))


def cf_embedded(rho: DensityMatrix, E: Povm | KrausRoots, tol: Tolerances = DEFAULT_TOL) -> float:
    """Coherence of the Naimark-embedded state against the register projectors."""
    roots = E if isinstance(E, KrausRoots) else kraus_roots(E, tol=tol)
    rho_eps = embed_state(rho, roots, tol)
    return float(sum(qfi(rho_eps, P, tol) for P in register_projectors(roots.dim, roots.n)))


def cf_block(rho: DensityMatrix, P: ProjectiveMeasurement, tol: Tolerances = DEFAULT_TOL) -> float:
    if not P.is_projective:
        raise TypeError("cf_block needs a projective measurement")
    return cf_direct(rho, P, tol)


def cf_standard(rho: DensityMatrix, B: BasisMeasurement, tol: Tolerances = DEFAULT_TOL) -> float:
    if not isinstance(B, BasisMeasurement):
        raise TypeError("cf_standard needs a rank-one basis measurement")
    _check_dims(rho, B)
    total = 0.0
    for j in range(B.dim):
        v = B.vectors[:, j]
        total += qfi(rho, np.outer(v, v.conj()), tol)
    return float(total)


def conjectured_gap(rho: DensityMatrix, E: Povm) -> float:
    """``4 sum_j tr(rho (E_j - E_j^2))``; vanishes for projective measurements."""
    _check_dims(rho, E)
    return float(4.0 * sum(np.trace(rho.matrix @ (Ej - Ej @ Ej)).real for Ej in E.elements))


@dataclass(frozen=True)
class CoherenceReport:
    direct_value: float
    embedded_value: float
    per_element_values: tuple
    conjectured_gap: float

    @property
    def gap(self) -> float:
        return self.embedded_value - self.direct_value

    @property
    def flag(self) -> str:
        return "AGREES" if abs(self.gap) <= AGREEMENT_TOL else "DISAGREES"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["per_element_values"] = list(self.per_element_values)
        out["gap"] = self.gap
        out["flag"] = self.flag
        return out


def naimark_gap(rho: DensityMatrix, E: Povm, tol: Tolerances = DEFAULT_TOL) -> CoherenceReport:
    per = per_element_qfi(rho, E, tol)
    return CoherenceReport(
        direct_value=float(sum(per)),
        embedded_value=cf_embedded(rho, E, tol),
        per_element_values=tuple(per),
        conjectured_gap=conjectured_gap(rho, E),
    )


# axiom harness

def block_isometries(P: ProjectiveMeasurement) -> list[np.ndarray]:
    """Orthonormal basis (as columns) of each projector's range."""
    return [eigh(Pj).eigenvectors[:, :dj] for Pj, dj in zip(P.projectors, P.block_dims)]


def block_unitary(P: ProjectiveMeasurement, rng: np.random.Generator) -> np.ndarray:
    """``sum_j B_j u_j B_j^dag`` with Haar-random ``u_j`` inside each block."""
    Bs = block_isometries(P)
    return sum(B @ haar_unitary(B.shape[1], rng) @ B.conj().T for B in Bs)


def block_permutation(P: ProjectiveMeasurement, rng: np.random.Generator) -> np.ndarray | None:
    """Unitary swapping two equal-dimension blocks, or None when no pair exists."""
    dims = list(P.block_dims)
    pairs = [(j, k) for j in range(len(dims)) for k in range(j + 1, len(dims)) if dims[j] == dims[k]]
    if not pairs:
        return None
    j, k = pairs[int(rng.integers(len(pairs)))]
    Bs = block_isometries(P)
    W = Bs[k] @ Bs[j].conj().T + Bs[j] @ Bs[k].conj().T
    for l, B in enumerate(Bs):
        if l not in (j, k):
            W = W + B @ B.conj().T
    return W


def _channel_family(P: ProjectiveMeasurement, rng: np.random.Generator) -> list[tuple[str, Callable]]:
    channels: list[tuple[str, Callable]] = [("dephasing", lambda R: block_dephase(R, P))]
    U = block_unitary(P, rng)
    channels.append(("block_unitary", lambda R, U=U: U @ R @ U.conj().T))
    W = block_permutation(P, rng)
    if W is not None:
        channels.append(("block_permutation", lambda R, W=W: W @ R @ W.conj().T))
    mix = [block_unitary(P, rng) for _ in range(3)] + ([W] if W is not None else [])
    q = rng.dirichlet(np.ones(len(mix)))
    channels.append(("unitary_mixture", lambda R: sum(qi * Ui @ R @ Ui.conj().T for qi, Ui in zip(q, mix))))
    return channels


@dataclass
class PropertyResult:
    threshold: float
    max_violation: float = 0.0
    checks: int = 0

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.threshold

    def record(self, violation: float):
        self.checks += 1
        self.max_violation = max(self.max_violation, float(violation))

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "max_violation": self.max_violation,
            "checks": self.checks,
            "passed": self.passed,
        }


@dataclass
class SuiteReport:
    dims: tuple
    trials: int
    seed: int
    properties: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(p.passed for p in self.properties.values())

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "trials": self.trials,
            "seed": self.seed,
            "properties": {k: v.to_dict() for k, v in self.properties.items()},
            "all_passed": self.all_passed,
        }


def _two_block_split(P: ProjectiveMeasurement, rng: np.random.Generator):
    n = len(P)
    order = rng.permutation(n)
    cut = int(rng.integers(1, n))
    return sorted(order[:cut].tolist()), sorted(order[cut:].tolist())


def _state_on(Q: np.ndarray, rng: np.random.Generator) -> DensityMatrix:
    sigma = random_state(Q.shape[0], seed=rng).matrix
    block = Q @ sigma @ Q
    return validate_state(block / np.trace(block).real)


def _mix(p: float, a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return validate_state(p * a.matrix + (1 - p) * b.matrix)


def axiom_suite(
    dims: Iterable[int] = (2, 3, 4),
    trials: int = 100,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
) -> SuiteReport:
    """Spot-check the measure's axioms on random instances.

    Violations are reported as data.  Each trial draws its own generator
    from ``(seed, d, trial)`` so results do not depend on execution order.
    """
    dims = tuple(int(d) for d in dims)
    props = {
        "faithfulness_incoherent": PropertyResult(1e-10),
        "faithfulness_coherent": PropertyResult(0.0),
        "convexity_direct": PropertyResult(1e-9),
        "convexity_block": PropertyResult(1e-9),
        "unitary_covariance": PropertyResult(1e-9),
        "block_additivity": PropertyResult(1e-9),
        "monotonicity": PropertyResult(1e-9),
        "projective_agreement": PropertyResult(AGREEMENT_TOL),
    }
    for d in dims:
        for t in range(trials):
            rng = np.random.default_rng([seed, d, t])
            n = int(rng.integers(2, d + 1))
            P = random_projective(d, random_partition(d, n, rng), seed=rng)
            rho = random_state(d, rank=int(rng.integers(1, d + 1)), seed=rng)

            # (i) faithfulness in both directions
            inc = random_block_incoherent_state(P, seed=rng)
            props["faithfulness_incoherent"].record(cf_block(inc, P, tol))
            if incoherence_residual(rho, P) >= 1e-3:
                props["faithfulness_coherent"].record(max(0.0, 1e-8 - cf_block(rho, P, tol)))

            # (ii) convexity
            other = random_state(d, seed=rng)
            p = float(rng.uniform())
            mixed = _mix(p, rho, other)
            E = random_povm(d, int(rng.integers(1, 5)), seed=rng)
            props["convexity_direct"].record(
                cf_direct(mixed, E, tol) - p * cf_direct(rho, E, tol) - (1 - p) * cf_direct(other, E, tol)
            )
            props["convexity_block"].record(
                cf_block(mixed, P, tol) - p * cf_block(rho, P, tol) - (1 - p) * cf_block(other, P, tol)
            )

            # (iii) unitary covariance of the embedded measure
            rho_eps = embed_state(rho, kraus_roots(E, tol=tol), tol)
            Pbar = register_projectors(d, len(E))
            base = sum(qfi(rho_eps, Pj, tol) for Pj in Pbar)
            U = haar_unitary(rho_eps.dim, rng)
            moved = validate_state(U @ rho_eps.matrix @ U.conj().T)
            rotated = sum(qfi(moved, U @ Pj @ U.conj().T, tol) for Pj in Pbar)
            props["unitary_covariance"].record(abs(rotated - base) / (1.0 + abs(base)))

            # (iv) block additivity on a direct sum across a split of the blocks
            g1, g2 = _two_block_split(P, rng)
            Q1 = sum(P.projectors[j] for j in g1)
            Q2 = sum(P.projectors[j] for j in g2)
            r1, r2 = _state_on(Q1, rng), _state_on(Q2, rng)
            q = float(rng.uniform())
            lhs = cf_block(_mix(q, r1, r2), P, tol)
            rhs = q * cf_block(r1, P, tol) + (1 - q) * cf_block(r2, P, tol)
            props["block_additivity"].record(abs(lhs - rhs))

            # (v) monotonicity under block-incoherent channels
            before = cf_block(rho, P, tol)
            for _, channel in _channel_family(P, rng):
                after = cf_block(validate_state(channel(rho.matrix)), P, tol)
                props["monotonicity"].record((after - before) / (1.0 + before))

            props["projective_agreement"].record(abs(cf_embedded(rho, P, tol) - cf_direct(rho, P, tol)))
    return SuiteReport(dims, trials, seed, props)
