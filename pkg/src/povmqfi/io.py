"""JSON file layouts for states, observables and measurements.

Complex entries are ``[re, im]`` pairs; matrices are row-major nested lists::

    {"kind": "state", "dim": 2, "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}
    {"kind": "povm", "dim": 2, "elements": [<matrix>, <matrix>]}

``kind`` is one of ``state``, ``observable``, ``povm``; when absent a file
with ``elements`` is read as a POVM and one with ``matrix`` as a state.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError
from .numerics import DEFAULT_TOL, Tolerances, check_hermitian
from .states import DensityMatrix, Povm, validate_povm, validate_state

KINDS = ("state", "observable", "povm")


def matrix_to_json(M) -> list:
    A = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def matrix_from_json(data, dim: int | None = None) -> np.ndarray:
    try:
        A = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix is not a nested array of numbers: {exc}") from exc
    if A.ndim != 3 or A.shape[2] != 2:
        raise ParseError(f"matrix must be rows of [re, im] pairs, got array shape {A.shape}")
    if A.shape[0] != A.shape[1]:
        raise ParseError(f"matrix must be square, got {A.shape[0]}x{A.shape[1]}")
    if dim is not None and A.shape[0] != dim:
        raise ParseError(f"declared dim {dim} but matrix is {A.shape[0]}x{A.shape[1]}")
    if not np.all(np.isfinite(A)):
        raise ParseError("matrix has non-finite entries")
    return A[..., 0] + 1j * A[..., 1]


def state_document(rho) -> dict:
    M = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return {"kind": "state", "dim": int(M.shape[0]), "matrix": matrix_to_json(M)}


def observable_document(A) -> dict:
    A = np.asarray(A)
    return {"kind": "observable", "dim": int(A.shape[0]), "matrix": matrix_to_json(A)}


def povm_document(E) -> dict:
    elements = E.elements if isinstance(E, Povm) else list(E)
    return {
        "kind": "povm",
        "dim": int(elements[0].shape[0]),
        "elements": [matrix_to_json(Ej) for Ej in elements],
    }


def write_json(path, doc: dict):
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def _load(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    return doc


def _dim(doc: dict) -> int:
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError(f"'dim' must be a positive integer, got {dim!r}")
    return dim


def parse_document(doc: dict, expect: str | None = None, tol: Tolerances = DEFAULT_TOL):
    kind = doc.get("kind")
    if kind is not None and kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}; expected one of {KINDS}")
    if kind is None:
        kind = expect or ("povm" if "elements" in doc else "state")
    if expect is not None and kind != expect:
        raise ParseError(f"expected a {expect} file, got kind {kind!r}")
    dim = _dim(doc)
    if kind == "povm":
        elements = doc.get("elements")
        if not isinstance(elements, list) or not elements:
            raise ParseError("'elements' must be a nonempty list of matrices")
        return validate_povm([matrix_from_json(m, dim) for m in elements], tol)
    if "matrix" not in doc:
        raise ParseError("missing 'matrix'")
    M = matrix_from_json(doc["matrix"], dim)
    if kind == "state":
        return validate_state(M, tol)
    return check_hermitian(M, tol)


def parse_input(path, expect: str | None = None, tol: Tolerances = DEFAULT_TOL):
    """Read and validate a state, observable or POVM file."""
    return parse_document(_load(path), expect, tol)


def jsonable(obj):
    """Convert numpy values and non-finite floats into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj) and obj.ndim == 2:
            return matrix_to_json(obj)
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj
