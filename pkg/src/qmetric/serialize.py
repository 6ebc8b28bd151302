"""JSON exchange format for matrices and canonical hashing helpers.

The matrix wire format is ``{"dim": n, "re": [[...]], "im": [[...]]}``;
typed payloads (states, unitaries) add a ``"kind"`` tag.  Field names are
part of the CLI contract and must not change.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .core import DensityState, HermitianMatrix, UnitaryMap, as_matrix
from .errors import InvalidInputError


def matrix_to_json(m, kind: str | None = None) -> dict:
    a = as_matrix(m)
    out = {
        "dim": int(a.shape[0]),
        "re": a.real.tolist(),
        "im": a.imag.tolist(),
    }
    if kind is not None:
        out["kind"] = kind
    return out


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj["im"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad matrix payload: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise InvalidInputError(
            f"matrix payload shape mismatch: dim={dim}, re {re.shape}, im {im.shape}"
        )
    return re + 1j * im


def typed_from_json(obj: dict):
    """Dispatch on the "kind" tag: hermitian, state, or unitary."""
    kind = obj.get("kind", "hermitian")
    m = matrix_from_json(obj)
    if kind == "hermitian":
        return HermitianMatrix(m)
    if kind == "state":
        return DensityState(m)
    if kind == "unitary":
        return UnitaryMap(m)
    raise InvalidInputError(f"unknown matrix kind {kind!r}")


def canonical_dumps(obj) -> str:
    """Deterministic JSON encoding (sorted keys, fixed separators)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def digest(obj) -> str:
    """Short stable hash of any JSON-serializable object."""
    return hashlib.sha256(canonical_dumps(obj).encode()).hexdigest()[:16]
