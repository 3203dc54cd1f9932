"""JSON file formats. Complex numbers are stored as ``[re, im]`` pairs."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import CoventaError, StateFileError
from .states import DensityMatrix, PureState, make_density, make_pure


def to_pairs(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def _from_pairs(data, field: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"field '{field}' must hold numeric [re, im] pairs") from exc
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise StateFileError(f"field '{field}' must hold [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        return {"dim_a": state.dim_a, "dim_b": state.dim_b, "kind": "pure",
                "data": to_pairs(state.amplitudes)}
    return {"dim_a": state.dim_a, "dim_b": state.dim_b, "kind": "density",
            "data": to_pairs(state.matrix.ravel())}


def state_from_dict(obj) -> DensityMatrix | PureState:
    if not isinstance(obj, dict):
        raise StateFileError("state file must contain a JSON object")
    for key in ("dim_a", "dim_b", "kind", "data"):
        if key not in obj:
            raise StateFileError(f"missing field '{key}'")
    dims = []
    for key in ("dim_a", "dim_b"):
        v = obj[key]
        if not isinstance(v, int) or isinstance(v, bool):
            raise StateFileError(f"field '{key}' must be an integer")
        dims.append(v)
    dim_a, dim_b = dims
    kind = obj["kind"]
    d = dim_a * dim_b
    values = _from_pairs(obj["data"], "data")
    try:
        if kind == "pure":
            if values.shape != (d,):
                raise StateFileError(f"field 'data' must hold {d} pairs for a pure {dim_a}x{dim_b} state, got shape {values.shape}")
            return make_pure(dim_a, dim_b, values)
        if kind == "density":
            # flat row-major or nested rows; both must have exactly d*d entries
            if values.shape not in ((d * d,), (d, d)):
                raise StateFileError(f"field 'data' must hold {d * d} pairs for a {dim_a}x{dim_b} density matrix, got shape {values.shape}")
            return make_density(dim_a, dim_b, values.reshape(d, d))
    except StateFileError:
        raise
    except CoventaError as exc:
        raise StateFileError(f"field 'data': {exc}") from exc
    raise StateFileError(f"field 'kind' must be 'density' or 'pure', got {kind!r}")


def load_state(path) -> DensityMatrix | PureState:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StateFileError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return state_from_dict(obj)


def save_state(state, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state)))


def generator_set_to_dict(gset) -> dict:
    return {
        "dim": gset.dim,
        "provenance": gset.provenance,
        "ops": [to_pairs(op) for op in gset.ops],
        "grouping": [list(g) for g in gset.grouping],
    }


def mub_family_to_dict(family) -> dict:
    """Basis-major, then vector-major; each vector a list of [re, im] pairs."""
    return {
        "dim": family.dim,
        "labels": list(range(family.dim + 1)),
        "bases": [[to_pairs(v) for v in basis.T] for basis in family.bases],
    }
