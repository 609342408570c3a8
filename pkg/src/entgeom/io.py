"""JSON state files and report serialization.

Pure states are stored as {"dims", "labels", "amplitudes": [[re, im], ...]},
density matrices as {"dims", "labels", "matrix": [[[re, im], ...], ...]}.
Floats go through json's repr, the shortest string that round-trips.
"""

from __future__ import annotations

import enum
import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .qstate import DensityMatrix, PureState, make_density_matrix, make_pure_state


def _pairs(values) -> list:
    return [[float(v.real), float(v.imag)] for v in values]


def state_to_dict(obj) -> dict:
    out = {"dims": list(obj.dims), "labels": list(obj.party_labels)}
    if isinstance(obj, PureState):
        out["amplitudes"] = _pairs(obj.amplitudes)
    elif isinstance(obj, DensityMatrix):
        out["matrix"] = [_pairs(row) for row in obj.matrix]
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return out


def _complex_array(data, field: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"field {field!r}: entries must be [re, im] number pairs ({exc})") from None
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise InputError(f"field {field!r}: entries must be [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def state_from_dict(data: dict):
    """Inverse of state_to_dict.  Pure amplitudes are stored normalized and read back as-is."""
    if not isinstance(data, dict) or "dims" not in data:
        raise InputError("state document needs a 'dims' field")
    dims = data["dims"]
    labels = data.get("labels")
    if "amplitudes" in data:
        amps = _complex_array(data["amplitudes"], "amplitudes")
        state = make_pure_state(amps, dims, labels)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) <= 1e-12:
            # keep the stored numbers bit-for-bit
            state = PureState(amps, state.dims, state.party_labels)
        return state
    if "matrix" in data:
        return make_density_matrix(_complex_array(data["matrix"], "matrix"), dims, labels)
    raise InputError("state document needs 'amplitudes' or 'matrix'")


def read_state(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return state_from_dict(data)


def write_state(obj, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(obj), indent=1) + "\n")


def to_jsonable(obj):
    """Recursively convert numpy scalars, arrays, enums and tuples for json."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


def config_hash(config: dict) -> str:
    """sha256 of the canonical JSON form of a config mapping (first 16 hex digits)."""
    canon = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]
