"""JSON encoding shared by every artifact.

A complex scalar is ``[re, im]``, a matrix is a row-major list of rows, a
density matrix is ``{"dim": n, "entries": matrix}``, a POVM is a list of
matrices and a channel is ``{"dim": n, "kraus": [matrix, ...]}``. Plain real
numbers are accepted on input wherever a complex scalar is expected.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import KrausChannel
from .errors import QfidError, SchemaError
from .measurement import Povm
from .states import as_density


def complex_to_json(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_to_json(m) -> list:
    arr = np.asarray(m, dtype=complex)
    return [[complex_to_json(z) for z in row] for row in arr]


def _scalar(value, where: str) -> complex:
    if isinstance(value, bool):
        raise SchemaError(f"{where}: expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        return complex(value[0], value[1])
    raise SchemaError(f"{where}: expected a number or [re, im], got {value!r}")


def matrix_from_json(obj, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise SchemaError(f"{where}: expected a nonempty list of rows")
    n = len(obj)
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"{where}[{i}]: expected a row of length {n}")
        for j, val in enumerate(row):
            out[i, j] = _scalar(val, f"{where}[{i}][{j}]")
    return out


def density_to_json(rho) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {"dim": int(rho.shape[0]), "entries": matrix_to_json(rho)}


def density_from_json(obj, where: str = "density") -> np.ndarray:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object with 'dim' and 'entries'")
    for key in ("dim", "entries"):
        if key not in obj:
            raise SchemaError(f"{where}: missing field '{key}'")
    dim = obj["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SchemaError(f"{where}.dim: expected a positive integer, got {dim!r}")
    rho = matrix_from_json(obj["entries"], f"{where}.entries")
    if rho.shape[0] != dim:
        raise SchemaError(f"{where}.entries: {rho.shape[0]} rows but dim is {dim}")
    try:
        return as_density(rho, where)
    except QfidError as exc:
        raise SchemaError(f"{where}.entries: {exc}") from None


def povm_to_json(povm: Povm) -> list:
    return [matrix_to_json(e) for e in povm.effects]


def povm_from_json(obj, where: str = "povm") -> Povm:
    if isinstance(obj, dict) and "effects" in obj:
        obj = obj["effects"]
        where = f"{where}.effects"
    if not isinstance(obj, list) or not obj:
        raise SchemaError(f"{where}: expected a nonempty list of matrices")
    effects = [matrix_from_json(m, f"{where}[{k}]") for k, m in enumerate(obj)]
    try:
        return Povm(effects)
    except QfidError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def channel_to_json(ch: KrausChannel) -> dict:
    return {"dim": ch.dim, "kraus": [matrix_to_json(k) for k in ch.kraus_ops]}


def channel_from_json(obj, where: str = "channel") -> KrausChannel:
    if not isinstance(obj, dict) or "kraus" not in obj:
        raise SchemaError(f"{where}: expected an object with 'dim' and 'kraus'")
    ops = obj["kraus"]
    if not isinstance(ops, list) or not ops:
        raise SchemaError(f"{where}.kraus: expected a nonempty list of matrices")
    mats = [matrix_from_json(m, f"{where}.kraus[{i}]") for i, m in enumerate(ops)]
    if "dim" in obj and obj["dim"] != mats[0].shape[0]:
        raise SchemaError(f"{where}.dim: {obj['dim']!r} does not match operator size")
    try:
        return KrausChannel(mats)
    except QfidError as exc:
        raise SchemaError(f"{where}.kraus: {exc}") from None


def load_json(path) -> object:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise SchemaError(f"{p}: cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{p}: invalid JSON at line {exc.lineno} column {exc.colno}") from None


def dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
