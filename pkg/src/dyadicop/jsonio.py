"""Shared on-disk JSON format for matrix-valued dyadic step functions.

A function is stored as an object with fields:
    n       resolution (int)
    N       matrix dimension (int)
    values  array of 2**n arrays, each holding N*N [re, im] pairs in
            row-major order, numbers serialized as decimal doubles.

This format is shared by every module and by the CLI.
"""

from __future__ import annotations

import json

import numpy as np

from .core import DyadicMatrixFunction

__all__ = ["function_to_dict", "function_from_dict", "save_function", "load_function"]


def function_to_dict(f: DyadicMatrixFunction) -> dict:
    flat = f.values.reshape(f.atoms, f.dim * f.dim)
    values = [[[float(z.real), float(z.imag)] for z in row] for row in flat]
    return {"n": f.n, "N": f.dim, "values": values}


def function_from_dict(obj: dict) -> DyadicMatrixFunction:
    try:
        n = int(obj["n"])
        dim = int(obj["N"])
        raw = obj["values"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix-function object: {exc}") from exc
    if len(raw) != (1 << n):
        raise ValueError(f"expected {1 << n} atom entries, got {len(raw)}")
    vals = np.empty((1 << n, dim, dim), dtype=np.complex128)
    for j, row in enumerate(raw):
        if len(row) != dim * dim:
            raise ValueError(f"atom {j}: expected {dim * dim} entries, got {len(row)}")
        arr = np.asarray(row, dtype=np.float64)
        vals[j] = (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim)
    return DyadicMatrixFunction(n, dim, vals)


def save_function(f: DyadicMatrixFunction, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(function_to_dict(f), fh)
        fh.write("\n")


def load_function(path) -> DyadicMatrixFunction:
    with open(path, "r", encoding="utf-8") as fh:
        return function_from_dict(json.load(fh))
