"""JSON state files: named subsystem groups plus a dense complex matrix.

Format:
{
  "subsystems": [{"name": "A", "dims": [2, 2]}, {"name": "E", "dims": [4]}],
  "normalized": true,
  "matrix": [[[re, im], ...], ...]   # row-major, one [re, im] pair per entry
}

Floats go through json's repr-based serialization, so write/read round-trips
are bit-identical.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import DimMismatch
from .qstates import DensityOperator


class StateFileError(Exception):
    pass


def write_state(path, dens: DensityOperator, groups=None):
    """groups maps name -> number of leading subsystems it spans; defaults to
    one group per subsystem labelled S0, S1, ..."""
    dims = list(dens.dims)
    subsystems = []
    if groups is None:
        groups = {f"S{i}": 1 for i in range(len(dims))}
    pos = 0
    for name, count in groups.items():
        subsystems.append({"name": name, "dims": dims[pos:pos + count]})
        pos += count
    if pos != len(dims):
        raise DimMismatch(f"groups cover {pos} of {len(dims)} subsystems")
    mat = dens.matrix
    payload = {
        "subsystems": subsystems,
        "normalized": bool(dens.normalized),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in mat],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def read_state(path):
    """Returns (DensityOperator, group_dims) where group_dims maps each named
    group to its total dimension, in file order."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise StateFileError(f"cannot parse state file {path}: {exc}") from exc
    try:
        subsystems = payload["subsystems"]
        dims = []
        group_dims = {}
        for sub in subsystems:
            sub_dims = [int(x) for x in sub["dims"]]
            dims.extend(sub_dims)
            group_dims[sub["name"]] = int(np.prod(sub_dims))
        rows = payload["matrix"]
        mat = np.array([[complex(re, im) for re, im in row] for row in rows])
        dens = DensityOperator(mat, tuple(dims),
                               normalized=bool(payload.get("normalized", True)))
    except (KeyError, TypeError, ValueError) as exc:
        raise StateFileError(f"malformed state file {path}: {exc}") from exc
    try:
        dens.validate()
    except Exception as exc:
        raise StateFileError(f"state file {path} violates invariants: {exc}") from exc
    return dens, group_dims
