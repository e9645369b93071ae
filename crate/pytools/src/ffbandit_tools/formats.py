"""Readers and writers for the plain-text dataset files.

All indices are 0-based and blank lines are ignored.

* matrix: header ``N d``, then ``row col value`` per nonzero
* labels: one category name per matrix row
* annotations: ``name: j1 j2 ...`` per category
* vocabulary: one token per feature index
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp


class FormatError(ValueError):
    pass


def _lines(path: Path):
    with open(path, encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            if line.strip():
                yield number, line.rstrip("\n")


def write_matrix(path: Path, matrix: sp.spmatrix) -> None:
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{coo.shape[0]} {coo.shape[1]}\n")
        for i in order:
            if coo.data[i] != 0.0:
                f.write(f"{coo.row[i]} {coo.col[i]} {float(coo.data[i])!r}\n")


def read_matrix(path: Path) -> sp.csr_matrix:
    lines = _lines(Path(path))
    try:
        number, header = next(lines)
    except StopIteration:
        raise FormatError(f"{path}: empty matrix file") from None
    parts = header.split()
    if len(parts) != 2:
        raise FormatError(f"{path}:{number}: expected header `N d`")
    n, d = (int(p) for p in parts)
    rows, cols, vals = [], [], []
    for number, line in lines:
        parts = line.split()
        if len(parts) != 3:
            raise FormatError(f"{path}:{number}: expected `row col value`")
        r, c, v = int(parts[0]), int(parts[1]), float(parts[2])
        if not (0 <= r < n and 0 <= c < d):
            raise FormatError(f"{path}:{number}: entry ({r}, {c}) outside {n}x{d}")
        rows.append(r)
        cols.append(c)
        vals.append(v)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, d))


def write_lines(path: Path, items: Sequence[str]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for item in items:
            if not item or any(ch.isspace() for ch in item):
                raise FormatError(f"{path}: entry {item!r} is empty or contains whitespace")
            f.write(f"{item}\n")


def read_lines(path: Path) -> list[str]:
    return [line.strip() for _, line in _lines(Path(path))]


def write_annotations(path: Path, annotations: Mapping[str, Sequence[int]], dim: int) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for name, features in annotations.items():
            check_annotation(name, features, dim)
            f.write(f"{name}: {' '.join(str(j) for j in sorted(features))}\n")


def check_annotation(name: str, features: Sequence[int], dim: int) -> None:
    if not name or ":" in name or any(ch.isspace() for ch in name):
        raise FormatError(f"invalid category name {name!r}")
    if len(set(features)) != len(features):
        raise FormatError(f"category {name}: duplicate feature indices")
    bad = [j for j in features if not 0 <= j < dim]
    if bad:
        raise FormatError(f"category {name}: indices {bad[:5]} outside [0, {dim})")


def read_annotations(path: Path, dim: int) -> dict[str, list[int]]:
    out: dict[str, list[int]] = {}
    for number, line in _lines(Path(path)):
        name, sep, rest = line.partition(":")
        if not sep:
            raise FormatError(f"{path}:{number}: expected `name: j1 j2 ...`")
        name = name.strip()
        if name in out:
            raise FormatError(f"{path}:{number}: category {name} listed twice")
        features = [int(tok) for tok in rest.split()]
        try:
            check_annotation(name, features, dim)
        except FormatError as e:
            raise FormatError(f"{path}:{number}: {e}") from None
        out[name] = features
    return out
