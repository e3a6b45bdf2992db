"""Finite-blocklength index sets and generator rows.

Rows of the n-fold Kronecker power of the 2x2 lower-triangular kernel are
generated on demand from the block recursion, never by materializing the
full matrix: a leading 0 bit copies the row into the left block, a
leading 1 duplicates it.  Polar sets pick the smallest exact-BEC
Bhattacharyya leaves, Reed-Muller sets pick rows by Hamming weight, and
heavy-set membership runs the exact weight-drift walk on the expansion.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ResourceLimitError
from .expansions import ExpansionSpec, Variant, is_dyadic, real_to_expansion
from .polarization import bec_leaf_values

# Hard cap on materialized matrix cells and single-row length.
_MAX_MATRIX_CELLS = 1 << 26
_MAX_ROW_DEPTH = 26

_MATRIX_MAGIC = b"KPCM"


@dataclass(frozen=True)
class IndexSet:
    """Sorted row indices of the depth-n Kronecker matrix plus metadata.

    ``kind`` is one of "polar" (meta: eps, size), "reed-muller" (meta:
    order) or "heavy" (meta: rho as an exact fraction string).
    """

    n: int
    indices: tuple[int, ...]
    kind: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx):
            raise ValueError("indices must be distinct")
        if idx and not (0 <= idx[0] and idx[-1] < (1 << self.n)):
            raise ValueError(f"indices out of range for depth {self.n}")
        object.__setattr__(self, "indices", idx)

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, **self.meta,
                "indices": list(self.indices)}


@dataclass(frozen=True)
class GeneratorMatrix:
    n: int
    indices: tuple[int, ...]
    rows: np.ndarray  # (len(indices), 2**n) uint8


def kronecker_row(n: int, h: int) -> np.ndarray:
    """Row h of the n-fold Kronecker power, built by the block recursion.

    The row weight is 2**popcount(h).
    """
    if n < 0:
        raise ValueError(f"depth must be >= 0, got {n}")
    if not 0 <= h < (1 << n):
        raise ValueError(f"row index {h} out of range for depth {n}")
    if n > _MAX_ROW_DEPTH:
        raise ResourceLimitError(f"2^{n}-length row exceeds the budget")
    row = np.ones(1, dtype=np.uint8)
    for l in range(n):
        # Bit l counted from the least significant end is applied first.
        if (h >> l) & 1:
            row = np.concatenate([row, row])
        else:
            row = np.concatenate([row, np.zeros(row.size, dtype=np.uint8)])
    return row


def row_weight(n: int, h: int) -> int:
    """Hamming weight of row h without generating it: 2**popcount(h)."""
    if not 0 <= h < (1 << n):
        raise ValueError(f"row index {h} out of range for depth {n}")
    return 1 << int(h).bit_count()


def polar_index_set(eps: float, n: int, size: int) -> IndexSet:
    """Indices of the ``size`` smallest exact-BEC leaf values at depth n.

    Ties are broken by ascending index, so the selection is stable.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if not 0 <= size <= (1 << n):
        raise ValueError(f"size must lie in [0, 2^{n}], got {size}")
    z = bec_leaf_values(eps, n)
    order = np.argsort(z, kind="stable")
    chosen = np.sort(order[:size])
    return IndexSet(n=n, indices=tuple(int(i) for i in chosen), kind="polar",
                    meta={"eps": eps, "size": size})


def rm_index_set(order: int, n: int) -> IndexSet:
    """Reed-Muller index set: rows with weight >= 2^(n - order).

    Equivalently indices h with popcount(h) >= n - order; the set size is
    the binomial tail sum.
    """
    if not 0 <= order <= n:
        raise ValueError(f"order must lie in [0, {n}], got {order}")
    if n > _MAX_ROW_DEPTH:
        raise ResourceLimitError(f"enumerating 2^{n} indices exceeds the budget")
    need = n - order
    idx = tuple(h for h in range(1 << n) if int(h).bit_count() >= need)
    return IndexSet(n=n, indices=idx, kind="reed-muller", meta={"order": order})


def generator_matrix(index_set: IndexSet) -> GeneratorMatrix:
    """Submatrix of the Kronecker power given by the index set, rows in
    ascending index order."""
    cells = len(index_set.indices) << index_set.n
    if cells > _MAX_MATRIX_CELLS:
        raise ResourceLimitError(
            f"{len(index_set.indices)} x 2^{index_set.n} matrix exceeds the budget")
    if index_set.indices:
        rows = np.stack([kronecker_row(index_set.n, h) for h in index_set.indices])
    else:
        rows = np.zeros((0, 1 << index_set.n), dtype=np.uint8)
    return GeneratorMatrix(n=index_set.n, indices=index_set.indices, rows=rows)


def _expansion_is_heavy(spec: ExpansionSpec, rho: Fraction) -> bool:
    """Heavy test for one expansion: sign of the per-period weight drift,
    with the drift-zero case decided by the recurring window minimum."""
    period = spec.period if spec.period else (0,)
    k = len(period)
    drift = Fraction(sum(period)) - rho * k
    if drift > 0:
        return True
    if drift < 0:
        return False
    # Zero drift: the walk w(b^m) - rho*m is periodic beyond the preamble,
    # so the liminf is the minimum over one full recurring window.  Values
    # inside the preamble occur once and cannot move a liminf.
    w = sum(spec.preamble)
    m = len(spec.preamble)
    for bit in period:
        w += bit
        m += 1
        if Fraction(w) - rho * m < 0:
            return False
    return True


def heavy_membership(x: Fraction | int | str, rho: Fraction | int | str) -> bool:
    """Is x in the heavy set for exponent rho?

    Membership is existential over the expansions of x, so both dyadic
    forms are consulted.  rho must be an exact rational: the drift-zero
    boundary (where the interesting cases live) is destroyed by floats.
    """
    x = Fraction(x)
    rho = Fraction(rho)
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if not 0 <= rho <= 1:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    specs = [real_to_expansion(x, Variant.TERMINATING)]
    if is_dyadic(x):
        other = real_to_expansion(x, Variant.NON_TERMINATING)
        if other != specs[0]:
            specs.append(other)
    return any(_expansion_is_heavy(spec, rho) for spec in specs)


def heavy_index_set(rho: Fraction | int | str, n: int) -> IndexSet:
    """Depth-n finite shadow of the heavy set: rows with weight drift
    popcount(h) - rho*n >= 0."""
    rho = Fraction(rho)
    if n > _MAX_ROW_DEPTH:
        raise ResourceLimitError(f"enumerating 2^{n} indices exceeds the budget")
    idx = tuple(h for h in range(1 << n)
                if Fraction(int(h).bit_count()) - rho * n >= 0)
    return IndexSet(n=n, indices=idx, kind="heavy", meta={"rho": str(rho)})


def matrix_to_text(gm: GeneratorMatrix) -> str:
    """One '0'/'1' row per line."""
    return "\n".join("".join(str(int(b)) for b in row) for row in gm.rows) + "\n"


def matrix_to_bytes(gm: GeneratorMatrix) -> bytes:
    """Binary export: magic "KPCM", u32 depth, u32 row count, then rows
    packed as little-endian bit blocks."""
    header = _MATRIX_MAGIC + struct.pack("<II", gm.n, len(gm.indices))
    packed = np.packbits(gm.rows, axis=-1, bitorder="little").tobytes()
    return header + packed


def matrix_from_bytes(blob: bytes) -> GeneratorMatrix:
    """Inverse of :func:`matrix_to_bytes` (indices are not stored and come
    back empty)."""
    if blob[:4] != _MATRIX_MAGIC:
        raise ValueError("bad magic; not a packed Kronecker matrix")
    n, count = struct.unpack("<II", blob[4:12])
    width = 1 << n
    bytes_per_row = (width + 7) // 8
    body = np.frombuffer(blob[12:], dtype=np.uint8)
    if body.size != count * bytes_per_row:
        raise ValueError("truncated matrix payload")
    rows = np.unpackbits(body.reshape(count, bytes_per_row), axis=-1,
                         bitorder="little")[:, :width]
    return GeneratorMatrix(n=n, indices=(), rows=rows)


def index_set_to_json(index_set: IndexSet) -> str:
    return json.dumps(index_set.to_json())
