"""One-step polarization transforms and their compositions along bit paths.

The worse/better transforms act on Bhattacharyya parameters z in [0,1].
For a binary erasure channel both steps are exact (z is the erasure
probability); for any other binary-input channel the worse step only gives
an upper bound, which the ``Exactness`` flag tracks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from .errors import ResourceLimitError

# Largest depth for which a full leaf array is materialized (2**24 values).
MAX_LEAF_LIST_DEPTH = 24

# Depth of the vectorized sub-trees used by the streaming enumeration.
_CHUNK_DEPTH = 20

_DOMAIN_TOL = 1e-12


def _check_unit(z: float, name: str = "z") -> float:
    """Validate z in [0,1] up to 1e-12 slack, clamping roundoff excess."""
    z = float(z)
    if not (-_DOMAIN_TOL <= z <= 1.0 + _DOMAIN_TOL) or z != z:
        raise ValueError(f"{name} must lie in [0, 1], got {z!r}")
    return min(max(z, 0.0), 1.0)


class Exactness(Enum):
    BEC_EXACT = "bec-exact"
    UPPER_BOUND = "upper-bound"


@dataclass(frozen=True)
class ChannelState:
    """Bhattacharyya value of a binary-input channel.

    ``BEC_EXACT`` means z is the erasure probability of an actual BEC, so
    both transforms stay exact and capacity is 1 - z.  ``UPPER_BOUND``
    means z only dominates the true Bhattacharyya parameter.
    """

    z: float
    exactness: Exactness = Exactness.BEC_EXACT

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", _check_unit(self.z))

    @property
    def capacity(self) -> float:
        if self.exactness is not Exactness.BEC_EXACT:
            raise ValueError("capacity accessor requires an exact BEC state")
        return 1.0 - self.z

    def worse(self) -> "ChannelState":
        return ChannelState(worse_transform(self.z), self.exactness)

    def better(self) -> "ChannelState":
        return ChannelState(better_transform(self.z), self.exactness)


@dataclass(frozen=True)
class PathEvolution:
    """Trace of Bhattacharyya values along one combining/splitting path."""

    initial: float
    bits: tuple[int, ...]
    trace: tuple[float, ...]

    @property
    def final(self) -> float:
        return self.trace[-1] if self.trace else self.initial


def worse_transform(z: float) -> float:
    """Map z to 2z - z^2 (bit 0, the degraded branch)."""
    z = _check_unit(z)
    return z * (2.0 - z)


def better_transform(z: float) -> float:
    """Map z to z^2 (bit 1, the upgraded branch)."""
    z = _check_unit(z)
    return z * z


def _check_bits(bits: Sequence[int]) -> tuple[int, ...]:
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ValueError(f"bits must be 0/1, got {bits!r}")
    return out


def apply_path(z: float, bits: Sequence[int]) -> float:
    """Evaluate the composition of one-step maps along ``bits``.

    The first bit is applied first (innermost).  Evaluation always
    iterates the one-step maps; the composed polynomial is never expanded.
    """
    v = _check_unit(z)
    for b in bits:
        v = v * v if b else v * (2.0 - v)
    return v


def apply_path_array(z: np.ndarray, bits: Sequence[int]) -> np.ndarray:
    """Vectorized ``apply_path`` over an array of z values."""
    v = np.asarray(z, dtype=np.float64).copy()
    for b in bits:
        if b:
            np.multiply(v, v, out=v)
        else:
            v *= 2.0 - v
    return v


def evolve(z0: float, bits: Sequence[int]) -> PathEvolution:
    """Evolve z0 along ``bits``, recording the value after every step."""
    bits = _check_bits(bits)
    v = _check_unit(z0)
    trace = []
    for b in bits:
        v = v * v if b else v * (2.0 - v)
        trace.append(v)
    return PathEvolution(initial=_check_unit(z0), bits=bits, trace=tuple(trace))


def _expand_leaves(z: np.ndarray, depth: int) -> np.ndarray:
    """Split every value ``depth`` more times, keeping first-bit-major order."""
    for _ in range(depth):
        nxt = np.empty(2 * z.size, dtype=np.float64)
        nxt[0::2] = z * (2.0 - z)
        nxt[1::2] = z * z
        z = nxt
    return z


def bec_leaf_values(eps: float, n: int) -> np.ndarray:
    """All 2^n exact BEC Bhattacharyya values at depth n.

    Leaf index reads the path as a binary number with the first-applied
    bit as the most significant bit, so leaf index equals the Kronecker
    row index of the path.  Raises ResourceLimitError past depth 24;
    use :func:`bec_leaf_chunks` for streaming statistics beyond that.
    """
    eps = _check_unit(eps, "eps")
    if n < 0:
        raise ValueError(f"depth must be >= 0, got {n}")
    if n > MAX_LEAF_LIST_DEPTH:
        raise ResourceLimitError(
            f"2^{n} leaves exceed the list budget (depth <= {MAX_LEAF_LIST_DEPTH}); "
            "use bec_leaf_chunks")
    return _expand_leaves(np.array([eps], dtype=np.float64), n)


def bec_leaf_chunks(eps: float, n: int,
                    chunk_depth: int = _CHUNK_DEPTH) -> Iterator[np.ndarray]:
    """Yield the depth-n leaf values in index order, in bounded chunks.

    Each chunk is the sub-tree below one prefix of the first ``n -
    chunk_depth`` bits, so memory stays at 2^chunk_depth floats while the
    full multiset is folded exactly once.
    """
    eps = _check_unit(eps, "eps")
    if n < 0:
        raise ValueError(f"depth must be >= 0, got {n}")
    if n <= chunk_depth:
        yield bec_leaf_values(eps, n)
        return
    prefix_len = n - chunk_depth
    for j in range(1 << prefix_len):
        bits = [(j >> (prefix_len - 1 - i)) & 1 for i in range(prefix_len)]
        z0 = apply_path(eps, bits)
        yield _expand_leaves(np.array([z0], dtype=np.float64), chunk_depth)
