"""Polarization thresholds for rationals and bit prefixes.

The recurring part of a binary expansion drives an iterated function
system z -> p_period(z) with attracting fixed points at 0 and 1.  The
interior (repelling) fixed point of that map, pulled back through the
preamble map, is the critical BEC erasure probability below which the
channel indexed by x polarizes to perfect and above which to useless.

Interior uniqueness is an open problem; the scan reports every interior
crossing it finds and flags multiplicity instead of assuming uniqueness.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import TrivialPeriodError, UnresolvedError
from .expansions import is_dyadic, real_to_expansion
from .polarization import apply_path, apply_path_array

DEFAULT_SCAN_RESOLUTION = 1 << 12
MIN_SCAN_RESOLUTION = 1 << 10

# Half-width of the band around theta where a BEC is not claimed either
# way; matches the bisection tolerance.
NON_POLARIZED_BAND = 1e-10

_STABILITY_PROBE = 1e-6
_ROOT_MERGE_TOL = 1e-9


class Stability(Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    NEUTRAL = "neutral"


class Certainty(Enum):
    EXACT_BEC = "exact-bec"
    PREFIX_ESTIMATE = "prefix-estimate"


class BecClass(Enum):
    GOOD = "good"
    BAD = "bad"
    NON_POLARIZED = "non-polarized"
    BOTH_GOOD_AND_BAD = "both-good-and-bad"


@dataclass(frozen=True)
class FixedPoint:
    location: float
    stability: Stability


@dataclass(frozen=True)
class FixedPointReport:
    period: tuple[int, ...]
    fixed_points: tuple[FixedPoint, ...]
    interior_unique: bool

    @property
    def interior(self) -> tuple[FixedPoint, ...]:
        return tuple(fp for fp in self.fixed_points if 0.0 < fp.location < 1.0)


@dataclass(frozen=True)
class ThresholdResult:
    x: Fraction
    theta: float
    certainty: Certainty
    multiplicity_flag: bool


def _check_bits(bits: Sequence[int]) -> tuple[int, ...]:
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ValueError(f"bits must be 0/1, got {bits!r}")
    return out


def _path_value_and_derivative(z: float, bits: Sequence[int]) -> tuple[float, float]:
    """Forward-mode evaluation of (p(z), p'(z)) along the bit path."""
    v, dv = z, 1.0
    for b in bits:
        if b:
            dv = 2.0 * v * dv
            v = v * v
        else:
            dv = (2.0 - 2.0 * v) * dv
            v = v * (2.0 - v)
    return v, dv


def _bisect_root(bits: tuple[int, ...], lo: float, hi: float,
                 d_lo: float) -> float:
    """Root of p(z) - z inside a sign-change bracket, polished by Newton."""
    sign_lo = d_lo < 0
    for _ in range(200):
        if hi - lo <= 1e-15:
            break
        mid = 0.5 * (lo + hi)
        d = apply_path(mid, bits) - mid
        if d == 0.0:
            return mid
        if (d < 0) == sign_lo:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    for _ in range(3):
        v, dv = _path_value_and_derivative(root, bits)
        denom = dv - 1.0
        if denom == 0.0:
            break
        step = (v - root) / denom
        cand = root - step
        if not lo <= cand <= hi:
            break
        root = cand
    return root


def period_fixed_points(period: Sequence[int],
                        scan_resolution: int = DEFAULT_SCAN_RESOLUTION
                        ) -> FixedPointReport:
    """Locate all fixed points of the period map on [0,1].

    Interior crossings of p(z) - z are bracketed by sign changes on a
    uniform grid and refined by bisection; the endpoints 0 and 1 are
    always attracting for non-trivial periods (vanishing derivatives).
    Stability of interior points is read off the sign of p(z) - z on
    either side.  Near-tangential pairs closer than the grid step can be
    missed; raise ``scan_resolution`` for suspicious periods.
    """
    period = _check_bits(period)
    if not period or 0 not in period or 1 not in period:
        raise TrivialPeriodError(
            f"period {period!r} has no interior fixed point; only the "
            "endpoints 0 and 1 remain")
    if scan_resolution < MIN_SCAN_RESOLUTION:
        raise ValueError(f"scan_resolution must be >= {MIN_SCAN_RESOLUTION}")

    grid = np.linspace(0.0, 1.0, scan_resolution + 1)[1:-1]
    d = apply_path_array(grid, period) - grid

    roots: list[float] = []
    brackets: list[tuple[float, float, float]] = []
    if d[0] > 0:
        brackets.append((1e-300, float(grid[0]), -1.0))
    for i in range(len(grid) - 1):
        if d[i] == 0.0:
            roots.append(float(grid[i]))
        elif d[i] * d[i + 1] < 0:
            brackets.append((float(grid[i]), float(grid[i + 1]), float(d[i])))
    if d[-1] == 0.0:
        roots.append(float(grid[-1]))
    elif d[-1] < 0:
        brackets.append((float(grid[-1]), 1.0 - 1e-12, float(d[-1])))

    for lo, hi, d_lo in brackets:
        roots.append(_bisect_root(period, lo, hi, d_lo))

    roots.sort()
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > _ROOT_MERGE_TOL:
            merged.append(r)

    interior = [FixedPoint(r, _classify_stability(r, period)) for r in merged]
    points = (FixedPoint(0.0, Stability.ATTRACTING), *interior,
              FixedPoint(1.0, Stability.ATTRACTING))
    return FixedPointReport(period=period, fixed_points=points,
                            interior_unique=len(interior) == 1)


def _classify_stability(root: float, period: tuple[int, ...]) -> Stability:
    left = max(root - _STABILITY_PROBE, 0.5 * root)
    right = min(root + _STABILITY_PROBE, 0.5 * (1.0 + root))
    d_left = apply_path(left, period) - left
    d_right = apply_path(right, period) - right
    if d_left > 0 and d_right < 0:
        return Stability.ATTRACTING
    if d_left < 0 and d_right > 0:
        return Stability.REPELLING
    return Stability.NEUTRAL


def _solve_preamble(preamble: tuple[int, ...], zeta: float) -> float:
    """Unique eps with p_preamble(eps) = zeta; p is increasing with
    p(0) = 0 and p(1) = 1."""
    lo, hi = 0.0, 1.0
    for _ in range(200):
        if hi - lo <= 1e-16:
            break
        mid = 0.5 * (lo + hi)
        if apply_path(mid, preamble) < zeta:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=None)
def _threshold_cached(x: Fraction, scan_resolution: int) -> ThresholdResult:
    if is_dyadic(x):
        return ThresholdResult(x, 1.0, Certainty.EXACT_BEC, False)
    spec = real_to_expansion(x)
    report = period_fixed_points(spec.period, scan_resolution)
    interior = report.interior
    multiplicity = not report.interior_unique
    zeta = interior[-1].location if multiplicity else interior[0].location
    if spec.preamble:
        theta = _solve_preamble(spec.preamble, zeta)
    else:
        theta = zeta
    return ThresholdResult(x, theta, Certainty.EXACT_BEC, multiplicity)


def threshold_of_rational(x: Fraction | int | str,
                          scan_resolution: int = DEFAULT_SCAN_RESOLUTION
                          ) -> ThresholdResult:
    """Exact-BEC polarization threshold of a rational in [0,1].

    Dyadic rationals always have threshold 1 (their non-terminating
    expansion squares the Bhattacharyya parameter away).  Otherwise the
    threshold is the preimage, under the preamble map, of the interior
    fixed point of the period map.
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    return _threshold_cached(x, scan_resolution)


def threshold_estimate(prefix: Sequence[int], iter_budget: int = 10_000,
                       delta: float = 1e-9) -> float:
    """Bisection estimate of the threshold of an infinite sequence seen
    only through a finite prefix.

    The continuation is taken to repeat the full prefix, which makes the
    estimate the threshold of the rational whose expansion period is the
    prefix; the paper-level object is defined for full infinite sequences
    only, so this is a plotting approximation.  Classification iterates
    the prefix map and decides once the orbit is trapped below ``delta``
    or above ``1 - delta``.
    """
    prefix = _check_bits(prefix)
    if not prefix:
        raise ValueError("prefix must contain at least one bit")
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 0.5), got {delta}")

    def classify(eps: float) -> int:
        v = apply_path(eps, prefix)
        for _ in range(iter_budget):
            w = apply_path(v, prefix)
            if v < delta and w <= v:
                return 0
            if v > 1.0 - delta and w >= v:
                return 1
            v = w
        if v < delta:
            return 0
        if v > 1.0 - delta:
            return 1
        return -1

    if classify(0.0) != 0 or classify(1.0) != 1:
        raise UnresolvedError(
            "classification failed at the bisection endpoints; raise "
            "iter_budget or delta")
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        side = classify(mid)
        if side == 0:
            lo = mid
        elif side == 1:
            hi = mid
        else:
            # Orbit pinned at the threshold itself; mid is the answer.
            return mid
    return 0.5 * (lo + hi)


def _apply_rows(v: np.ndarray, prefixes: np.ndarray) -> np.ndarray:
    out = v.copy()
    for j in range(prefixes.shape[1]):
        bit = prefixes[:, j] != 0
        out = np.where(bit, out * out, out * (2.0 - out))
    return out


def _classify_batch(eps: np.ndarray, prefixes: np.ndarray, iter_budget: int,
                    delta: float) -> np.ndarray:
    res = np.full(eps.size, -1, dtype=np.int8)
    idx = np.arange(eps.size)
    rows = prefixes
    v = _apply_rows(eps, rows)
    for _ in range(iter_budget):
        if idx.size == 0:
            break
        w = _apply_rows(v, rows)
        low = (v < delta) & (w <= v)
        high = (v > 1.0 - delta) & (w >= v)
        done = low | high
        if done.any():
            res[idx[low]] = 0
            res[idx[high]] = 1
            keep = ~done
            idx, v, rows = idx[keep], w[keep], rows[keep]
        else:
            v = w
    res[idx[v < delta]] = 0
    res[idx[v > 1.0 - delta]] = 1
    return res


def threshold_estimate_batch(prefixes: np.ndarray, iter_budget: int = 10_000,
                             delta: float = 1e-9) -> np.ndarray:
    """Vectorized ``threshold_estimate`` over rows of a 0/1 matrix.

    Same algorithm and same results as the scalar version, row by row;
    used for fractal-plot grids where thousands of prefixes are bisected
    in lockstep.
    """
    rows = np.ascontiguousarray(np.asarray(prefixes, dtype=np.uint8))
    if rows.ndim != 2 or rows.shape[1] == 0:
        raise ValueError("prefixes must be a non-empty 2-d bit matrix")
    m = rows.shape[0]
    lo = np.zeros(m)
    hi = np.ones(m)
    out = np.full(m, np.nan)
    active = np.arange(m)
    for _ in range(60):
        mid = 0.5 * (lo[active] + hi[active])
        cls = _classify_batch(mid, rows[active], iter_budget, delta)
        pinned = cls < 0
        out[active[pinned]] = mid[pinned]
        went_low = cls == 0
        went_high = cls == 1
        lo[active[went_low]] = mid[went_low]
        hi[active[went_high]] = mid[went_high]
        active = active[~pinned]
        if active.size == 0:
            break
    out[active] = 0.5 * (lo[active] + hi[active])
    return out


def verify_symmetry(x: Fraction | int | str) -> tuple[float, float, float]:
    """Thresholds of x and 1-x plus the defect |theta(x)+theta(1-x)-1|.

    The complement relation holds for non-dyadic x only, so dyadic input
    is a domain error.
    """
    x = Fraction(x)
    if is_dyadic(x):
        raise ValueError("symmetry relation excludes dyadic rationals")
    theta_x = threshold_of_rational(x).theta
    theta_1mx = threshold_of_rational(1 - x).theta
    return theta_x, theta_1mx, abs(theta_x + theta_1mx - 1.0)


def classify_bec_channel(x: Fraction | int | str, eps: float) -> BecClass:
    """Good/bad classification of the channel indexed by x on a BEC(eps).

    Dyadic x is both good and bad (two expansions, one of each).  Within
    ``NON_POLARIZED_BAND`` of the threshold no claim is made: the orbit
    started exactly at the interior fixed point stays there forever.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if is_dyadic(x):
        return BecClass.BOTH_GOOD_AND_BAD
    theta = threshold_of_rational(x).theta
    if eps < theta - NON_POLARIZED_BAND:
        return BecClass.GOOD
    if eps > theta + NON_POLARIZED_BAND:
        return BecClass.BAD
    return BecClass.NON_POLARIZED
