"""Numerical verification of the measure, dimension and self-similarity
claims at desk scale.

Nothing here estimates a Hausdorff dimension directly (samples cannot);
the module produces the computable witnesses: leaf-fraction trends toward
the Lebesgue measures, the entropy lower-bound count, exact zero-crossing
distributions of the centered weight walk, and order/implication checks
for the quasi self-similar inclusions.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .codes import heavy_membership
from .errors import ResourceLimitError
from .polarization import MAX_LEAF_LIST_DEPTH, bec_leaf_chunks
from .thresholds import threshold_of_rational
from .expansions import is_dyadic

# Fixed Monte Carlo chunk so results never depend on the thread count:
# chunk i always draws from the Philox stream jumped by i.
_CHUNK_TRIALS = 1 << 14

_MAX_EXHAUSTIVE_WALK = 25


@dataclass(frozen=True)
class MeasureEstimate:
    eps: float
    depth: int
    delta_good: float
    delta_bad: float
    fraction_good: float
    fraction_bad: float
    fraction_unresolved: float


@dataclass(frozen=True)
class WalkStats:
    """Zero-crossing counts of the centered weight walk.

    In exhaustive mode the counts enumerate all 2^n bit strings and the
    probabilities are exact rationals with denominator 2^n.
    """

    n: int
    counts_by_crossings: dict[int, int]
    total: int
    mode: str
    seed: int | None = None

    def probability(self, r: int) -> Fraction:
        return Fraction(self.counts_by_crossings.get(r, 0), self.total)

    def cumulative(self, r: int) -> Fraction:
        got = sum(c for k, c in self.counts_by_crossings.items() if k <= r)
        return Fraction(got, self.total)

    @property
    def max_crossings(self) -> int:
        return max(self.counts_by_crossings) if self.counts_by_crossings else 0


@dataclass(frozen=True)
class ThresholdOrderViolation:
    x: Fraction
    n: int
    k: int
    theta_left: float
    theta: float
    theta_right: float
    defect: float


@dataclass(frozen=True)
class HeavyImplicationViolation:
    x: Fraction
    rho: Fraction
    n: int
    k: int
    member_left: bool
    member: bool
    member_right: bool


def _mc_accumulate(trials: int, seed: int, threads: int,
                   worker: Callable[[np.random.Generator, int], np.ndarray]
                   ) -> np.ndarray:
    """Run ``worker`` over fixed-size Philox chunks and sum the results.

    Chunk i uses the stream jumped by i from the seed key, so the total is
    reproducible bit for bit regardless of ``threads``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if seed is None:
        raise ValueError("a seed is required for Monte Carlo reproducibility")
    jobs = []
    done = 0
    while done < trials:
        count = min(_CHUNK_TRIALS, trials - done)
        jobs.append((len(jobs), count))
        done += count

    def run(job: tuple[int, int]) -> np.ndarray:
        i, count = job
        rng = np.random.Generator(np.random.Philox(key=seed).jumped(i))
        return worker(rng, count)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    out = results[0].copy()
    for r in results[1:]:
        out += r
    return out


def measure_scan(eps: float, depths: Sequence[int], delta: float = 1e-3,
                 mc_trials: int | None = None, seed: int | None = None,
                 threads: int = 1) -> list[MeasureEstimate]:
    """Fraction of depth-n channels already close to perfect or useless.

    A leaf counts as good when z <= delta and bad when z >= 1 - delta.
    Depths up to 24 are enumerated exhaustively (streamed, exact counts);
    beyond that paths are Monte Carlo sampled, which requires ``mc_trials``
    and ``seed``.  The fractions trend toward 1 - eps and eps.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 0.5), got {delta}")
    out = []
    for n in depths:
        if n < 0:
            raise ValueError(f"depth must be >= 0, got {n}")
        if n <= MAX_LEAF_LIST_DEPTH:
            good = bad = 0
            total = 1 << n
            for z in bec_leaf_chunks(eps, n):
                good += int((z <= delta).sum())
                bad += int((z >= 1.0 - delta).sum())
        else:
            if mc_trials is None:
                raise ResourceLimitError(
                    f"depth {n} needs Monte Carlo sampling; pass mc_trials and seed")

            def worker(rng: np.random.Generator, count: int) -> np.ndarray:
                z = np.full(count, eps)
                for _ in range(n):
                    bit = rng.integers(0, 2, size=count, dtype=np.uint8) == 1
                    z = np.where(bit, z * z, z * (2.0 - z))
                return np.array([(z <= delta).sum(), (z >= 1.0 - delta).sum()],
                                dtype=np.int64)

            good, bad = (int(v) for v in _mc_accumulate(mc_trials, seed,
                                                        threads, worker))
            total = mc_trials
        out.append(MeasureEstimate(
            eps=eps, depth=n, delta_good=delta, delta_bad=delta,
            fraction_good=good / total, fraction_bad=bad / total,
            fraction_unresolved=(total - good - bad) / total))
    return out


def cell_bounds(n: int, k: int) -> tuple[Fraction, Fraction]:
    """Endpoints of the k-th depth-n dyadic cell, k = 1..2^n."""
    if n < 0 or not 1 <= k <= (1 << n):
        raise ValueError(f"cell index {k} out of range at depth {n}")
    return Fraction(k - 1, 1 << n), Fraction(k, 1 << n)


def cell_index(x: Fraction, n: int) -> int:
    """1-based index of the depth-n cell containing x."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    return min(int(x * (1 << n)) + 1, 1 << n)


def cell_shift_pair(x: Fraction, n: int, k: int) -> tuple[Fraction, Fraction]:
    """Exact values whose expansions insert a 0 / a 1 after the first n
    bits of x: the affine halves (x + left endpoint)/2 and
    (x + right endpoint)/2 of the containing cell."""
    lo, hi = cell_bounds(n, k)
    x = Fraction(x)
    if not lo <= x <= hi:
        raise ValueError(f"{x} is not in cell {k} at depth {n}")
    return (x + lo) / 2, (x + hi) / 2


def selfsim_threshold_check(samples: Iterable[Fraction], n: int, k: int,
                            tol: float = 1e-9) -> list[ThresholdOrderViolation]:
    """Check the threshold order behind the quasi self-similar inclusions.

    For each non-dyadic x in the cell, inserting a 0 after the cell bits
    must not raise the threshold and inserting a 1 must not lower it:
    theta(left) <= theta(x) <= theta(right) within ``tol``.  Returns the
    violations (expected: none).
    """
    violations = []
    for x in samples:
        x = Fraction(x)
        if is_dyadic(x):
            raise ValueError(f"samples must be non-dyadic, got {x}")
        left, right = cell_shift_pair(x, n, k)
        theta = threshold_of_rational(x).theta
        theta_left = threshold_of_rational(left).theta
        theta_right = threshold_of_rational(right).theta
        defect = max(theta_left - theta, theta - theta_right)
        if defect > tol:
            violations.append(ThresholdOrderViolation(
                x=x, n=n, k=k, theta_left=theta_left, theta=theta,
                theta_right=theta_right, defect=defect))
    return violations


def heavy_selfsim_check(samples: Iterable[Fraction], rho: Fraction, n: int,
                        k: int) -> list[HeavyImplicationViolation]:
    """Check the heavy-set implication chain on exact walks.

    Inserting a 0 after the cell bits can only hurt membership and
    inserting a 1 can only help: heavy(left) => heavy(x) => heavy(right).
    Returns the violations (expected: none).
    """
    rho = Fraction(rho)
    violations = []
    for x in samples:
        x = Fraction(x)
        left, right = cell_shift_pair(x, n, k)
        member_left = heavy_membership(left, rho)
        member = heavy_membership(x, rho)
        member_right = heavy_membership(right, rho)
        if (member_left and not member) or (member and not member_right):
            violations.append(HeavyImplicationViolation(
                x=x, rho=rho, n=n, k=k, member_left=member_left,
                member=member, member_right=member_right))
    return violations


def binary_entropy(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def entropy_count(n: int, rho: Fraction | float | str) -> float:
    """Dimension witness (1/n) log2 of the number of length-n strings with
    weight at least ceil(rho*n); converges to the binary entropy of rho
    for rho >= 1/2."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rho = Fraction(rho)
    if not 0 <= rho <= 1:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    j0 = max(0, math.ceil(rho * n))
    js = np.arange(j0, n + 1, dtype=np.float64)
    # log2 C(n, j) accumulated from the first tail term (log-domain keeps
    # n up to 1e6 tractable).
    ln2 = math.log(2.0)
    log2_first = (math.lgamma(n + 1) - math.lgamma(j0 + 1)
                  - math.lgamma(n - j0 + 1)) / ln2
    if js.size > 1:
        steps = np.log2((n - js[:-1]) / (js[:-1] + 1.0))
        log2_terms = log2_first + np.concatenate([[0.0], np.cumsum(steps)])
    else:
        log2_terms = np.array([log2_first])
    peak = log2_terms.max()
    total = peak + math.log2(float(np.exp2(log2_terms - peak).sum()))
    return total / n


def _exact_crossing_counts(horizon: int) -> dict[int, int]:
    """Exact distribution of zero crossings over all 2^horizon walks.

    Dynamic program over (doubled walk value, sign state, crossings); a
    zero value carries the previous sign and a crossing is counted at the
    first value of opposite sign.
    """
    rmax = horizon // 2 + 1
    size = 2 * horizon + 1
    state = np.zeros((size, 2, rmax + 1), dtype=np.int64)
    state[horizon + 1, 1, 0] = 1
    state[horizon - 1, 0, 0] = 1
    for _ in range(1, horizon):
        nxt = np.zeros_like(state)
        for i in range(size):
            cell = state[i]
            if not cell.any():
                continue
            for step in (-1, 1):
                j = i + step
                if not 0 <= j < size:
                    continue
                t2 = j - horizon
                if t2 == 0:
                    nxt[j] += cell
                else:
                    sgn = 1 if t2 > 0 else 0
                    nxt[j, sgn, :] += cell[sgn]
                    nxt[j, sgn, 1:] += cell[1 - sgn, :-1]
        state = nxt
    totals = state.sum(axis=(0, 1))
    return {r: int(c) for r, c in enumerate(totals) if c}


def walk_distribution(n: int, trials: int | None = None,
                      seed: int | None = None, threads: int = 1) -> WalkStats:
    """Zero-crossing statistics of the walk w(b^m) - m/2 over length-n
    strings, exhaustive (exact, n <= 25) or Monte Carlo sampled."""
    if n < 1:
        raise ValueError(f"horizon must be >= 1, got {n}")
    if trials is None:
        if n > _MAX_EXHAUSTIVE_WALK:
            raise ResourceLimitError(
                f"exhaustive walk enumeration capped at horizon "
                f"{_MAX_EXHAUSTIVE_WALK}; pass trials/seed for Monte Carlo")
        counts = _exact_crossing_counts(n)
        return WalkStats(n=n, counts_by_crossings=counts, total=1 << n,
                         mode="exhaustive")

    rmax = n // 2 + 1

    def worker(rng: np.random.Generator, count: int) -> np.ndarray:
        steps = rng.integers(0, 2, size=(count, n), dtype=np.int8)
        steps = steps * 2 - 1
        walk = np.cumsum(steps, axis=1, dtype=np.int32)
        signs = np.sign(walk).astype(np.int8)
        # Zeros are isolated (steps are +-1), so a zero inherits the sign
        # one step earlier.
        filled = signs.copy()
        zero = filled[:, 1:] == 0
        filled[:, 1:][zero] = signs[:, :-1][zero]
        crossings = (filled[:, 1:] != filled[:, :-1]).sum(axis=1)
        return np.bincount(crossings, minlength=rmax + 1).astype(np.int64)

    totals = _mc_accumulate(trials, seed, threads, worker)
    counts = {r: int(c) for r, c in enumerate(totals) if c}
    return WalkStats(n=n, counts_by_crossings=counts, total=trials,
                     mode="monte-carlo", seed=seed)


def crossing_count_closed_form(horizon: int, r: int) -> Fraction:
    """Exact P(N0 = r) at an odd horizon 2m+1: C(2m+1, m-r) / 2^(2m)."""
    if horizon < 1 or horizon % 2 == 0:
        raise ValueError("closed form requires an odd horizon")
    m = (horizon - 1) // 2
    if r < 0 or r > m:
        return Fraction(0)
    return Fraction(math.comb(horizon, m - r), 1 << (2 * m))


def crossing_cdf_bound(m: int, r: int) -> float:
    """Upper bound 4e(r+1)/sqrt((m+1) pi) on P(N0 <= r) at horizon 2m+1."""
    return 4.0 * math.e * (r + 1) / math.sqrt((m + 1) * math.pi)


@dataclass(frozen=True)
class CrossingRow:
    r: int
    prob: Fraction
    closed_form: Fraction
    cumulative: Fraction
    bound: float

    @property
    def defect(self) -> Fraction:
        return self.prob - self.closed_form


def feller_identity_table(m: int) -> list[CrossingRow]:
    """Exhaustive crossing distribution at horizon 2m+1 against the exact
    closed form; the defect of every row must be zero."""
    horizon = 2 * m + 1
    stats = walk_distribution(horizon)
    rows = []
    cumulative = Fraction(0)
    for r in range(m + 1):
        p = stats.probability(r)
        cumulative += p
        rows.append(CrossingRow(r=r, prob=p,
                                closed_form=crossing_count_closed_form(horizon, r),
                                cumulative=cumulative,
                                bound=crossing_cdf_bound(m, r)))
    return rows


def walk_min_nonnegative_fraction(n: int, trials: int, seed: int,
                                  threads: int = 1) -> float:
    """Monte Carlo fraction of length-n walks that never go negative.

    This is the depth-n shadow of the measure-zero heavy set at rho = 1/2
    and must decay toward zero as n grows.
    """
    if n < 1:
        raise ValueError(f"horizon must be >= 1, got {n}")

    def worker(rng: np.random.Generator, count: int) -> np.ndarray:
        steps = rng.integers(0, 2, size=(count, n), dtype=np.int8)
        steps = steps * 2 - 1
        walk = np.cumsum(steps, axis=1, dtype=np.int32)
        ok = (walk.min(axis=1) >= 0).sum()
        return np.array([ok], dtype=np.int64)

    hits = _mc_accumulate(trials, seed, threads, worker)
    return int(hits[0]) / trials


def box_count(membership: Callable[[Fraction], bool], depth: int,
              sampler_depth: int) -> int:
    """Number of depth-``depth`` dyadic cells holding at least one member
    among the depth-``sampler_depth`` grid points j/2^m."""
    if depth < 0 or sampler_depth < depth:
        raise ValueError("sampler_depth must be >= depth >= 0")
    last_cell = (1 << depth) - 1
    shift = sampler_depth - depth
    covered: set[int] = set()
    for j in range((1 << sampler_depth) + 1):
        if membership(Fraction(j, 1 << sampler_depth)):
            covered.add(min(j >> shift, last_cell))
    return len(covered)
