"""Exact bridge between rationals in [0,1] and binary expansions.

Every rational has an eventually periodic base-2 expansion; dyadic
rationals have two (terminating and non-terminating).  Everything here is
exact integer/fraction arithmetic: the membership predicates built on top
(heavy sets, simple normality) are discrete and drift-intolerant, so no
floating point is allowed in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence


class Variant(Enum):
    TERMINATING = "terminating"
    NON_TERMINATING = "non-terminating"


_BITS_TO_CHARS = bytes.maketrans(bytes([0, 1]), b"01")
_CHARS_TO_BITS = bytes.maketrans(b"01", bytes([0, 1]))


def _as_bits(bits: Sequence[int]) -> tuple[int, ...]:
    if isinstance(bits, (int, str)):
        raise ValueError(f"bits must be a 0/1 sequence, got {bits!r}")
    try:
        raw = bytes(bits)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bits must be a 0/1 sequence, got {bits!r}") from exc
    if raw and max(raw) > 1:
        raise ValueError(f"bits must be 0/1, got {bits!r}")
    return tuple(raw)


def _minimal_period(period: tuple[int, ...]) -> tuple[int, ...]:
    k = len(period)
    if k < 2:
        return period
    # Smallest shift at which the doubled string re-finds itself; a shorter
    # repeating unit exists iff that shift divides the length.
    s = bytes(period)
    shift = (s + s).find(s, 1)
    if shift < k and k % shift == 0:
        return period[:shift]
    return period


@dataclass(frozen=True)
class ExpansionSpec:
    """Eventually periodic binary expansion 0.preamble[period]...

    Normalized on construction to the canonical form: minimal repeating
    unit, preamble tail absorbed into the period rotation, trailing zeros
    stripped from terminating forms.  An empty period means an all-zero
    tail; x = 0 is ((), ()) and x = 1 is ((), (1,)).
    """

    preamble: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self) -> None:
        preamble = _as_bits(self.preamble)
        period = _minimal_period(_as_bits(self.period))
        if period and not any(period):
            period = ()
        if period:
            while preamble and preamble[-1] == period[-1]:
                period = (period[-1],) + period[:-1]
                preamble = preamble[:-1]
        else:
            while preamble and preamble[-1] == 0:
                preamble = preamble[:-1]
        object.__setattr__(self, "preamble", preamble)
        object.__setattr__(self, "period", period)

    @property
    def terminating(self) -> bool:
        return not self.period

    def bit_at(self, m: int) -> int:
        """Digit b_m of the expansion, positions starting at 1."""
        if m < 1:
            raise ValueError("positions start at 1")
        if m <= len(self.preamble):
            return self.preamble[m - 1]
        if not self.period:
            return 0
        return self.period[(m - len(self.preamble) - 1) % len(self.period)]

    def prefix(self, n: int) -> tuple[int, ...]:
        """First n digits of the expansion."""
        return tuple(self.bit_at(m) for m in range(1, n + 1))

    def __str__(self) -> str:
        head = "".join(str(b) for b in self.preamble)
        if self.period:
            return "0." + head + "[" + "".join(str(b) for b in self.period) + "]"
        return "0." + head


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or an exact decimal literal into a Fraction in [0,1]."""
    try:
        x = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse rational from {text!r}") from exc
    if not 0 <= x <= 1:
        raise ValueError(f"rational must lie in [0, 1], got {x}")
    return x


def is_dyadic(x: Fraction) -> bool:
    """True iff x = p/2^n (including the endpoints 0 and 1)."""
    q = Fraction(x).denominator
    return q & (q - 1) == 0


def real_to_expansion(x: Fraction | int | str,
                      variant: Variant = Variant.TERMINATING) -> ExpansionSpec:
    """Exact binary expansion of a rational in [0,1].

    Non-dyadic rationals have a unique expansion and ``variant`` is
    ignored.  For dyadic x the terminating form has an empty period and
    the non-terminating form flips the last preamble bit and appends the
    all-ones period.  x = 0 and x = 1 each have a single expansion,
    returned for either variant.
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0:
        return ExpansionSpec((), ())
    if x == 1:
        return ExpansionSpec((), (1,))
    if is_dyadic(x):
        n = x.denominator.bit_length() - 1
        p = x.numerator
        bits = tuple((p >> (n - 1 - i)) & 1 for i in range(n))
        if variant is Variant.TERMINATING:
            return ExpansionSpec(bits, ())
        return ExpansionSpec(bits[:-1] + (0,), (1,))
    # Write q = 2^a * m with m odd: the minimal preamble has length a and
    # the minimal period length is the multiplicative order of 2 mod m.
    # The period bits are the k-bit digits of r*(2^k - 1)/m, which avoids
    # digit-at-a-time long division for large denominators.
    p, q = x.numerator, x.denominator
    a = (q & -q).bit_length() - 1
    m = q >> a
    head, r = divmod(p, m)
    k = _multiplicative_order_of_two(m)
    period_value = r * ((1 << k) - 1) // m
    preamble = _int_to_bits(head, a)
    return ExpansionSpec(preamble, _int_to_bits(period_value, k))


def _int_to_bits(value: int, width: int) -> tuple[int, ...]:
    if width == 0:
        return ()
    return tuple(format(value, f"0{width}b").encode().translate(_CHARS_TO_BITS))


def _factorize(n: int) -> dict[int, int]:
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def _multiplicative_order_of_two(m: int) -> int:
    """Least k with 2^k = 1 mod m, for odd m > 1; k is found among the
    divisors of the Carmichael bound instead of by brute iteration."""
    bound = 1
    for prime, exp in _factorize(m).items():
        bound = math.lcm(bound, (prime - 1) * prime ** (exp - 1))
    divisors = [1]
    for prime, exp in _factorize(bound).items():
        divisors = [d * prime ** i for d in divisors for i in range(exp + 1)]
    return min(d for d in divisors if pow(2, d, m) == 1)


def expansion_to_real(spec: ExpansionSpec) -> Fraction:
    """Exact value of an eventually periodic expansion (geometric series)."""
    pre_len = len(spec.preamble)
    value = Fraction(_bits_to_int(spec.preamble), 1 << pre_len)
    if spec.period:
        k = len(spec.period)
        value += Fraction(_bits_to_int(spec.period), (1 << k) - 1) / (1 << pre_len)
    return value


def complement_expansion(spec: ExpansionSpec) -> ExpansionSpec:
    """Flip every digit; represents 1 - x for the value x of ``spec``."""
    preamble = tuple(1 - b for b in spec.preamble)
    period = tuple(1 - b for b in spec.period) if spec.period else (1,)
    return ExpansionSpec(preamble, period)


def _bits_to_int(bits: Sequence[int]) -> int:
    if not bits:
        return 0
    return int(bytes(bits).translate(_BITS_TO_CHARS), 2)


def row_index(bits: Sequence[int]) -> int:
    """Kronecker row index of a bit path: h = sum of b_l 2^(n-l).

    0-based; the first bit is the most significant, so prepending a zero
    leaves the index unchanged and prepending a one adds 2^n.
    """
    return _bits_to_int(_as_bits(bits))


def bits_of_index(h: int, n: int) -> tuple[int, ...]:
    """Inverse of ``row_index`` at known depth n."""
    if not 0 <= h < (1 << n):
        raise ValueError(f"index {h} out of range for depth {n}")
    return tuple((h >> (n - 1 - i)) & 1 for i in range(n))


def hamming_weight(bits: Sequence[int]) -> int:
    return sum(_as_bits(bits))


def digit_density(spec: ExpansionSpec) -> Fraction:
    """Asymptotic density of ones: weight(period) / len(period)."""
    if not spec.period:
        return Fraction(0)
    return Fraction(sum(spec.period), len(spec.period))


def is_simply_normal(spec: ExpansionSpec) -> bool:
    """True iff the digit density of ones is exactly 1/2.

    Eventually periodic expansions have density weight(period)/len(period);
    terminating expansions have density 0.  Dyadic rationals are never
    simply normal under either expansion.
    """
    return digit_density(spec) == Fraction(1, 2)
