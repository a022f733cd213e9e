"""Continued-fraction engine for the reduced input x0 = |theta - nearest(theta)|.

Expansion runs through a per-kind session: exact Euclid remainders for
rationals, exact field arithmetic for quadratic irrationals, and lockstep
Euclid on both window endpoints for decimals (a quotient is emitted only
when every real consistent with the declared precision shares it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    AmbiguousComparison,
    IndexOutOfRange,
    IntegerInput,
    TailUnavailable,
)
from .numeric import (
    DecimalSpec,
    IntervalReal,
    QuadraticReal,
    QuadraticSpec,
    RationalSpec,
    RealSpec,
    float_ratio,
    make_decimal,
    spec_is_integer,
)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class PartialQuotients:
    quotients: tuple[int, ...]
    terminated: bool

    def __post_init__(self):
        if any(a < 1 for a in self.quotients):
            raise ValueError("partial quotients must be >= 1")
        if self.quotients and self.quotients[0] < 2:
            raise ValueError("a1 >= 2 is forced by x0 <= 1/2")
        if self.terminated and self.quotients and self.quotients[-1] < 2:
            raise ValueError("canonical terminating expansion ends with a quotient >= 2")


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int
    index: int


@dataclass(frozen=True)
class TailValue:
    index: int
    value: IntervalReal


def reduce_theta(spec: RealSpec) -> tuple[int, RealSpec, int]:
    """Split theta into (sign of theta', x0 = |theta'|, nearest integer).

    theta' = theta - nearest lies in (-1/2, 1/2]; the half-integer tie goes
    to +1/2 so outputs are deterministic.
    """
    if spec_is_integer(spec):
        raise IntegerInput(f"{spec!r} is an integer")
    if isinstance(spec, RationalSpec):
        m = math.ceil(spec.value - HALF)
        prime = spec.value - m
        sign = 1 if prime > 0 else -1
        return sign, RationalSpec(abs(prime)), m
    if isinstance(spec, QuadraticSpec):
        v = spec.value
        floor = math.floor(v)
        frac = v - floor
        m = floor + (1 if frac > HALF else 0)
        prime = v - m
        sign = prime.sign()
        return sign, QuadraticSpec(abs(prime)), m
    if isinstance(spec, DecimalSpec):
        m = math.ceil(spec.value - HALF)
        w_lo = spec.window_lo - m
        w_hi = spec.window_hi - m
        if w_lo >= 0:
            return 1, make_decimal(
                spec.value - m, spec.declared_bits, (w_lo, w_hi)
            ), m
        if w_hi <= 0:
            return -1, make_decimal(
                m - spec.value, spec.declared_bits, (-w_hi, -w_lo)
            ), m
        raise AmbiguousComparison(
            "theta is indistinguishable from an integer at its declared precision"
        )
    raise TypeError(f"not a RealSpec: {spec!r}")


# ---------------------------------------------------------------------------
# expansion sessions


class _RationalSession:
    """Euclid on the exact fraction; tails are the remainder ratios."""

    kind = "rational"

    def __init__(self, value: Fraction):
        self.tn = value.numerator
        self.td = value.denominator
        self.count = 0
        self.terminated = False
        self.exhausted = False

    def advance(self):
        if self.tn == 0:
            self.terminated = True
            return None
        a, r = divmod(self.td, self.tn)
        self.tn, self.td = r, self.tn
        self.count += 1
        return a

    def tail_gt(self, num: int, den: int):
        return self.tn * den > self.td * num

    def tail_float_bounds(self):
        x = float_ratio(self.tn, self.td)
        return max(0.0, x - 1e-12), x + 1e-12

    def tail_fraction(self) -> Fraction:
        return Fraction(self.tn, self.td)

    def tail_interval(self, bits: int) -> IntervalReal:
        return IntervalReal.from_fraction(self.tail_fraction(), bits)


class _QuadraticSession:
    """Exact arithmetic in Q(sqrt(d)); the expansion never terminates."""

    kind = "quadratic"

    def __init__(self, value: QuadraticReal):
        self.tail = value
        self.count = 0
        self.terminated = False
        self.exhausted = False

    def advance(self):
        inv = self.tail.inverse()
        a = math.floor(inv)
        self.tail = inv - a
        self.count += 1
        return a

    def tail_gt(self, num: int, den: int):
        return (self.tail - Fraction(num, den)).sign() > 0

    def tail_float_bounds(self):
        # certified regardless of coefficient size: no float cancellation
        t = self.tail
        shift = 64
        s = math.isqrt(t.b * t.b * t.d << (2 * shift))
        low_num = (t.a << shift) + (s if t.b > 0 else -(s + 1))
        den = t.c << shift
        if low_num >= 0:
            low = float_ratio(low_num, den)
        else:
            low = -float_ratio(-low_num, den)
        return max(0.0, low - 1e-12), low + 1e-12

    def tail_interval(self, bits: int) -> IntervalReal:
        return self.tail.to_interval(bits)


class _DecimalSession:
    """Lockstep Euclid on both window endpoints; emits only shared quotients."""

    kind = "decimal"

    def __init__(self, spec: DecimalSpec):
        lo, hi = spec.window_lo, spec.window_hi
        self.an, self.ad = lo.numerator, lo.denominator
        self.bn, self.bd = hi.numerator, hi.denominator
        self.count = 0
        self.terminated = False
        self.exhausted = False

    def advance(self):
        if self.exhausted:
            return None
        if self.an == 0 or self.bn == 0:
            self.exhausted = True
            return None
        qa, ra = divmod(self.ad, self.an)
        qb, rb = divmod(self.bd, self.bn)
        if qa != qb:
            self.exhausted = True
            return None
        self.an, self.ad = ra, self.an
        self.bn, self.bd = rb, self.bn
        self.count += 1
        return qa

    def _endpoint_cmp(self, n, d, num, den):
        lhs = n * den
        rhs = d * num
        return (lhs > rhs) - (lhs < rhs)

    def tail_gt(self, num: int, den: int):
        s1 = self._endpoint_cmp(self.an, self.ad, num, den)
        s2 = self._endpoint_cmp(self.bn, self.bd, num, den)
        if s1 > 0 and s2 > 0:
            return True
        if s1 <= 0 and s2 <= 0:
            return False
        return None

    def tail_float_bounds(self):
        x1 = float_ratio(self.an, self.ad)
        x2 = float_ratio(self.bn, self.bd)
        lo, hi = (x1, x2) if x1 <= x2 else (x2, x1)
        return max(0.0, lo - 1e-12), hi + 1e-12

    def tail_fraction_bounds(self) -> tuple[Fraction, Fraction]:
        t1 = Fraction(self.an, self.ad)
        t2 = Fraction(self.bn, self.bd)
        return (t1, t2) if t1 <= t2 else (t2, t1)

    def tail_interval(self, bits: int) -> IntervalReal:
        lo, hi = self.tail_fraction_bounds()
        width = hi - lo
        if width > Fraction(1, 1 << 32) * max(1, lo):
            raise TailUnavailable("decimal input exhausted: tail wider than 2**-32")
        if width > Fraction(2) ** (1 - bits) * max(1, lo):
            raise AmbiguousComparison(
                f"tail certified to less than the requested {bits} bits"
            )
        return IntervalReal.enclose(lo, hi, bits)


ExpansionSession = _RationalSession | _QuadraticSession | _DecimalSession


def _validate_x0(spec: RealSpec) -> None:
    if isinstance(spec, (RationalSpec, DecimalSpec)):
        if not (0 < spec.value <= HALF):
            raise ValueError("x0 must lie in (0, 1/2]")
    elif isinstance(spec, QuadraticSpec):
        if spec.value.sign() <= 0 or (spec.value - HALF).sign() > 0:
            raise ValueError("x0 must lie in (0, 1/2]")
    else:
        raise TypeError(f"not a RealSpec: {spec!r}")


def expansion(x0: RealSpec) -> ExpansionSession:
    """Fresh certified expansion session for a reduced input."""
    _validate_x0(x0)
    if isinstance(x0, RationalSpec):
        return _RationalSession(x0.value)
    if isinstance(x0, QuadraticSpec):
        return _QuadraticSession(x0.value)
    return _DecimalSession(x0)


def cf_expand(x0: RealSpec, n: int, strict: bool = False) -> PartialQuotients:
    """First n certified partial quotients of x0.

    Decimal inputs may certify fewer than n quotients; the certified prefix
    is returned, or AmbiguousComparison is raised when strict=True.
    """
    if n < 1:
        raise ValueError("n must be positive")
    session = expansion(x0)
    quotients = []
    while len(quotients) < n:
        a = session.advance()
        if a is None:
            break
        quotients.append(a)
    if strict and session.exhausted and len(quotients) < n:
        raise AmbiguousComparison(
            f"only {len(quotients)} of {n} quotients certified at the declared precision"
        )
    return PartialQuotients(tuple(quotients), session.terminated)


def convergents(pq: PartialQuotients) -> list[Convergent]:
    """Convergents (p_k, q_k), k = 0..N, from the standard recurrence."""
    p_prev, q_prev = 1, 0
    p_cur, q_cur = 0, 1
    out = [Convergent(0, 1, 0)]
    for k, a in enumerate(pq.quotients, start=1):
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        out.append(Convergent(p_cur, q_cur, k))
    return out


def ratio_y(conv: list[Convergent], n: int) -> Fraction:
    """Exact q_n / q_{n+1}."""
    if n < 0 or n + 1 >= len(conv):
        raise IndexOutOfRange(f"need convergents {n} and {n + 1}, have {len(conv)}")
    return Fraction(conv[n].q, conv[n + 1].q)


def tail_value(spec: RealSpec, pq: PartialQuotients, n: int, bits: int) -> TailValue:
    """Certified interval for the tail [0; a_{n+2}, a_{n+3}, ...], n >= -1.

    `spec` is the reduced input x0 (a full theta is reduced first when it
    lies outside (0, 1/2]).
    """
    if n < -1:
        raise ValueError("tail index starts at -1")
    x0 = spec
    try:
        _validate_x0(x0)
    except ValueError:
        _, x0, _ = reduce_theta(spec)
    session = expansion(x0)
    for k in range(n + 1):
        a = session.advance()
        if a is None:
            if session.terminated:
                raise IndexOutOfRange(
                    f"expansion terminated after {session.count} quotients"
                )
            raise TailUnavailable(
                f"decimal input certifies only {session.count} quotients"
            )
        if k < len(pq.quotients) and pq.quotients[k] != a:
            raise ValueError("partial quotients do not belong to this input")
    return TailValue(n, session.tail_interval(bits))


def mirror_value(quotients: tuple[int, ...] | list[int]) -> Fraction:
    """Exact value of the reversed expansion [0; a_N, ..., a_1]."""
    value = Fraction(0)
    for a in quotients:
        value = 1 / (a + value)
    return value
