"""Exact and certified arithmetic: big rationals, quadratic irrationals, dyadic intervals.

Rationals are plain ``fractions.Fraction``.  Quadratic irrationals carry the
normal form (a + b*sqrt(d))/c with exact sign, floor and field arithmetic.
``IntervalReal`` is a certified enclosure with dyadic endpoints; comparisons
on overlapping intervals return ``UNDECIDED`` and callers refine by doubling
precision up to a global cap.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd, isqrt
from typing import Union

from .errors import (
    AmbiguousComparison,
    InvalidQuadratic,
    ParseError,
    PrecisionExceedsInput,
)

DEFAULT_EVAL_BITS = 64
DEFAULT_DECIMAL_BITS = 256
_DEFAULT_MAX_BITS = 16384
_SQUAREFREE_TRIAL_BOUND = 100_000


def max_precision_bits() -> int:
    """Global refinement cap; override with env var HERMITE_LAB_MAX_BITS."""
    raw = os.environ.get("HERMITE_LAB_MAX_BITS")
    if raw is None or raw == "":
        return _DEFAULT_MAX_BITS
    value = int(raw)
    if value < 64:
        raise ValueError("HERMITE_LAB_MAX_BITS must be >= 64")
    return value


# ---------------------------------------------------------------------------
# small integer helpers


def squarefree_split(d: int) -> tuple[int, int]:
    """Write d = f**2 * d0 with d0 square-free (trial division to 1e5)."""
    f = 1
    p = 2
    while p * p <= d and p <= _SQUAREFREE_TRIAL_BOUND:
        while d % (p * p) == 0:
            d //= p * p
            f *= p
        p += 1 if p == 2 else 2
    r = isqrt(d)
    if r * r == d:
        f *= r
        d = 1
    return f, d


def ln_big(n: int) -> float:
    """Natural log of a positive integer of arbitrary size."""
    if n <= 0:
        raise ValueError("ln_big needs a positive integer")
    shift = n.bit_length() - 53
    if shift <= 0:
        return math.log(n)
    return math.log(n >> shift) + shift * math.log(2)


def float_ratio(num: int, den: int) -> float:
    """num/den for non-negative big ints of any size, relative error ~2**-63."""
    if den <= 0:
        raise ValueError("denominator must be positive")
    if num == 0:
        return 0.0
    exp = num.bit_length() - den.bit_length() - 64
    if exp >= 0:
        mantissa = num // (den << exp)
    else:
        mantissa = (num << -exp) // den
    return math.ldexp(mantissa, exp)


# ---------------------------------------------------------------------------
# dyadic rounding


def _round_down(value: Fraction, bits: int) -> Fraction:
    return Fraction((value.numerator << bits) // value.denominator, 1 << bits)


def _round_up(value: Fraction, bits: int) -> Fraction:
    return Fraction(-((-value.numerator << bits) // value.denominator), 1 << bits)


def _is_dyadic(value: Fraction) -> bool:
    d = value.denominator
    return d & (d - 1) == 0


class Comparison(Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class IntervalReal:
    """Certified enclosure [lo, hi] with dyadic endpoints.

    Invariant: lo <= hi and hi - lo <= 2**(1 - precision_bits) * max(1, |lo|).
    """

    lo: Fraction
    hi: Fraction
    precision_bits: int

    def __post_init__(self):
        if not (_is_dyadic(self.lo) and _is_dyadic(self.hi)):
            raise ValueError("interval endpoints must be dyadic")
        if self.lo > self.hi:
            raise ValueError("interval endpoints out of order")
        if self.precision_bits < 1:
            raise ValueError("precision_bits must be positive")
        bound = Fraction(2) ** (1 - self.precision_bits) * max(1, abs(self.lo))
        if self.hi - self.lo > bound:
            raise ValueError("interval wider than its precision label allows")

    # construction -----------------------------------------------------

    @classmethod
    def point(cls, value: Fraction | int, bits: int = DEFAULT_EVAL_BITS) -> "IntervalReal":
        value = Fraction(value)
        if not _is_dyadic(value):
            raise ValueError("point interval needs a dyadic value")
        return cls(value, value, bits)

    @classmethod
    def from_fraction(cls, value: Fraction | int, bits: int) -> "IntervalReal":
        """Exact point when the value is dyadic, else a 1-ulp enclosure."""
        value = Fraction(value)
        if _is_dyadic(value):
            return cls(value, value, bits)
        return cls(_round_down(value, bits), _round_up(value, bits), bits)

    @staticmethod
    def _width_label(lo: Fraction, hi: Fraction) -> int:
        """Largest b with hi - lo <= 2**(1-b) * max(1, |lo|)."""
        width = hi - lo
        if width == 0:
            return _DEFAULT_MAX_BITS
        scale = max(1, abs(lo))
        ratio = scale / width
        bits = max(1, ratio.numerator.bit_length() - ratio.denominator.bit_length() + 2)
        while bits > 1 and Fraction(2) ** (1 - bits) * scale < width:
            bits -= 1
        return bits

    @classmethod
    def enclose(cls, lo: Fraction, hi: Fraction, bits: int) -> "IntervalReal":
        """Outward-rounded enclosure; label capped by the achieved width."""
        if lo > hi:
            lo, hi = hi, lo
        guard = bits + 4
        lo_r, hi_r = _round_down(lo, guard), _round_up(hi, guard)
        return cls(lo_r, hi_r, min(bits, cls._width_label(lo_r, hi_r)))

    @classmethod
    def hull(cls, lo: Fraction, hi: Fraction) -> "IntervalReal":
        """Enclosure labelled with the best precision its width supports."""
        if lo > hi:
            lo, hi = hi, lo
        if lo == hi and _is_dyadic(lo):
            return cls(lo, lo, _DEFAULT_MAX_BITS)
        bits = cls._width_label(lo, hi)
        guard = bits + 8
        lo_r, hi_r = _round_down(lo, guard), _round_up(hi, guard)
        return cls(lo_r, hi_r, min(bits, cls._width_label(lo_r, hi_r)))

    # queries ------------------------------------------------------------

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, value) -> bool:
        value = Fraction(value)
        return self.lo <= value <= self.hi

    def contains_interval(self, other: "IntervalReal") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def to_float(self) -> float:
        mid = (self.lo + self.hi) / 2
        return float_ratio(abs(mid.numerator), mid.denominator) * (
            -1 if mid < 0 else 1
        )

    def float_bounds(self) -> tuple[float, float]:
        slop = 1e-15 * max(1.0, abs(self.to_float())) + 1e-300
        lo = float_ratio(abs(self.lo.numerator), self.lo.denominator) * (
            -1 if self.lo < 0 else 1
        )
        hi = float_ratio(abs(self.hi.numerator), self.hi.denominator) * (
            -1 if self.hi < 0 else 1
        )
        return lo - slop, hi + slop

    # arithmetic (exact on dyadic endpoints, precision label recomputed) --

    def __neg__(self) -> "IntervalReal":
        return IntervalReal.hull(-self.hi, -self.lo)

    def __add__(self, other):
        if isinstance(other, IntervalReal):
            return IntervalReal.hull(self.lo + other.lo, self.hi + other.hi)
        other = Fraction(other)
        return IntervalReal.hull(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, IntervalReal):
            return IntervalReal.hull(self.lo - other.hi, self.hi - other.lo)
        other = Fraction(other)
        return IntervalReal.hull(self.lo - other, self.hi - other)

    def __rsub__(self, other):
        other = Fraction(other)
        return IntervalReal.hull(other - self.hi, other - self.lo)

    def scale(self, k: int | Fraction) -> "IntervalReal":
        k = Fraction(k)
        if k >= 0:
            return IntervalReal.hull(self.lo * k, self.hi * k)
        return IntervalReal.hull(self.hi * k, self.lo * k)


def compare(a: IntervalReal, b: IntervalReal) -> Comparison:
    """Certified comparison; EQUAL only for identical point intervals."""
    if a.hi < b.lo:
        return Comparison.LESS
    if a.lo > b.hi:
        return Comparison.GREATER
    if a.is_point and b.is_point and a.lo == b.lo:
        return Comparison.EQUAL
    return Comparison.UNDECIDED


# ---------------------------------------------------------------------------
# quadratic irrationals


@dataclass(frozen=True)
class QuadraticReal:
    """The irrational (a + b*sqrt(d))/c in normal form.

    c > 0, b != 0, gcd(a, b, c) = 1 and d square-free (>= 2); use
    :func:`quadratic_or_rational` to build one from raw coefficients.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.c <= 0:
            raise InvalidQuadratic("c must be positive")
        if self.d < 2:
            raise InvalidQuadratic("d must be a non-square integer >= 2")
        if self.b == 0:
            raise InvalidQuadratic("b = 0 is a rational, not a quadratic")
        if gcd(gcd(abs(self.a), abs(self.b)), self.c) != 1:
            raise InvalidQuadratic("coefficients not reduced")

    # --- numeric views

    def __float__(self) -> float:
        return (self.a + self.b * math.sqrt(self.d)) / self.c

    def sign(self) -> int:
        a, b, d = self.a, self.b, self.d
        if b > 0:
            if a >= 0:
                return 1
            return 1 if b * b * d > a * a else -1
        if a <= 0:
            return -1
        return 1 if a * a > b * b * d else -1

    def __abs__(self):
        return self if self.sign() > 0 else -self

    def __floor__(self) -> int:
        s = isqrt(self.b * self.b * self.d)
        low = s if self.b > 0 else -s - 1  # b*sqrt(d) lies in (low, low+1)
        n = (self.a + low) // self.c
        return n + 1 if (self - (n + 1)).sign() >= 0 else n

    def frac(self) -> "QuadraticReal":
        return self - math.floor(self)

    def to_interval(self, bits: int) -> IntervalReal:
        prec = bits + max(self.b.bit_length(), self.c.bit_length()) + 8
        while True:
            s = isqrt(self.d << (2 * prec))
            root_lo = Fraction(s, 1 << prec)
            root_hi = Fraction(s + 1, 1 << prec)
            lo = (Fraction(self.a) + self.b * (root_lo if self.b > 0 else root_hi)) / self.c
            hi = (Fraction(self.a) + self.b * (root_hi if self.b > 0 else root_lo)) / self.c
            enclosure = IntervalReal.enclose(lo, hi, bits)
            if enclosure.width <= Fraction(2) ** (1 - bits) * max(1, abs(enclosure.lo)):
                return enclosure
            prec *= 2

    # --- field arithmetic (exact; mixed with int / Fraction)

    def _coerce(self, other):
        if isinstance(other, QuadraticReal):
            if other.d != self.d:
                raise ValueError("mixed radicands")
            return other
        if isinstance(other, (int, Fraction)):
            return other
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if isinstance(other, QuadraticReal):
            a = self.a * other.c + other.a * self.c
            b = self.b * other.c + other.b * self.c
            return quadratic_or_rational(a, b, self.c * other.c, self.d)
        fr = Fraction(other)
        a = self.a * fr.denominator + fr.numerator * self.c
        return quadratic_or_rational(
            a, self.b * fr.denominator, self.c * fr.denominator, self.d
        )

    __radd__ = __add__

    def __neg__(self):
        return QuadraticReal(-self.a, -self.b, self.c, self.d)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if isinstance(other, QuadraticReal):
            a = self.a * other.a + self.b * other.b * self.d
            b = self.a * other.b + self.b * other.a
            return quadratic_or_rational(a, b, self.c * other.c, self.d)
        fr = Fraction(other)
        return quadratic_or_rational(
            self.a * fr.numerator, self.b * fr.numerator, self.c * fr.denominator, self.d
        )

    __rmul__ = __mul__

    def inverse(self):
        norm = self.a * self.a - self.b * self.b * self.d  # nonzero: value irrational
        return quadratic_or_rational(self.c * self.a, -self.c * self.b, norm, self.d)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if isinstance(other, QuadraticReal):
            return self * other.inverse()
        fr = Fraction(other)
        return self * Fraction(fr.denominator, fr.numerator)

    def __rtruediv__(self, other):
        inv = self.inverse()
        return inv * other

    # --- exact order (vs int, Fraction, same-d QuadraticReal)

    def _diff_sign(self, other) -> int:
        diff = self - other
        if isinstance(diff, Fraction):
            return (diff > 0) - (diff < 0)
        return diff.sign()

    def __lt__(self, other):
        return self._diff_sign(other) < 0

    def __le__(self, other):
        return self._diff_sign(other) <= 0

    def __gt__(self, other):
        return self._diff_sign(other) > 0

    def __ge__(self, other):
        return self._diff_sign(other) >= 0

    def __str__(self) -> str:
        return f"({self.a}{self.b:+}*sqrt({self.d}))/{self.c}"


def quadratic_or_rational(a: int, b: int, c: int, d: int) -> Union[Fraction, QuadraticReal]:
    """Normalize (a + b*sqrt(d))/c, folding perfect squares and b = 0 to Fraction."""
    if c == 0:
        raise InvalidQuadratic("zero denominator")
    if d <= 0:
        raise InvalidQuadratic(f"radicand must be positive, got {d}")
    r = isqrt(d)
    if r * r == d:
        return Fraction(a + b * r, c)
    if b == 0:
        return Fraction(a, c)
    f, d0 = squarefree_split(d)
    b *= f
    if c < 0:
        a, b, c = -a, -b, -c
    g = gcd(gcd(abs(a), abs(b)), c)
    return QuadraticReal(a // g, b // g, c // g, d0)


# ---------------------------------------------------------------------------
# real-number specifications


@dataclass(frozen=True)
class RationalSpec:
    value: Fraction


@dataclass(frozen=True)
class QuadraticSpec:
    value: QuadraticReal


@dataclass(frozen=True)
class DecimalSpec:
    """Exact truncated rational plus its uncertainty window.

    The digits pin the value exactly; `declared_bits` says how well the
    *intended* real is known: it lies in [window_lo, window_hi].
    """

    value: Fraction
    declared_bits: int
    window_lo: Fraction
    window_hi: Fraction
    text: str = ""

    def __post_init__(self):
        if self.declared_bits < 64:
            raise ParseError("decimal precision must be >= 64 bits")
        if not (self.window_lo <= self.value <= self.window_hi):
            raise ValueError("value outside its window")


RealSpec = Union[RationalSpec, QuadraticSpec, DecimalSpec]


def make_decimal(
    value: Fraction,
    declared_bits: int = DEFAULT_DECIMAL_BITS,
    window: tuple[Fraction, Fraction] | None = None,
    text: str = "",
) -> DecimalSpec:
    if window is None:
        ulp = Fraction(1, 1 << declared_bits)
        window = (value, value + ulp)
    return DecimalSpec(value, declared_bits, window[0], window[1], text)


_RATIONAL_RE = re.compile(r"^([+-]?\d+)\s*/\s*(\d+)$")
_INTEGER_RE = re.compile(r"^([+-]?\d+)$")
_DECIMAL_RE = re.compile(r"^([+-]?\d+)\.(\d+)(?:@(\d+))?$")
_QUADRATIC_RE = re.compile(
    r"^\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*([+-]?\d+)\s*\)\s*\)\s*/\s*(\d+)$"
)


def parse_real(text: str) -> RealSpec:
    """Parse "p/q", "(a+b*sqrt(d))/c" or a decimal literal with optional @bits."""
    text = text.strip()
    m = _INTEGER_RE.match(text)
    if m:
        return RationalSpec(Fraction(int(m.group(1))))
    m = _RATIONAL_RE.match(text)
    if m:
        den = int(m.group(2))
        if den == 0:
            raise ParseError("zero denominator")
        return RationalSpec(Fraction(int(m.group(1)), den))
    m = _DECIMAL_RE.match(text)
    if m:
        int_part, frac_part, bits = m.group(1), m.group(2), m.group(3)
        declared = int(bits) if bits else DEFAULT_DECIMAL_BITS
        scale = 10 ** len(frac_part)
        sign = -1 if int_part.lstrip("+-") != int_part and int_part[0] == "-" else 1
        magnitude = abs(int(int_part)) * scale + int(frac_part)
        value = Fraction(sign * magnitude, scale)
        return make_decimal(value, declared, text=text)
    m = _QUADRATIC_RE.match(text)
    if m:
        a = int(m.group(1))
        b = int(m.group(3)) * (-1 if m.group(2) == "-" else 1)
        d = int(m.group(4))
        c = int(m.group(5))
        if c == 0:
            raise ParseError("zero denominator")
        if d <= 0:
            raise InvalidQuadratic(f"radicand must be positive, got {d}")
        value = quadratic_or_rational(a, b, c, d)
        if isinstance(value, Fraction):
            return RationalSpec(value)
        return QuadraticSpec(value)
    raise ParseError(f"cannot parse real number from {text!r}")


def _decimal_digits(value: Fraction, max_digits: int) -> str:
    """Digit string "w.ffff" of |value|, truncated, built in small chunks."""
    value = abs(value)
    whole, rem = divmod(value.numerator, value.denominator)
    pieces = []
    produced = 0
    while rem and produced < max_digits:
        take = min(12, max_digits - produced)
        rem *= 10**take
        digit_block, rem = divmod(rem, value.denominator)
        pieces.append(f"{digit_block:0{take}d}")
        produced += take
    frac_part = "".join(pieces) or "0"
    return f"{whole}.{frac_part}"


def spec_text(spec: RealSpec) -> str:
    """Canonical one-line rendering, inverse-compatible with parse_real."""
    if isinstance(spec, RationalSpec):
        return f"{spec.value.numerator}/{spec.value.denominator}"
    if isinstance(spec, QuadraticSpec):
        return str(spec.value)
    if spec.text:
        return spec.text
    max_digits = spec.declared_bits * 30103 // 100000 + 2
    sign = "-" if spec.value < 0 else ""
    return f"{sign}{_decimal_digits(spec.value, max_digits)}@{spec.declared_bits}"


def spec_is_integer(spec: RealSpec) -> bool:
    if isinstance(spec, (RationalSpec, DecimalSpec)):
        return spec.value.denominator == 1
    return False


def eval_interval(spec: RealSpec, bits: int) -> IntervalReal:
    """Certified interval containing the spec's value, relative width <= 2**(1-bits)."""
    if bits < 16:
        raise ValueError("bits must be >= 16")
    if isinstance(spec, RationalSpec):
        return IntervalReal.from_fraction(spec.value, bits)
    if isinstance(spec, QuadraticSpec):
        return spec.value.to_interval(bits)
    if isinstance(spec, DecimalSpec):
        if bits > spec.declared_bits:
            raise PrecisionExceedsInput(
                f"requested {bits} bits from a {spec.declared_bits}-bit decimal"
            )
        return IntervalReal.enclose(spec.window_lo, spec.window_hi, bits)
    raise TypeError(f"not a RealSpec: {spec!r}")


def compare_specs(a: RealSpec, b: RealSpec, start_bits: int = DEFAULT_EVAL_BITS) -> Comparison:
    """Refining comparison of two specs; AmbiguousComparison at the global cap."""
    exact_a = _exact_value(a)
    exact_b = _exact_value(b)
    if exact_a is not None and exact_b is not None:
        if isinstance(exact_a, Fraction) and isinstance(exact_b, Fraction):
            return _cmp_to_comparison(exact_a, exact_b, (exact_a == exact_b))
        if isinstance(exact_a, QuadraticReal) and isinstance(exact_b, QuadraticReal):
            if exact_a.d == exact_b.d:
                if exact_a == exact_b:
                    return Comparison.EQUAL
                return Comparison.LESS if exact_a < exact_b else Comparison.GREATER
        else:
            quad, frac, flip = (
                (exact_a, exact_b, False)
                if isinstance(exact_a, QuadraticReal)
                else (exact_b, exact_a, True)
            )
            less = quad < frac
            if flip:
                less = not less
            return Comparison.LESS if less else Comparison.GREATER
    bits = start_bits
    cap = max_precision_bits()
    while True:
        try:
            ia = eval_interval(a, bits)
            ib = eval_interval(b, bits)
        except PrecisionExceedsInput:
            ia = eval_interval(a, min(bits, _declared(a)))
            ib = eval_interval(b, min(bits, _declared(b)))
            result = compare(ia, ib)
            if result is Comparison.UNDECIDED:
                raise AmbiguousComparison(
                    "inputs too shallow to separate"
                ) from None
            return result
        result = compare(ia, ib)
        if result is not Comparison.UNDECIDED:
            return result
        if bits >= cap:
            raise AmbiguousComparison(f"undecided at the {cap}-bit cap")
        bits = min(2 * bits, cap)


def _declared(spec: RealSpec) -> int:
    return spec.declared_bits if isinstance(spec, DecimalSpec) else max_precision_bits()


def _exact_value(spec: RealSpec):
    if isinstance(spec, RationalSpec):
        return spec.value
    if isinstance(spec, QuadraticSpec):
        return spec.value
    return None


def _cmp_to_comparison(a, b, equal: bool) -> Comparison:
    if equal:
        return Comparison.EQUAL
    return Comparison.LESS if a < b else Comparison.GREATER
