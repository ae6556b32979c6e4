"""Truncated p-adic numbers.

Values live in the absolute-precision model: a ``PadicNumber`` is known
modulo ``p**abs_precision``. A nonzero value is stored as
``p**valuation * unit`` with ``unit`` a p-adic unit reduced modulo
``p**(abs_precision - valuation)``; its base-p digits are the canonical
expansion. A value that is congruent to 0 at its precision is the explicit
zero-to-precision state, never an error.

Because every operation is exact modulo the stated precision, finite sums
do not depend on summation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import (
    DivisionByZeroToPrecision,
    DomainError,
    InsufficientPrecision,
    NotASquare,
    PrimeMismatch,
    ZeroDenominator,
)
from .residue_classifier import euler_is_qr, sqrt_mod

DEFAULT_PRECISION = 48
GUARD_DIGITS = 4

Scalar = Union[int, Fraction, "PadicNumber"]


def int_valuation(n: int, p: int) -> int:
    """Exponent of p in the nonzero integer n."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def rational_valuation(x: int | Fraction, p: int) -> int | None:
    """p-adic valuation of a rational; ``None`` for zero."""
    x = Fraction(x)
    if x == 0:
        return None
    return int_valuation(x.numerator, p) - int_valuation(x.denominator, p)


@dataclass(frozen=True)
class NormValue:
    """|x|_p stored on a log scale: ``exponent`` e means p**(-e); ``None`` is 0."""

    exponent: int | None

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def __mul__(self, other: "NormValue") -> "NormValue":
        if self.is_zero or other.is_zero:
            return NormValue(None)
        return NormValue(self.exponent + other.exponent)

    def value(self, p: int) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return Fraction(p) ** (-self.exponent)

    def __str__(self) -> str:
        return "0" if self.is_zero else f"p^{-self.exponent}"


NormValue.ZERO = NormValue(None)


class PadicNumber:
    __slots__ = ("p", "valuation", "unit", "abs_precision")

    def __init__(self, p: int, valuation: int, unit: int, abs_precision: int):
        if p < 2:
            raise ValueError(f"p must be a prime >= 2, got {p}")
        if unit == 0:
            valuation = abs_precision
        else:
            m = abs_precision - valuation
            if m < 1:
                raise ValueError("valuation must be below the absolute precision")
            if unit % p == 0 or not 0 < unit < p**m:
                raise ValueError(f"unit {unit} is not a reduced p-adic unit mod {p}^{m}")
        self.p = p
        self.valuation = valuation
        self.unit = unit
        self.abs_precision = abs_precision

    @classmethod
    def _raw(cls, p: int, valuation: int, unit: int, abs_precision: int) -> "PadicNumber":
        obj = object.__new__(cls)
        obj.p = p
        obj.valuation = valuation
        obj.unit = unit
        obj.abs_precision = abs_precision
        return obj

    @classmethod
    def zero(cls, p: int, abs_precision: int) -> "PadicNumber":
        return cls._raw(p, abs_precision, 0, abs_precision)

    @classmethod
    def _from_scaled(cls, p: int, exponent: int, scaled: int, abs_precision: int) -> "PadicNumber":
        # the value p**exponent * scaled, reduced modulo p**abs_precision
        m = abs_precision - exponent
        if m <= 0:
            return cls.zero(p, abs_precision)
        scaled %= p**m
        if scaled == 0:
            return cls.zero(p, abs_precision)
        t = 0
        while scaled % p == 0:
            scaled //= p
            t += 1
        return cls._raw(p, exponent + t, scaled, abs_precision)

    @classmethod
    def from_digits(cls, p: int, valuation: int, digits: list[int]) -> "PadicNumber":
        """Inverse of ``digits``: little-endian base-p unit digits."""
        if not digits:
            raise ValueError("need at least one digit")
        if any(not 0 <= d < p for d in digits):
            raise ValueError("digits must lie in [0, p-1]")
        if digits[0] == 0:
            raise ValueError("leading digit of a unit must be nonzero")
        unit = sum(d * p**i for i, d in enumerate(digits))
        return cls(p, valuation, unit, valuation + len(digits))

    # -- inspection -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.unit == 0

    is_zero_to_precision = is_zero

    @property
    def rel_precision(self) -> int:
        return 0 if self.is_zero else self.abs_precision - self.valuation

    @property
    def digits(self) -> list[int]:
        out, u = [], self.unit
        for _ in range(self.rel_precision):
            u, d = divmod(u, self.p)
            out.append(d)
        return out

    def norm(self) -> NormValue:
        return NormValue.ZERO if self.is_zero else NormValue(self.valuation)

    def to_fraction(self) -> Fraction:
        """The stored representative as a rational number."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.p) ** self.valuation * self.unit

    def to_dict(self) -> dict:
        return {
            "prime": self.p,
            "valuation": None if self.is_zero else self.valuation,
            "digits": self.digits,
            "abs_precision": self.abs_precision,
            "zero": self.is_zero,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PadicNumber":
        if data["zero"]:
            return cls.zero(data["prime"], data["abs_precision"])
        x = cls.from_digits(data["prime"], data["valuation"], list(data["digits"]))
        if x.abs_precision != data["abs_precision"]:
            raise ValueError("digit count does not match abs_precision")
        return x

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PadicNumber):
            return NotImplemented
        return (self.p, self.valuation, self.unit, self.abs_precision) == (
            other.p, other.valuation, other.unit, other.abs_precision)

    def __hash__(self) -> int:
        return hash((self.p, self.valuation, self.unit, self.abs_precision))

    def __repr__(self) -> str:
        if self.is_zero:
            return f"PadicNumber(0 + O({self.p}^{self.abs_precision}))"
        shown = self.digits[:8]
        tail = "..." if self.rel_precision > 8 else ""
        return (f"PadicNumber({self.p}^{self.valuation} * "
                f"[{', '.join(map(str, shown))}{tail}] + O({self.p}^{self.abs_precision}))")

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other: Scalar, multiplicative: bool) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise PrimeMismatch(f"cannot combine Q_{self.p} with Q_{other.p}")
            return other
        if not isinstance(other, (int, Fraction)):
            raise TypeError(f"cannot combine PadicNumber with {type(other).__name__}")
        other = Fraction(other)
        if not multiplicative or other == 0:
            return from_rational(other.numerator, other.denominator, self.p, self.abs_precision)
        # an exact scalar must not limit the relative precision of a product
        v = rational_valuation(other, self.p)
        return from_rational(other.numerator, other.denominator, self.p,
                             v + max(self.rel_precision, 1))

    def __add__(self, other: Scalar) -> "PadicNumber":
        y = self._coerce(other, False)
        K = min(self.abs_precision, y.abs_precision)
        if self.is_zero:
            return PadicNumber._from_scaled(self.p, y.valuation, y.unit, K)
        if y.is_zero:
            return PadicNumber._from_scaled(self.p, self.valuation, self.unit, K)
        e = min(self.valuation, y.valuation)
        s = (self.unit * self.p ** (self.valuation - e)
             + y.unit * self.p ** (y.valuation - e))
        return PadicNumber._from_scaled(self.p, e, s, K)

    __radd__ = __add__

    def __neg__(self) -> "PadicNumber":
        if self.is_zero:
            return self
        m = self.rel_precision
        return PadicNumber._raw(self.p, self.valuation, self.p**m - self.unit, self.abs_precision)

    def __sub__(self, other: Scalar) -> "PadicNumber":
        return self + (-self._coerce(other, False))

    def __rsub__(self, other: Scalar) -> "PadicNumber":
        return self._coerce(other, False) + (-self)

    def __mul__(self, other: Scalar) -> "PadicNumber":
        y = self._coerce(other, True)
        p = self.p
        if self.is_zero or y.is_zero:
            if self.is_zero and y.is_zero:
                K = self.abs_precision + y.abs_precision
            elif self.is_zero:
                K = self.abs_precision + y.valuation
            else:
                K = y.abs_precision + self.valuation
            return PadicNumber.zero(p, K)
        m = min(self.rel_precision, y.rel_precision)
        v = self.valuation + y.valuation
        return PadicNumber._raw(p, v, self.unit * y.unit % p**m, v + m)

    __rmul__ = __mul__

    def invert(self) -> "PadicNumber":
        if self.is_zero:
            raise DivisionByZeroToPrecision(
                f"value is 0 modulo {self.p}^{self.abs_precision}")
        m = self.rel_precision
        return PadicNumber._raw(self.p, -self.valuation,
                                pow(self.unit, -1, self.p**m), -self.valuation + m)

    def __truediv__(self, other: Scalar) -> "PadicNumber":
        return self * self._coerce(other, True).invert()

    def __rtruediv__(self, other: Scalar) -> "PadicNumber":
        return self.invert() * other

    def __pow__(self, n: int) -> "PadicNumber":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.invert() ** (-n)
        if n == 0:
            return from_rational(1, 1, self.p, max(self.rel_precision, 1))
        if self.is_zero:
            return PadicNumber.zero(self.p, self.abs_precision * n)
        m = self.rel_precision
        v = self.valuation * n
        return PadicNumber._raw(self.p, v, pow(self.unit, n, self.p**m), v + m)

    def shift(self, k: int) -> "PadicNumber":
        """Exact multiplication by p**k."""
        if self.is_zero:
            return PadicNumber.zero(self.p, self.abs_precision + k)
        return PadicNumber._raw(self.p, self.valuation + k, self.unit, self.abs_precision + k)

    def reduce(self, abs_precision: int) -> "PadicNumber":
        """Forget digits at or beyond p**abs_precision."""
        if abs_precision > self.abs_precision:
            raise InsufficientPrecision(
                f"cannot raise precision from {self.abs_precision} to {abs_precision}")
        if self.is_zero:
            return PadicNumber.zero(self.p, abs_precision)
        return PadicNumber._from_scaled(self.p, self.valuation, self.unit, abs_precision)


def from_rational(num: int | Fraction, den: int, p: int, K: int) -> PadicNumber:
    """The expansion of num/den truncated modulo p**K."""
    if den == 0:
        raise ZeroDenominator("denominator is zero")
    x = Fraction(num) / den
    if x == 0:
        return PadicNumber.zero(p, K)
    a, b = x.numerator, x.denominator
    va, vb = int_valuation(a, p), int_valuation(b, p)
    v = va - vb
    m = K - v
    if m <= 0:
        return PadicNumber.zero(p, K)
    mod = p**m
    unit = (a // p**va) * pow(b // p**vb, -1, mod) % mod
    return PadicNumber._raw(p, v, unit, K)


def as_padic(x: Scalar, p: int, K: int) -> PadicNumber:
    if isinstance(x, PadicNumber):
        if x.p != p:
            raise PrimeMismatch(f"expected an element of Q_{p}, got Q_{x.p}")
        return x
    x = Fraction(x)
    return from_rational(x.numerator, x.denominator, p, K)


def add(x: PadicNumber, y: PadicNumber) -> PadicNumber:
    return x + y


def sub(x: PadicNumber, y: PadicNumber) -> PadicNumber:
    return x - y


def mul(x: PadicNumber, y: PadicNumber) -> PadicNumber:
    return x * y


def invert(x: PadicNumber) -> PadicNumber:
    return x.invert()


def div(x: PadicNumber, y: PadicNumber) -> PadicNumber:
    return x / y


def norm(x: PadicNumber) -> NormValue:
    return x.norm()


def vanishes_to(x: PadicNumber, precision: int) -> bool:
    """True iff x is certified to be 0 modulo p**precision.

    A zero-to-precision value whose own precision is below the requested one
    cannot be certified either way and raises ``InsufficientPrecision``.
    """
    if x.is_zero:
        if x.abs_precision < precision:
            raise InsufficientPrecision(
                f"difference known only modulo {x.p}^{x.abs_precision}, "
                f"need {x.p}^{precision}")
        return True
    return x.valuation >= precision


# -- square roots -----------------------------------------------------------

def _sqrt_obstruction(a: PadicNumber) -> str | None:
    if a.is_zero:
        raise InsufficientPrecision("square root of a value that is 0 to precision")
    if a.valuation % 2:
        return "OddValuation"
    if a.p == 2:
        if a.rel_precision < 3:
            raise InsufficientPrecision("2-adic square test needs three unit digits")
        return None if a.unit % 8 == 1 else "TwoAdicObstruction"
    return None if euler_is_qr(a.unit % a.p, a.p) else "NonResidue"


def sqrt_exists(a: PadicNumber) -> bool:
    """Whether x^2 = a is solvable in Q_p, decided from the leading digits."""
    return _sqrt_obstruction(a) is None


def sqrt(a: PadicNumber) -> PadicNumber:
    """Canonical square root, lifted by Newton iteration.

    For odd p the leading digit of the root lies in [1, (p-1)/2]. For p = 2
    the unit of the root is 1 mod 4 and one digit of precision is lost.
    """
    reason = _sqrt_obstruction(a)
    if reason is not None:
        raise NotASquare(reason, f"{reason}: no square root in Q_{a.p}")
    p, u, m = a.p, a.unit, a.rel_precision
    half = a.valuation // 2
    if p == 2:
        x = 1
        for i in range(3, m):
            if (x * x - u) % (1 << (i + 1)):
                x += 1 << (i - 1)
        mod = 1 << (m - 1)
        r = x % mod
        if r % 4 == 3:
            r = -r % mod
        return PadicNumber._raw(2, half, r, half + m - 1)
    r, k = int(sqrt_mod(u, p)), 1
    while k < m:
        k = min(2 * k, m)
        mod = p**k
        r = (r - (r * r - u) * pow(2 * r, -1, mod)) % mod
    return PadicNumber._raw(p, half, r, half + m)


# -- exp and log ------------------------------------------------------------

def _floor_log(n: int, p: int) -> int:
    k, q = 0, p
    while q <= n:
        q *= p
        k += 1
    return k


def log_p(x: PadicNumber) -> PadicNumber:
    """p-adic logarithm on the disc |x - 1|_p < 1."""
    t = x - 1
    if t.is_zero:
        return t
    if t.valuation < 1:
        raise DomainError(f"log_{x.p} needs |x - 1| < 1")
    p, v, K = x.p, t.valuation, t.abs_precision
    total, power, n = PadicNumber.zero(p, K), t, 1
    # valuation of t^n / n is at least n*v - floor(log_p n), nondecreasing in n
    while n * v - _floor_log(n, p) < K:
        term = power / n
        total = total + term if n % 2 else total - term
        power = power * t
        n += 1
    return total


def exp_p(x: PadicNumber) -> PadicNumber:
    """p-adic exponential on v(x) >= 1 (p odd) or v(x) >= 2 (p = 2)."""
    p = x.p
    if x.is_zero:
        return from_rational(1, 1, p, x.abs_precision)
    if x.valuation < (2 if p == 2 else 1):
        raise DomainError(f"exp_{p} diverges at valuation {x.valuation}")
    v, K = x.valuation, x.abs_precision
    total = from_rational(1, 1, p, K)
    term, n = total, 1
    # v_p(n!) <= (n - 1)/(p - 1), so n*v - (n - 1)/(p - 1) bounds the term valuation
    while n * v * (p - 1) - (n - 1) < K * (p - 1):
        term = term * x / n
        total = total + term
        n += 1
    return total
