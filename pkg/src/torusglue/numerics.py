"""Exact scalars a + b*sqrt(d) over a fixed real quadratic field.

Every certificate-grade decision in this package reduces to a sign test on
one of these scalars, so all arithmetic here is exact rational arithmetic
on the coefficient pair.  Rounding happens only in `as_float`, at the
reporting edge, and in the explicitly float-typed parallel mode.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

DEFAULT_D = 2

_RATIONAL = (int, Fraction)
_VALIDATED_D: set[int] = set()


class FieldMismatchError(ValueError):
    """Scalars from different quadratic fields were mixed in one expression."""


class ExactnessError(TypeError):
    """An exact decision procedure received floating-point input."""


def is_square_free(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def _check_d(d: int) -> int:
    if d not in _VALIDATED_D:
        if not isinstance(d, int) or not is_square_free(d):
            raise ValueError(f"field index must be a square-free integer >= 2, got {d!r}")
        _VALIDATED_D.add(d)
    return d


def _rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class QuadScalar:
    """Exact field element a + b*sqrt(d) with reduced rational coefficients."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = DEFAULT_D):
        object.__setattr__(self, "a", _rat(a))
        object.__setattr__(self, "b", _rat(b))
        object.__setattr__(self, "d", _check_d(d))

    def __setattr__(self, name, value):
        raise AttributeError("QuadScalar is immutable")

    # -- construction helpers ------------------------------------------------

    @classmethod
    def sqrt_d(cls, d: int = DEFAULT_D) -> "QuadScalar":
        return cls(0, 1, d)

    def _pair(self, other):
        """Rebase both operands into a common field; (None, None) if unsupported.

        Rational-valued scalars mix freely across radicands; two genuinely
        irrational scalars must share d.
        """
        if isinstance(other, QuadScalar):
            if other.d == self.d:
                return self, other
            if other.b == 0:
                return self, QuadScalar(other.a, 0, self.d)
            if self.b == 0:
                return QuadScalar(self.a, 0, other.d), other
            raise FieldMismatchError(
                f"cannot mix sqrt({self.d}) and sqrt({other.d}) scalars"
            )
        if isinstance(other, _RATIONAL):
            return self, QuadScalar(other, 0, self.d)
        return None, None

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- exact ordering ------------------------------------------------------

    def sign(self) -> int:
        """Exact sign in {-1, 0, +1}, decided by comparing a^2 against d*b^2."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        sa = 1 if a > 0 else -1
        sb = 1 if b > 0 else -1
        if sa == sb:
            return sa
        # opposite signs: the larger of a^2 and d*b^2 decides
        gap = a * a - self.d * b * b
        # gap == 0 would make sqrt(d) rational, impossible for square-free d
        assert gap != 0
        return sa if gap > 0 else sb

    def _cmp(self, other) -> int:
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        return (s - o).sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c >= 0

    def __eq__(self, other):
        if isinstance(other, QuadScalar):
            if self.d != other.d:
                # distinct square-free radicals are linearly independent over Q
                return self.b == 0 and other.b == 0 and self.a == other.a
            return self.a == other.a and self.b == other.b
        if isinstance(other, _RATIONAL):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self):
        return QuadScalar(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __add__(self, other):
        if isinstance(other, float):
            return float(self) + other
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        return QuadScalar(s.a + o.a, s.b + o.b, s.d)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, float):
            return float(self) - other
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        return QuadScalar(s.a - o.a, s.b - o.b, s.d)

    def __rsub__(self, other):
        if isinstance(other, float):
            return other - float(self)
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        return QuadScalar(o.a - s.a, o.b - s.b, s.d)

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        return QuadScalar(
            s.a * o.a + s.d * s.b * o.b,
            s.a * o.b + s.b * o.a,
            s.d,
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm a^2 - d*b^2; zero only for the zero scalar."""
        return self.a * self.a - self.d * self.b * self.b

    def conjugate(self) -> "QuadScalar":
        return QuadScalar(self.a, -self.b, self.d)

    def reciprocal(self) -> "QuadScalar":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero scalar")
        return QuadScalar(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        return s * o.reciprocal()

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        return o * s.reciprocal()

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = QuadScalar(1, 0, self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- floor / fractional part ---------------------------------------------

    def _ge_int(self, n: int) -> bool:
        return (self - n).sign() >= 0

    def floor(self) -> int:
        if self.b == 0:
            return self.a.numerator // self.a.denominator
        lo, _ = self.interval(30)
        n = lo.numerator // lo.denominator
        # exact bracketing: the interval is 1e-30 wide, so at most one step
        while self._ge_int(n + 1):
            n += 1
        while not self._ge_int(n):
            n -= 1
        return n

    def floor_frac(self) -> tuple[int, "QuadScalar"]:
        n = self.floor()
        return n, self - n

    def frac(self) -> "QuadScalar":
        return self.floor_frac()[1]

    # -- rational enclosures and float conversion ------------------------------

    def interval(self, digits: int = 30) -> tuple[Fraction, Fraction]:
        """Rational lo <= value <= hi with width about |b| * 10^-digits."""
        if self.b == 0:
            return self.a, self.a
        scale = 10 ** digits
        r = math.isqrt(self.d * scale * scale)
        lo_s = Fraction(r, scale)
        hi_s = Fraction(r + 1, scale)
        if self.b > 0:
            return self.a + self.b * lo_s, self.a + self.b * hi_s
        return self.a + self.b * hi_s, self.a + self.b * lo_s

    def __float__(self) -> float:
        if self.b == 0:
            return float(self.a)
        lo, hi = self.interval(40)
        return float((lo + hi) / 2)

    # -- formatting ------------------------------------------------------------

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.d})"

    def __repr__(self) -> str:
        return f"QuadScalar({self.a}, {self.b}, d={self.d})"


# -- generic scalar helpers (QuadScalar | Fraction | int | float) --------------


def is_exact(x) -> bool:
    return isinstance(x, (QuadScalar, *_RATIONAL))


def require_exact(x, what: str = "value"):
    if not is_exact(x):
        raise ExactnessError(f"{what} must be exact, got {type(x).__name__}")
    return x


def as_float(x) -> float:
    if isinstance(x, QuadScalar):
        return float(x)
    return float(x)


def sign_of(x) -> int:
    if isinstance(x, QuadScalar):
        return x.sign()
    return (x > 0) - (x < 0)


def floor_frac(x):
    """(floor, fractional part) with the fractional part in the input's type."""
    if isinstance(x, QuadScalar):
        return x.floor_frac()
    if isinstance(x, float):
        n = math.floor(x)
        return n, x - n
    n = math.floor(x)
    return n, x - n


def frac(x):
    return floor_frac(x)[1]


def nearest_int(x) -> int:
    if isinstance(x, float):
        return math.floor(x + 0.5)
    if isinstance(x, QuadScalar):
        return (x + Fraction(1, 2)).floor()
    return math.floor(x + Fraction(1, 2))


def scalar_lt(x, y) -> bool:
    """Exact order when both operands are exact, float order otherwise."""
    if is_exact(x) and is_exact(y):
        return sign_of(x - y) < 0
    return as_float(x) < as_float(y)


def scalar_min(x, y):
    return x if scalar_lt(x, y) else y


def scalar_abs(x):
    if isinstance(x, QuadScalar):
        return abs(x)
    return abs(x)


def rational_interval(x, digits: int = 30) -> tuple[Fraction, Fraction]:
    """Exact rational enclosure of an exact scalar."""
    if isinstance(x, QuadScalar):
        return x.interval(digits)
    r = _rat(require_exact(x))
    return r, r


def _sqrt_lower(f: Fraction, digits: int) -> Fraction:
    scale = 10 ** digits
    n = (f.numerator * scale * scale) // f.denominator
    return Fraction(math.isqrt(n), scale)


def _sqrt_upper(f: Fraction, digits: int) -> Fraction:
    scale = 10 ** digits
    n = (f.numerator * scale * scale) // f.denominator
    return Fraction(math.isqrt(n) + 1, scale)


def sqrt_interval(x, digits: int = 30) -> tuple[Fraction, Fraction]:
    """Rational enclosure of sqrt(x) for an exact scalar x >= 0."""
    lo, hi = rational_interval(x, digits)
    if lo < 0:
        if sign_of(x) < 0:
            raise ValueError("sqrt of a negative scalar")
        lo = Fraction(0)
    return _sqrt_lower(lo, digits), _sqrt_upper(hi, digits)


def sqrt_as_float(x) -> float:
    if is_exact(x):
        if sign_of(x) == 0:
            return 0.0
        lo, hi = sqrt_interval(x, 40)
        return float((lo + hi) / 2)
    return math.sqrt(max(0.0, float(x)))


# -- scalar modes ---------------------------------------------------------------


@dataclass(frozen=True)
class ScalarMode:
    """Exact mode performs no rounding; float mode compares with tolerances."""

    exact: bool = True
    eps: float = 1e-9
    identity_eps: float = 1e-12

    def __post_init__(self):
        if not self.exact and not (self.eps > 0 and self.identity_eps > 0):
            raise ValueError("float mode requires positive tolerances")

    @classmethod
    def float_mode(cls, eps: float = 1e-9, identity_eps: float = 1e-12) -> "ScalarMode":
        return cls(exact=False, eps=eps, identity_eps=identity_eps)

    def describe(self) -> dict:
        if self.exact:
            return {"kind": "exact"}
        return {"kind": "float", "eps": self.eps, "identity_eps": self.identity_eps}


EXACT = ScalarMode()
FLOAT = ScalarMode.float_mode()


# -- wire grammar -----------------------------------------------------------------

_QUAD_RE = re.compile(
    r"^\s*(?P<a>[+-]?\d+(?:/\d+)?)\s*\+\s*(?P<b>[+-]?\d+(?:/\d+)?)\*sqrt\((?P<d>\d+)\)\s*$"
)


def format_scalar(x) -> str:
    """Canonical text form: '<rat>' or '<rat> + <rat>*sqrt(<int>)', reduced."""
    if isinstance(x, QuadScalar):
        return str(x)
    if isinstance(x, _RATIONAL):
        return str(_rat(x))
    raise ExactnessError(f"no exact wire form for {type(x).__name__}")


def parse_scalar(text: str, d: int | None = None):
    """Inverse of format_scalar; returns Fraction or QuadScalar."""
    m = _QUAD_RE.match(text)
    if m:
        pd = int(m.group("d"))
        if d is not None and pd != d:
            raise FieldMismatchError(f"expected sqrt({d}), got sqrt({pd})")
        return QuadScalar(Fraction(m.group("a")), Fraction(m.group("b")), pd)
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a scalar literal: {text!r}") from exc
