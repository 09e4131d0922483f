"""Truncated p-adic numbers, grid levels and the fractional-part map."""

from dataclasses import dataclass
from fractions import Fraction
import itertools
import math

from sympy import isprime

from . import config
from .errors import (InsufficientPrecision, OutsideDomain, ResourceCapExceeded,
                     UnsupportedField)

INF = math.inf


def parse_rational(text):
    """Parse "a/b", "a" or a number into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, PAdicNumber):
        return text.to_rational()
    return Fraction(str(text).strip())


def fmt_rational(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def ord_int(n, p):
    """Exponent of p in a nonzero integer."""
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def ord_rational(x, p):
    x = Fraction(x)
    if x == 0:
        return INF
    return ord_int(x.numerator, p) - ord_int(x.denominator, p)


def norm_rational(x, p):
    """|x|_p as an exact Fraction."""
    v = ord_rational(x, p)
    if v == INF:
        return Fraction(0)
    return Fraction(p) ** (-v)


def frac_rational(x, p):
    """Fractional part of a rational in Q_p: a/p^m in [0,1) with x - a/p^m in Z_p."""
    x = Fraction(x)
    d = x.denominator
    m = ord_int(d, p)
    if m == 0:
        return Fraction(0)
    pm = p**m
    u = d // pm
    a = (x.numerator * pow(u, -1, pm)) % pm
    return Fraction(a, pm)


def _check_prime(p):
    if not isinstance(p, int) or not isprime(p):
        raise ValueError(f"{p!r} is not a prime")


@dataclass(frozen=True)
class PAdicNumber:
    """x = p^ord * (d0 + d1 p + ...) known modulo p^(ord + precision)."""

    p: int
    ord: object
    digits: tuple
    precision: int

    def __post_init__(self):
        if self.ord == INF:
            if self.digits:
                raise ValueError("zero has no digits")
        elif not self.digits or self.digits[0] == 0:
            raise ValueError("leading digit must be nonzero")

    @classmethod
    def from_rational(cls, x, p, precision=None):
        _check_prime(p)
        prec = config.default_precision() if precision is None else precision
        if prec < 1:
            raise ValueError("precision must be positive")
        x = Fraction(x)
        if x == 0:
            return cls(p, INF, (), prec)
        v = ord_rational(x, p)
        unit = x / Fraction(p) ** v
        mod = p**prec
        u = (unit.numerator * pow(unit.denominator, -1, mod)) % mod
        return cls._from_unit(p, v, u, prec)

    @classmethod
    def from_int(cls, n, p, precision=None):
        return cls.from_rational(Fraction(n), p, precision)

    @classmethod
    def _from_unit(cls, p, v, u, prec):
        digits = []
        for _ in range(prec):
            u, d = divmod(u, p)
            digits.append(d)
        return cls(p, v, tuple(digits), prec)

    def is_zero(self):
        return self.ord == INF

    def unit(self):
        return sum(d * self.p**i for i, d in enumerate(self.digits))

    def absolute_precision(self):
        if self.is_zero():
            return INF
        return self.ord + self.precision

    def to_rational(self):
        """The truncated representative p^ord * unit as a Fraction."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.p) ** self.ord * self.unit()

    def norm(self):
        return norm_rational(self.to_rational(), self.p)

    def _coerce(self, other):
        if isinstance(other, PAdicNumber):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        return PAdicNumber.from_rational(Fraction(other), self.p, self.precision)

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        absp = min(self.absolute_precision(), other.absolute_precision())
        v = min(self.ord, other.ord)
        total = (self.unit() * self.p ** (self.ord - v)
                 + other.unit() * self.p ** (other.ord - v))
        total %= self.p ** (absp - v)
        if total == 0:
            return PAdicNumber(self.p, INF, (), min(self.precision, other.precision))
        k = ord_int(total, self.p)
        prec = absp - v - k
        return PAdicNumber._from_unit(self.p, v + k, total // self.p**k, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        mod = self.p**self.precision
        return PAdicNumber._from_unit(self.p, self.ord, (-self.unit()) % mod, self.precision)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        prec = min(self.precision, other.precision)
        if self.is_zero() or other.is_zero():
            return PAdicNumber(self.p, INF, (), prec)
        u = (self.unit() * other.unit()) % self.p**prec
        return PAdicNumber._from_unit(self.p, self.ord + other.ord, u, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("p-adic division by zero")
        prec = min(self.precision, other.precision)
        if self.is_zero():
            return PAdicNumber(self.p, INF, (), prec)
        mod = self.p**prec
        u = (self.unit() * pow(other.unit(), -1, mod)) % mod
        return PAdicNumber._from_unit(self.p, self.ord - other.ord, u, prec)

    def __repr__(self):
        if self.is_zero():
            return f"PAdicNumber(0, p={self.p})"
        return f"PAdicNumber({self.to_rational()}, p={self.p}, prec={self.precision})"


def ord(x, p=None):
    """p-adic valuation of a PAdicNumber (or of a rational when p is given)."""
    if isinstance(x, PAdicNumber):
        return x.ord
    if p is None:
        raise ValueError("p is required for rational input")
    return ord_rational(x, p)


def frac_part(x, p=None):
    """Fractional part of x in Q_p, a rational in [0,1) with p-power denominator."""
    if isinstance(x, PAdicNumber):
        if x.is_zero() or x.ord >= 0:
            return Fraction(0)
        if x.precision < -x.ord:
            raise InsufficientPrecision(
                f"need {-x.ord} digits for the fractional part, have {x.precision}")
        return frac_rational(x.to_rational(), x.p)
    if p is None:
        raise ValueError("p is required for rational input")
    return frac_rational(x, p)


@dataclass(frozen=True)
class GridLevel:
    """Truncation lattice p^{-M}Z_p^n / p^N Z_p^n."""

    p: int
    M: int
    N: int
    n: int = 1
    degree: int = 1

    def __post_init__(self):
        _check_prime(self.p)
        if self.degree != 1:
            raise UnsupportedField("only K = Q_p is supported (degree 1)")
        if self.M < 0 or self.N < 0:
            raise ValueError("M and N must be nonnegative")
        if self.n < 1:
            raise ValueError("dimension must be at least 1")

    @property
    def side(self):
        """Points per coordinate, p^(M+N)."""
        return self.p ** (self.M + self.N)

    @property
    def size(self):
        return self.side**self.n

    @property
    def shape(self):
        return (self.side,) * self.n

    @property
    def weight(self):
        """Haar weight of one cell."""
        return Fraction(1, self.p ** (self.n * self.N))

    def dual(self):
        return GridLevel(self.p, self.N, self.M, self.n)

    def with_dim(self, n):
        return GridLevel(self.p, self.M, self.N, n)

    def check_cap(self):
        cap = config.max_grid()
        if self.size > cap:
            raise ResourceCapExceeded(
                f"grid of {self.size} points exceeds cap {cap} (NACALC_MAX_GRID)")

    def coord(self, X):
        """Rational point for integer coordinate X in [0, p^(M+N))."""
        return Fraction(X, self.p**self.M)

    def point(self, index):
        return tuple(self.coord(X) for X in index)

    def index_coord(self, x):
        """Integer coordinate of the cell containing the rational or p-adic x."""
        x = parse_rational(x)
        if x != 0 and ord_rational(x, self.p) < -self.M:
            raise OutsideDomain(f"{x} lies outside p^-{self.M} Z_{self.p}")
        y = x * self.p**self.M
        P = self.side
        num, den = y.numerator, y.denominator
        return (num * pow(den, -1, P)) % P if P > 1 else 0

    def index(self, point):
        if not isinstance(point, (tuple, list)):
            point = (point,)
        if len(point) != self.n:
            raise ValueError(f"expected a point of dimension {self.n}")
        return tuple(self.index_coord(x) for x in point)

    def indices(self):
        return itertools.product(range(self.side), repeat=self.n)

    def coord_ord(self, X):
        """ord_p of the representative X p^-M, None for the zero cell."""
        if X == 0:
            return None
        return ord_int(X, self.p) - self.M

    def to_json(self):
        return {"p": self.p, "M": self.M, "N": self.N, "n": self.n}

    @classmethod
    def from_json(cls, data):
        return cls(int(data["p"]), int(data["M"]), int(data["N"]), int(data.get("n", 1)))


def lattice(level):
    """All lattice points of a level with their Haar weights."""
    level.check_cap()
    w = level.weight
    return [(level.point(idx), w) for idx in level.indices()]


def lattice_to_json(level):
    return [{"point": [fmt_rational(c) for c in pt], "weight": fmt_rational(w)}
            for pt, w in lattice(level)]
