"""Exact arithmetic in the cyclotomic fields Q(zeta_{p^L}).

An element of conductor C = p^L is stored by its coordinates in the basis
1, z, ..., z^(phi(C)-1), z = exp(2 pi i / C), as integer numerators over a
common positive denominator.  Reduction modulo Phi_C(x) = sum_{j<p} x^(j C/p)
only touches the top block of length C/p.  Forms are kept at the minimal
conductor so equal field elements have equal coordinates.

The array helpers operate on the last axis and are shared with the grid engine.
"""

from fractions import Fraction
import math

import numpy as np

from . import config
from .errors import NotInvertible, ResourceCapExceeded

INT_LIMIT = 2**62


def phi(p, L):
    return 1 if L == 0 else p ** (L - 1) * (p - 1)


def check_conductor(p, L):
    if p ** L > config.max_conductor():
        raise ResourceCapExceeded(
            f"conductor {p}^{L} exceeds cap {config.max_conductor()} (NACALC_MAX_CONDUCTOR)")


def _max_abs(arr):
    if arr.size == 0:
        return 0
    if arr.dtype == object:
        return max(abs(int(v)) for v in arr.flat)
    return int(np.abs(arr).max())


def safe_int_array(arr):
    """int64 when every entry fits comfortably, object dtype otherwise."""
    if arr.dtype == object:
        if _max_abs(arr) < INT_LIMIT:
            return arr.astype(np.int64)
        return arr
    return arr


def widen(arr, bound):
    """Switch to object dtype when values could exceed int64 after growth by ``bound``."""
    if arr.dtype != object and _max_abs(arr) * bound >= INT_LIMIT:
        return arr.astype(object)
    return arr


def to_group_ring(arr, p, L, C):
    """Canonical coordinates at conductor p^L to a length-C group ring vector."""
    out = np.zeros(arr.shape[:-1] + (C,), dtype=arr.dtype)
    step = C // p**L
    out[..., : arr.shape[-1] * step : step] = arr
    return out


def reduce_group_ring(arr, p, C):
    """Group ring vector of length C = p^L to canonical coordinates."""
    if C == 1:
        return arr
    m = C // p
    v = arr.reshape(arr.shape[:-1] + (p, m))
    w = v[..., : p - 1, :] - v[..., p - 1 : p, :]
    return w.reshape(arr.shape[:-1] + ((p - 1) * m,))


def lift(arr, p, L, L2):
    """Embed canonical coordinates from conductor p^L into p^L2 (L2 >= L)."""
    if L2 == L:
        return arr
    out = np.zeros(arr.shape[:-1] + (phi(p, L2),), dtype=arr.dtype)
    step = p ** (L2 - L)
    out[..., : arr.shape[-1] * step : step] = arr
    return out


def minimize(arr, p, L):
    """Descend to the smallest conductor whose field contains every entry."""
    while L > 0:
        if L >= 2:
            mask = np.ones(arr.shape[-1], dtype=bool)
            mask[::p] = False
            if np.any(arr[..., mask] != 0):
                break
            arr = arr[..., ::p]
        else:
            if arr.shape[-1] > 1 and np.any(arr[..., 1:] != 0):
                break
            arr = arr[..., :1]
        L -= 1
    return arr, L


def gcd_content(arr, den):
    """Divide numerators and denominator by their common gcd."""
    if arr.size == 0:
        return arr, 1
    if arr.dtype == object:
        g = 0
        for v in arr.flat:
            g = math.gcd(g, int(v))
            if g == 1:
                break
    else:
        g = int(np.gcd.reduce(arr.ravel()))
    g = math.gcd(g, den)
    if g == 0:
        return arr, 1
    if g > 1:
        arr = arr // g
        den //= g
    return arr, den


def convolve_cyclic(a, b, C):
    """Exact cyclic convolution along the last axis (broadcasting leading axes)."""
    if C == 1:
        return a * b
    bound = _max_abs(a) * _max_abs(b) * C
    if a.dtype != object and b.dtype != object and bound < 2**44:
        fa = np.fft.rfft(a.astype(np.float64), axis=-1)
        fb = np.fft.rfft(b.astype(np.float64), axis=-1)
        res = np.fft.irfft(fa * fb, n=C, axis=-1)
        out = np.rint(res)
        if np.abs(res - out).max(initial=0.0) > 0.1:
            raise ArithmeticError("floating convolution lost exactness")
        return out.astype(np.int64)
    a = a.astype(object)
    b = b.astype(object)
    shape = np.broadcast_shapes(a.shape, b.shape)
    out = np.zeros(shape, dtype=object)
    for i in range(C):
        out += a[..., i : i + 1] * np.roll(b, i, axis=-1)
    return safe_int_array(out)


class Cyclotomic:
    """Element of Q(zeta_{p^L}) in canonical minimal-conductor form."""

    __slots__ = ("p", "L", "nums", "den")

    def __init__(self, p, L, nums, den=1):
        arr = np.array([int(v) for v in nums], dtype=object)
        den = int(den)
        if den < 0:
            arr, den = -arr, -den
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if p is not None and L > 0:
            if len(arr) != phi(p, L):
                raise ValueError("coordinate vector has the wrong length")
            arr, L = minimize(arr, p, L)
        if not np.any(arr != 0):
            arr, L, den = np.zeros(1, dtype=object), 0, 1
        arr, den = gcd_content(arr, den)
        self.p = p
        self.L = L
        self.nums = tuple(int(v) for v in arr)
        self.den = den

    @classmethod
    def rational(cls, x, p=None):
        x = Fraction(x)
        return cls(p, 0, (x.numerator,), x.denominator)

    @classmethod
    def root_of_unity(cls, p, L, k):
        """zeta_{p^L}^k."""
        check_conductor(p, L)
        C = p**L
        v = np.zeros(C, dtype=object)
        v[k % C] = 1
        return cls(p, L, reduce_group_ring(v, p, C))

    @classmethod
    def from_array(cls, p, L, arr, den):
        return cls(p, L, list(arr), den)

    def array(self, L=None):
        """Numerators as an object array, lifted to conductor p^L when given."""
        arr = np.array(self.nums, dtype=object)
        if L is not None and L != self.L:
            arr = lift(arr, self.p, self.L, L)
        return arr

    def is_zero(self):
        return self.L == 0 and self.nums[0] == 0

    def is_rational(self):
        return self.L == 0

    def as_rational(self):
        if self.L != 0:
            raise ValueError("not a rational number")
        return Fraction(self.nums[0], self.den)

    def _common(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(other, self.p)
        p = self.p if self.p is not None else other.p
        if self.p is not None and other.p is not None and self.p != other.p:
            raise ValueError("mixed cyclotomic primes")
        return other, p

    def __add__(self, other):
        other, p = self._common(other)
        L = max(self.L, other.L)
        a = self.array(L) * other.den
        b = other.array(L) * self.den
        return Cyclotomic(p, L, a + b, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.p, self.L, [-v for v in self.nums], self.den)

    def __sub__(self, other):
        other, _ = self._common(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other, p = self._common(other)
        if self.L == 0 or other.L == 0:
            c, v = (self, other) if self.L == 0 else (other, self)
            return Cyclotomic(p, v.L, [c.nums[0] * x for x in v.nums], c.den * v.den)
        L = max(self.L, other.L)
        check_conductor(p, L)
        C = p**L
        a = to_group_ring(self.array(), p, self.L, C)
        b = to_group_ring(other.array(), p, other.L, C)
        prod = convolve_cyclic(a, b, C)
        return Cyclotomic(p, L, reduce_group_ring(prod, p, C), self.den * other.den)

    __rmul__ = __mul__

    def unit_monomial(self):
        """(r, k, L) with self = r * zeta_{p^L}^k, or None."""
        if self.L == 0:
            return (Fraction(self.nums[0], self.den), 0, 0)
        p = self.p
        support = [i for i, v in enumerate(self.nums) if v != 0]
        if len(support) == 1:
            i = support[0]
            return (Fraction(self.nums[i], self.den), i, self.L)
        m = p ** (self.L - 1)
        r = support[0]
        if r < m and support == [j * m + r for j in range(p - 1)]:
            vals = {self.nums[i] for i in support}
            if len(vals) == 1:
                return (Fraction(-vals.pop(), self.den), (p - 1) * m + r, self.L)
        return None

    def inverse(self):
        mono = self.unit_monomial()
        if mono is None:
            raise NotInvertible("only rational multiples of roots of unity are inverted")
        r, k, L = mono
        if r == 0:
            raise ZeroDivisionError("inverse of zero")
        if L == 0:
            return Cyclotomic.rational(1 / r, self.p)
        return Cyclotomic.root_of_unity(self.p, L, -k) * Cyclotomic.rational(1 / r)

    def __truediv__(self, other):
        other, _ = self._common(other)
        return self * other.inverse()

    def _key(self):
        if self.L == 0:
            return (0, Fraction(self.nums[0], self.den))
        return (self.p, self.L, self.nums, self.den)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.L == 0 and Fraction(self.nums[0], self.den) == other
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def max_coeff_norm(self, s):
        """Largest s-adic norm among the coordinates (an upper bound on |self|_s)."""
        from .padic import norm_rational

        return max(norm_rational(Fraction(v, self.den), s) for v in self.nums)

    def min_coeff_ord(self, s):
        """Smallest s-adic valuation among the nonzero coordinates."""
        from .padic import ord_rational

        return min(ord_rational(Fraction(v, self.den), s) for v in self.nums if v != 0)

    def to_complex(self, dps=30):
        import mpmath

        with mpmath.workdps(dps):
            if self.L == 0:
                return mpmath.mpc(Fraction(self.nums[0], self.den).numerator) / self.den
            C = self.p**self.L
            z = mpmath.exp(2j * mpmath.pi / C)
            return sum(v * z**i for i, v in enumerate(self.nums)) / self.den

    def to_json(self):
        C = 1 if self.L == 0 else self.p**self.L
        out = {"conductor": C, "coeffs": [f"{v}/{self.den}" for v in self.nums]}
        if self.p is not None:
            out["p"] = self.p
        return out

    @classmethod
    def from_json(cls, data, p=None):
        if isinstance(data, (str, int)):
            return cls.rational(Fraction(str(data)), p)
        C = int(data.get("conductor", 1))
        p = data.get("p", p)
        coeffs = [Fraction(str(c)) for c in data["coeffs"]]
        if C == 1:
            return cls.rational(coeffs[0], p)
        L = round(math.log(C, p))
        den = math.lcm(*[c.denominator for c in coeffs])
        return cls(p, L, [c.numerator * (den // c.denominator) for c in coeffs], den)

    def __str__(self):
        if self.L == 0:
            return str(Fraction(self.nums[0], self.den))
        C = self.p**self.L
        mono = self.unit_monomial()
        if mono is not None:
            r, k, _ = mono
            base = f"zeta_{C}^{k}" if k != 1 else f"zeta_{C}"
            if r == 1:
                return base
            if r == -1:
                return "-" + base
            return f"{r}*{base}"
        parts = []
        for i, v in enumerate(self.nums):
            if v:
                c = Fraction(v, self.den)
                parts.append(f"{c}" if i == 0 else f"{c}*zeta_{C}^{i}")
        return "(" + " + ".join(parts) + ")"

    def __repr__(self):
        return f"Cyclotomic({self})"
