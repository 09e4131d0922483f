"""Grid functions: UsNumber-valued functions on a truncation lattice.

Values are stored densely, one array per monomial s^alpha (s^i)^beta.  Each
array holds cyclotomic coordinates (last axis) at every lattice point as
integers over a common denominator, which keeps transforms and pointwise
arithmetic vectorized while staying exact.
"""

from fractions import Fraction
import itertools
import math

import numpy as np

from .cyclotomic import (Cyclotomic, check_conductor, convolve_cyclic, gcd_content,
                         lift, minimize, phi, reduce_group_ring, safe_int_array,
                         to_group_ring, widen, _max_abs)
from .errors import LevelMismatch
from .exponent import Exponent
from .padic import GridLevel, fmt_rational, ord_int, parse_rational
from .value import UsNumber, ZERO_EXP, us


class CycArray:
    """Array of elements of Q(zeta_{p^L}): integer numerators over one denominator."""

    __slots__ = ("p", "L", "num", "den")

    def __init__(self, p, L, num, den=1):
        self.p = p
        self.L = L
        self.num = num
        self.den = int(den)

    @classmethod
    def rational(cls, p, values):
        """From an array of Fractions or ints."""
        values = np.asarray(values, dtype=object)
        den = 1
        for v in values.flat:
            den = math.lcm(den, Fraction(v).denominator)
        num = np.empty(values.shape + (1,), dtype=object)
        for idx, v in np.ndenumerate(values):
            v = Fraction(v)
            num[idx + (0,)] = v.numerator * (den // v.denominator)
        return cls(p, 0, safe_int_array(num), den).normalized()

    def copy(self):
        return CycArray(self.p, self.L, self.num.copy(), self.den)

    @property
    def grid_shape(self):
        return self.num.shape[:-1]

    def normalized(self):
        num, L = minimize(self.num, self.p, self.L)
        num, den = gcd_content(num, self.den)
        return CycArray(self.p, L, safe_int_array(np.ascontiguousarray(num)), den)

    def is_zero(self):
        return not np.any(self.num != 0)

    def lifted(self, L):
        return lift(self.num, self.p, self.L, L)

    def __add__(self, other):
        L = max(self.L, other.L)
        den = math.lcm(self.den, other.den)
        fa, fb = den // self.den, den // other.den
        a = widen(self.lifted(L), fa * 2)
        b = widen(other.lifted(L), fb * 2)
        if a.dtype == object or b.dtype == object:
            a, b = a.astype(object), b.astype(object)
        return CycArray(self.p, L, a * fa + b * fb, den)

    def __neg__(self):
        return CycArray(self.p, self.L, -self.num, self.den)

    def scale(self, x):
        """Multiply by a rational."""
        x = Fraction(x)
        num = widen(self.num, abs(x.numerator) + 1)
        return CycArray(self.p, self.L, num * x.numerator, self.den * x.denominator)

    def mul_scalar(self, c):
        """Multiply every entry by a Cyclotomic."""
        if c.is_rational():
            return self.scale(c.as_rational())
        other = CycArray(self.p, c.L, np.array(c.nums, dtype=object).reshape(
            (1,) * len(self.grid_shape) + (-1,)), c.den)
        return self.mul(other)

    def mul(self, other):
        """Pointwise product (broadcasting grid axes)."""
        p = self.p if self.p is not None else other.p
        if self.L == 0 or other.L == 0:
            a, b = (self, other) if self.L == 0 else (other, self)
            x, y = a.num, b.num
            bound = _max_abs(x) * _max_abs(y)
            if bound >= 2**62:
                x, y = x.astype(object), y.astype(object)
            return CycArray(p, b.L, x[..., 0:1] * y, a.den * b.den)
        L = max(self.L, other.L)
        check_conductor(p, L)
        C = p**L
        a = to_group_ring(self.num, p, self.L, C)
        b = to_group_ring(other.num, p, other.L, C)
        prod = convolve_cyclic(a, b, C)
        return CycArray(p, L, reduce_group_ring(prod, p, C), self.den * other.den)

    def value(self, idx):
        return Cyclotomic(self.p, self.L, list(self.num[tuple(idx)]), self.den)

    def equals(self, other):
        a = self.normalized()
        b = other.normalized()
        return (a.L == b.L and a.den == b.den and a.num.shape == b.num.shape
                and bool(np.all(a.num == b.num)))


def _fold_key(alpha, s):
    """Split alpha into a canonical exponent and a rational factor s^n."""
    n = math.floor(alpha.constant_part())
    if n:
        return alpha - n, Fraction(s) ** n
    return alpha, Fraction(1)


class GridFunction:
    """A function on the lattice of ``level`` with values in U_s."""

    def __init__(self, level, parts=None, s=None):
        self.level = level
        self.s = s
        self.parts = {}
        for key, arr in (parts or {}).items():
            if arr.grid_shape != level.shape:
                raise ValueError("array shape does not match the level")
            self._accumulate(key, arr)
        self.parts = {k: v.normalized() for k, v in self.parts.items() if not v.is_zero()}

    def _accumulate(self, key, arr):
        alpha, beta = key
        alpha, factor = _fold_key(alpha, self.s) if self.s else (alpha, Fraction(1))
        if factor != 1:
            arr = arr.scale(factor)
        key = (alpha, beta)
        self.parts[key] = self.parts[key] + arr if key in self.parts else arr

    # construction
    @classmethod
    def zeros(cls, level, s=None):
        return cls(level, {}, s)

    @classmethod
    def from_rational_array(cls, level, values, s=None):
        values = np.asarray(values, dtype=object).reshape(level.shape)
        return cls(level, {(ZERO_EXP, ZERO_EXP): CycArray.rational(level.p, values)}, s)

    @classmethod
    def from_values(cls, level, values, s=None):
        """values maps lattice points (or index tuples) to UsNumbers or rationals."""
        level.check_cap()
        entries = {}
        for pt, val in values.items():
            idx = _as_index(level, pt)
            val = us(val, s)
            s = s or val.s
            for key, c in val.terms.items():
                entries.setdefault(key, []).append((idx, c))
        parts = {}
        for key, items in entries.items():
            L = max(c.L for _, c in items)
            den = 1
            for _, c in items:
                den = math.lcm(den, c.den)
            num = np.zeros(level.shape + (phi(level.p, L),), dtype=object)
            for idx, c in items:
                vec = lift(np.array(c.nums, dtype=object), level.p, c.L, L)
                num[idx] += vec * (den // c.den)
            parts[key] = CycArray(level.p, L, num, den)
        return cls(level, parts, s)

    @classmethod
    def from_callable(cls, level, fn, s=None):
        level.check_cap()
        vals = {}
        for idx in level.indices():
            v = fn(level.point(idx))
            if v is not None and not (v == 0):
                vals[idx] = v
        return cls.from_values(level, vals, s)

    @classmethod
    def from_ord_function(cls, level, fn, s=None):
        """Function of the ord pattern: fn receives a tuple of ords (None for the zero cell)."""
        level.check_cap()
        axis_ords = [ord_pattern(level)] * level.n
        distinct = sorted({o for o in axis_ords[0]}, key=lambda o: (o is None, o))
        parts = {}
        for pattern in itertools.product(distinct, repeat=level.n):
            val = fn(pattern)
            if val is None:
                continue
            val = us(val, s)
            if val.is_zero():
                continue
            s = s or val.s
            mask = np.ones(level.shape, dtype=bool)
            for axis, o in enumerate(pattern):
                m1 = np.array([x == o for x in axis_ords[axis]])
                shape = [1] * level.n
                shape[axis] = level.side
                mask = mask & m1.reshape(shape)
            for key, c in val.terms.items():
                arr = mask_array(level.p, mask, c)
                parts[key] = parts[key] + arr if key in parts else arr
        return cls(level, parts, s)

    @classmethod
    def indicator(cls, level, pred):
        return cls.from_callable(level, lambda x: 1 if pred(x) else 0)

    @classmethod
    def ball_indicator(cls, level, k=0):
        """Indicator of p^k Z_p^n (k = 0 gives the unit ball)."""
        return cls.from_ord_function(
            level, lambda pat: 1 if all(o is None or o >= k for o in pat) else 0)

    @classmethod
    def delta(cls, level):
        """p^(nN) times the indicator of the zero cell (the identity for convolution)."""
        vals = np.zeros(level.shape, dtype=object)
        vals[(0,) * level.n] = Fraction(level.p ** (level.n * level.N))
        return cls.from_rational_array(level, vals)

    # access
    def value_at_index(self, idx):
        total = UsNumber.const(0, self.s)
        terms = {}
        for key, arr in self.parts.items():
            c = arr.value(idx)
            if not c.is_zero():
                terms[key] = c
        return UsNumber(terms, self.s) if terms else total

    def __call__(self, point):
        return self.value_at_index(_as_index(self.level, point))

    def support_mask(self):
        mask = np.zeros(self.level.shape, dtype=bool)
        for arr in self.parts.values():
            mask |= np.any(arr.num != 0, axis=-1)
        return mask

    def items(self):
        """(point, value) pairs over the support, in index order."""
        mask = self.support_mask()
        for idx in zip(*np.nonzero(mask)):
            idx = tuple(int(i) for i in idx)
            yield self.level.point(idx), self.value_at_index(idx)

    def is_zero(self):
        return not self.parts

    def is_rational(self):
        return all(k == (ZERO_EXP, ZERO_EXP) and a.L == 0 for k, a in self.parts.items())

    # arithmetic
    def _check(self, other):
        if not isinstance(other, GridFunction):
            raise TypeError("expected a GridFunction")
        if other.level != self.level:
            raise LevelMismatch(f"levels differ: {self.level} vs {other.level}")
        if self.s and other.s and self.s != other.s:
            raise ValueError("grid functions over different bases s")
        return self.s or other.s

    def __add__(self, other):
        s = self._check(other)
        parts = {k: v.copy() for k, v in self.parts.items()}
        for k, v in other.parts.items():
            parts[k] = parts[k] + v if k in parts else v
        return GridFunction(self.level, parts, s)

    def __neg__(self):
        return GridFunction(self.level, {k: -v for k, v in self.parts.items()}, self.s)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        """Multiply by a scalar (rational, Cyclotomic or UsNumber)."""
        c = us(c, self.s)
        s = self.s or c.s
        out = GridFunction(self.level, {}, s)
        for (a1, b1), arr in self.parts.items():
            for (a2, b2), cc in c.terms.items():
                out._accumulate((a1 + a2, b1 + b2), arr.mul_scalar(cc))
        out.parts = {k: v.normalized() for k, v in out.parts.items() if not v.is_zero()}
        return out

    def __mul__(self, other):
        if not isinstance(other, GridFunction):
            return self.scale(other)
        s = self._check(other)
        out = GridFunction(self.level, {}, s)
        for (a1, b1), x in self.parts.items():
            for (a2, b2), y in other.parts.items():
                out._accumulate((a1 + a2, b1 + b2), x.mul(y))
        out.parts = {k: v.normalized() for k, v in out.parts.items() if not v.is_zero()}
        return out

    __rmul__ = scale

    def map_parts(self, fn, level=None):
        return GridFunction(level or self.level,
                            {k: fn(v) for k, v in self.parts.items()}, self.s)

    def restrict(self, mask):
        mask = np.asarray(mask, dtype=bool)[..., None]
        return self.map_parts(lambda a: CycArray(a.p, a.L, np.where(mask, a.num, 0), a.den))

    def reflect(self):
        """x -> -x."""
        def flip(a):
            num = a.num
            for axis in range(self.level.n):
                num = np.roll(np.flip(num, axis=axis), 1, axis=axis)
            return CycArray(a.p, a.L, num, a.den)

        return self.map_parts(flip)

    def translate(self, idx):
        """x -> f(x - y) for the lattice point with index idx."""
        axes = tuple(range(self.level.n))
        return self.map_parts(lambda a: CycArray(a.p, a.L, np.roll(a.num, idx, axis=axes), a.den))

    def equals(self, other):
        if self.level != other.level or set(self.parts) != set(other.parts):
            return False
        return all(self.parts[k].equals(other.parts[k]) for k in self.parts)

    def __eq__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    # io
    def to_json(self):
        values = [{"point": [fmt_rational(c) for c in pt], "value": v.to_json()}
                  for pt, v in self.items()]
        out = {"level": self.level.to_json(), "values": values}
        if self.s is not None:
            out["s"] = self.s
        return out

    @classmethod
    def from_json(cls, data, s=None):
        level = GridLevel.from_json(data["level"])
        s = data.get("s", s)
        vals = {}
        for entry in data.get("values", []):
            pt = tuple(parse_rational(c) for c in entry["point"])
            val = UsNumber.from_json(entry["value"], s, level.p)
            s = s or val.s
            idx = level.index(pt)
            vals[idx] = vals[idx] + val if idx in vals else val
        return cls.from_values(level, vals, s)

    def __repr__(self):
        return f"GridFunction(level={self.level}, monomials={len(self.parts)})"


def _as_index(level, pt):
    if isinstance(pt, tuple) and len(pt) == level.n and all(
            isinstance(c, (int, np.integer)) and not isinstance(c, bool) for c in pt):
        return tuple(int(c) % level.side for c in pt)
    if not isinstance(pt, (tuple, list)):
        pt = (pt,)
    return level.index(tuple(pt))


def ord_pattern(level):
    """ord_p of each coordinate representative X p^-M (None at 0)."""
    return [level.coord_ord(X) for X in range(level.side)]


def ord_array(level):
    """Per-axis integer array of ords with the zero cell marked by level.N (its true floor)."""
    return np.array([level.N if X == 0 else ord_int(X, level.p) - level.M
                     for X in range(level.side)])


def mask_array(p, mask, c):
    """CycArray equal to c on mask and 0 elsewhere."""
    vec = np.array(c.nums, dtype=object)
    num = np.zeros(mask.shape + (len(vec),), dtype=object)
    num[mask] = vec
    return CycArray(p, c.L, safe_int_array(num), c.den)


def root_array(p, L, exps, mask=None):
    """CycArray with entries zeta_{p^L}^exps (0 outside mask)."""
    C = p**L
    exps = np.asarray(exps) % C
    gr = np.zeros(exps.shape + (C,), dtype=np.int64)
    np.put_along_axis(gr, exps[..., None], 1, axis=-1)
    if mask is not None:
        gr = gr * np.asarray(mask, dtype=np.int64)[..., None]
    return CycArray(p, L, reduce_group_ring(gr, p, C), 1)


# transforms

_INDEX_CACHE = {}


def _butterfly_index(p, P, C, unit):
    """Flat gather indices combining the p sub-transforms of a radix-p stage."""
    key = (p, P, C, unit % C)
    idx = _INDEX_CACHE.get(key)
    if idx is None:
        Q = P // p
        y = np.arange(P)
        j = np.arange(C)
        idx = []
        for x0 in range(p):
            sh = (unit * x0 * y) % C
            cols = (j[None, :] - sh[:, None]) % C
            idx.append((x0 * Q * C + (y % Q)[:, None] * C + cols).ravel())
        _INDEX_CACHE[key] = idx
    return idx


def _fft_axis(a, p, P, C, unit):
    """Radix-p DFT along axis 1 of a (B, P, C) group-ring array with root zeta_C^unit."""
    if P == 1:
        return a
    B = a.shape[0]
    Q = P // p
    sub = a.reshape(B, Q, p, C).transpose(0, 2, 1, 3).reshape(B * p, Q, C)
    G = _fft_axis(sub, p, Q, C, unit * p).reshape(B, p * Q * C)
    out = None
    for flat in _butterfly_index(p, P, C, unit):
        part = G[:, flat]
        out = part if out is None else out + part
    return out.reshape(B, P, C)


def dft_array(arr, level, sign):
    """Unweighted sum_x zeta_P^(sign X.Y) arr[X] over all grid axes, as a CycArray."""
    p = level.p
    K = level.M + level.N
    P = p**K
    L = max(arr.L, K)
    check_conductor(p, L)
    C = p**L
    num = widen(arr.num, P**level.n)
    gr = to_group_ring(num, p, arr.L, C)
    n = level.n
    unit = sign * (C // P)
    for axis in range(n):
        moved = np.moveaxis(gr, axis, -2)
        shape = moved.shape
        flat = np.ascontiguousarray(moved).reshape(-1, P, C)
        out = _fft_axis(flat, p, P, C, unit).reshape(shape)
        gr = np.moveaxis(out, -2, axis)
    res = reduce_group_ring(np.ascontiguousarray(gr), p, C)
    return CycArray(p, L, res, arr.den)
