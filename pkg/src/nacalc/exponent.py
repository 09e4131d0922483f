"""Exact real exponents: Q-combinations of s^r (1/ln s)^m (2 pi)^k.

Every real number the engine feeds into an s-power lives here: values of
v^s_q, the form B(v, v), symbol values A(y) with their 1/ln s factor and the
2 pi scale of the local-field time logarithm.  Distinct basis symbols are
treated as linearly independent over Q; ordering uses numeric evaluation.
"""

from fractions import Fraction
import math

import mpmath

from . import config
from .errors import IndeterminateOrder
from .padic import fmt_rational, parse_rational

ONE_KEY = (Fraction(0), 0, 0)


def _split(r):
    """r = n + f with integer n and f in [0, 1)."""
    n = math.floor(r)
    return n, r - n


class Exponent:
    """Immutable exact real number in the symbol basis described above.

    terms maps (r, m, k) to a nonzero Fraction, meaning c * s^r * L^m * tau^k
    with r in [0, 1), L = 1/ln s and tau = 2 pi.
    """

    __slots__ = ("s", "terms", "_hash")

    def __init__(self, terms=None, s=None):
        clean = {}
        for key, c in (terms or {}).items():
            r, m, k = key
            r = Fraction(r)
            c = Fraction(c)
            n, f = _split(r)
            if n:
                if s is None:
                    raise ValueError("a base s is needed for s-powers")
                c *= Fraction(s) ** n
            key = (f, int(m), int(k))
            if key != ONE_KEY and key[0] != 0 and s is None:
                raise ValueError("a base s is needed for s-powers")
            if key[1] and s is None:
                raise ValueError("a base s is needed for 1/ln s")
            clean[key] = clean.get(key, Fraction(0)) + c
        self.terms = {k: v for k, v in clean.items() if v != 0}
        self.s = s
        self._hash = None

    # constructors
    @classmethod
    def const(cls, c, s=None):
        return cls({ONE_KEY: Fraction(c)}, s)

    @classmethod
    def s_pow(cls, s, r, c=1):
        """c * s^r for rational r."""
        return cls({(Fraction(r), 0, 0): Fraction(c)}, s)

    @classmethod
    def inv_log(cls, s, c=1):
        """c / ln s."""
        return cls({(Fraction(0), 1, 0): Fraction(c)}, s)

    @classmethod
    def tau(cls, c=1, s=None):
        """c * 2 pi."""
        return cls({(Fraction(0), 0, 1): Fraction(c)}, s)

    @classmethod
    def coerce(cls, x, s=None):
        if isinstance(x, Exponent):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x, s)
        if isinstance(x, str):
            return cls.const(parse_rational(x), s)
        raise TypeError(f"cannot convert {x!r} to an exponent")

    # structure
    def is_zero(self):
        return not self.terms

    def is_rational(self):
        return all(k == ONE_KEY for k in self.terms)

    def rational(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.terms.get(ONE_KEY, Fraction(0))

    def constant_part(self):
        return self.terms.get(ONE_KEY, Fraction(0))

    def _base(self, other):
        if self.s is not None and other.s is not None and self.s != other.s:
            raise ValueError("exponents over different bases s")
        return self.s if self.s is not None else other.s

    # arithmetic
    def __add__(self, other):
        other = Exponent.coerce(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, Fraction(0)) + v
        return Exponent(terms, self._base(other))

    __radd__ = __add__

    def __neg__(self):
        return Exponent({k: -v for k, v in self.terms.items()}, self.s)

    def __sub__(self, other):
        return self + (-Exponent.coerce(other))

    def __rsub__(self, other):
        return Exponent.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Exponent({k: v * other for k, v in self.terms.items()}, self.s)
        other = Exponent.coerce(other)
        s = self._base(other)
        terms = {}
        for (r1, m1, k1), c1 in self.terms.items():
            for (r2, m2, k2), c2 in other.terms.items():
                key = (r1 + r2, m1 + m2, k1 + k2)
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return Exponent(terms, s)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = Exponent.const(1, self.s)
        for _ in range(int(e)):
            out = out * self
        return out

    # comparison
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, str)):
            other = Exponent.coerce(other)
        if not isinstance(other, Exponent):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def numeric(self, dps=None):
        dps = dps or config.NUMERIC_DPS
        with mpmath.workdps(dps):
            total = mpmath.mpf(0)
            for (r, m, k), c in self.terms.items():
                term = mpmath.mpf(c.numerator) / c.denominator
                if r:
                    term *= mpmath.power(self.s, mpmath.mpf(r.numerator) / r.denominator)
                if m:
                    term /= mpmath.log(self.s) ** m
                if k:
                    term *= (2 * mpmath.pi) ** k
                total += term
            return total

    def sign(self):
        """-1, 0 or 1; raises IndeterminateOrder when a nonzero value looks like 0."""
        if self.is_zero():
            return 0
        if self.is_rational():
            v = self.rational()
            return (v > 0) - (v < 0)
        val = self.numeric()
        scale = max([abs(c) for c in self.terms.values()] + [Fraction(1)])
        with mpmath.workdps(config.NUMERIC_DPS):
            if abs(val) < mpmath.mpf(10) ** (-config.ORDER_THRESHOLD_DIGITS) * float(scale):
                raise IndeterminateOrder(f"cannot order {self} against 0")
        return 1 if val > 0 else -1

    def compare(self, other):
        return (self - Exponent.coerce(other)).sign()

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    # io
    def to_json(self):
        terms = [{"r": fmt_rational(r), "L": m, "tau": k, "c": fmt_rational(c)}
                 for (r, m, k), c in sorted(self.terms.items())]
        out = {"terms": terms}
        if self.s is not None:
            out["s"] = self.s
        return out

    @classmethod
    def from_json(cls, data, s=None):
        if isinstance(data, (str, int)):
            return cls.const(parse_rational(data), s)
        s = data.get("s", s)
        terms = {}
        for t in data.get("terms", []):
            key = (parse_rational(t.get("r", "0")), int(t.get("L", 0)), int(t.get("tau", 0)))
            terms[key] = terms.get(key, Fraction(0)) + parse_rational(t["c"])
        return cls(terms, s)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (r, m, k), c in sorted(self.terms.items()):
            sym = []
            if r:
                sym.append(f"s^({r})")
            if m:
                sym.append("L" if m == 1 else f"L^{m}")
            if k:
                sym.append("tau" if k == 1 else f"tau^{k}")
            if not sym:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(sym))
            else:
                parts.append(f"{c}*" + "*".join(sym))
        return " + ".join(parts)

    def __repr__(self):
        return f"Exponent({self})"


def coerce_exponent(x, s=None):
    return Exponent.coerce(x, s)
