"""The value field U_s: finite sums of c * s^alpha * (s^i)^beta.

alpha and beta are Exponents, c is a Cyclotomic.  The rational constant part
of alpha is kept in [0, 1); its integer part is moved into c as a power of s,
so every element has a single canonical form.  s^i is an opaque unit.
"""

from fractions import Fraction
import math

import mpmath

from . import config
from .cyclotomic import Cyclotomic
from .errors import IndeterminateOrder, IndeterminateValuation, NotInvertible
from .exponent import ONE_KEY, Exponent
from .padic import PAdicNumber, frac_part, frac_rational, ord_rational

ZERO_EXP = Exponent()


def _fold(alpha, coeff, s):
    """Move the integer part of alpha's constant into the coefficient."""
    c0 = alpha.constant_part()
    n = math.floor(c0)
    if n:
        alpha = alpha - n
        coeff = coeff * Cyclotomic.rational(Fraction(s) ** n)
    return alpha, coeff


class UsNumber:
    """Immutable element of the value field in canonical form."""

    __slots__ = ("terms", "s", "_hash")

    def __init__(self, terms=None, s=None):
        out = {}
        for (alpha, beta), c in (terms or {}).items():
            alpha = Exponent.coerce(alpha, s)
            beta = Exponent.coerce(beta, s)
            if not isinstance(c, Cyclotomic):
                c = Cyclotomic.rational(Fraction(c))
            if s is None:
                s = alpha.s or beta.s
            if c.is_zero():
                continue
            if alpha.constant_part() and (alpha.constant_part() >= 1 or alpha.constant_part() < 0):
                if s is None:
                    raise ValueError("a base s is needed for s-powers")
                alpha, c = _fold(alpha, c, s)
            key = (alpha, beta)
            out[key] = out[key] + c if key in out else c
        self.terms = {k: v for k, v in out.items() if not v.is_zero()}
        self.s = s
        self._hash = None

    @classmethod
    def const(cls, c, s=None):
        if isinstance(c, UsNumber):
            return c
        return cls({(ZERO_EXP, ZERO_EXP): c}, s)

    @classmethod
    def coerce(cls, x, s=None):
        if isinstance(x, UsNumber):
            return x
        if isinstance(x, (int, Fraction, Cyclotomic)):
            return cls.const(x, s)
        if isinstance(x, str):
            return cls.const(Fraction(x), s)
        raise TypeError(f"cannot convert {x!r} to UsNumber")

    @classmethod
    def from_exponent(cls, e, s=None):
        """Embed a real Exponent with only s-power symbols as an element of U_s."""
        s = e.s or s
        terms = {}
        for (r, m, k), c in e.terms.items():
            if m or k:
                raise NotInvertible(f"{e} has transcendental symbols and is not embedded")
            terms[(Exponent.const(r, s), ZERO_EXP)] = c
        return cls(terms, s)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(a.is_zero() and b.is_zero() for a, b in self.terms)

    def as_cyclotomic(self):
        if not self.terms:
            return Cyclotomic.rational(0)
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return next(iter(self.terms.values()))

    def as_rational(self):
        return self.as_cyclotomic().as_rational()

    def _base(self, other):
        if self.s is not None and other.s is not None and self.s != other.s:
            raise ValueError("values over different bases s")
        return self.s if self.s is not None else other.s

    def __add__(self, other):
        other = UsNumber.coerce(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return UsNumber(terms, self._base(other))

    __radd__ = __add__

    def __neg__(self):
        return UsNumber({k: -v for k, v in self.terms.items()}, self.s)

    def __sub__(self, other):
        return self + (-UsNumber.coerce(other))

    def __rsub__(self, other):
        return UsNumber.coerce(other) - self

    def __mul__(self, other):
        other = UsNumber.coerce(other)
        s = self._base(other)
        terms = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                alpha, c = _fold(a1 + a2, c1 * c2, s) if s else (a1 + a2, c1 * c2)
                key = (alpha, b1 + b2)
                terms[key] = terms[key] + c if key in terms else c
        return UsNumber(terms, s)

    __rmul__ = __mul__

    def __pow__(self, e):
        e = int(e)
        if e < 0:
            return self.inverse() ** (-e)
        out = UsNumber.const(1, self.s)
        for _ in range(e):
            out = out * self
        return out

    def inverse(self):
        if not self.terms:
            raise ZeroDivisionError("inverse of zero")
        if len(self.terms) == 1:
            (alpha, beta), c = next(iter(self.terms.items()))
            return UsNumber({(-alpha, -beta): c.inverse()}, self.s)
        return _invert_radical(self)

    def __truediv__(self, other):
        return self * UsNumber.coerce(other).inverse()

    def __rtruediv__(self, other):
        return UsNumber.coerce(other) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Cyclotomic, str)):
            other = UsNumber.coerce(other)
        if not isinstance(other, UsNumber):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def sorted_terms(self):
        def key(item):
            (alpha, beta), _ = item
            return (alpha.numeric(30), beta.numeric(30), str(alpha), str(beta))

        return sorted(self.terms.items(), key=key)

    def valuation(self, s=None):
        return valuation(self, s)

    def to_json(self):
        return [{"alpha": a.to_json(), "beta": b.to_json(), "coeff": c.to_json()}
                for (a, b), c in self.sorted_terms()]

    @classmethod
    def from_json(cls, data, s=None, p=None):
        if isinstance(data, (str, int)):
            return cls.const(Fraction(str(data)), s)
        terms = {}
        for t in data:
            a = Exponent.from_json(t.get("alpha", "0"), s)
            b = Exponent.from_json(t.get("beta", "0"), s)
            s = s or a.s or b.s
            c = Cyclotomic.from_json(t.get("coeff", "1"), p)
            key = (a, b)
            terms[key] = terms[key] + c if key in terms else c
        return cls(terms, s)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in self.sorted_terms():
            sym = []
            if not a.is_zero():
                sym.append(f"s^({a})")
            if not b.is_zero():
                sym.append(f"(s^i)^({b})")
            if not sym:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(sym))
            else:
                parts.append(f"{c}*" + "*".join(sym))
        return " + ".join(parts)

    def __repr__(self):
        return f"UsNumber({self})"


def _invert_radical(x):
    """Invert an element of Q(s^(1/D)) with rational coefficients."""
    s = x.s
    D = 1
    for (alpha, beta), c in x.terms.items():
        if not beta.is_zero() or not alpha.is_rational() or not c.is_rational():
            raise NotInvertible(f"{x} is outside the supported inversion domain")
        D = math.lcm(D, alpha.rational().denominator)
    # coordinates in the basis s^(i/D), i < D; multiplication matrix columns
    vec = [Fraction(0)] * D
    for (alpha, _), c in x.terms.items():
        vec[int(alpha.rational() * D)] += c.as_rational()

    def times_basis(j):
        col = [Fraction(0)] * D
        for i, v in enumerate(vec):
            k = i + j
            if k >= D:
                col[k - D] += v * s
            else:
                col[k] += v
        return col

    cols = [times_basis(j) for j in range(D)]
    mat = [[cols[j][i] for j in range(D)] + [Fraction(int(i == 0))] for i in range(D)]
    for col in range(D):
        piv = next((r for r in range(col, D) if mat[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("element is not invertible")
        mat[col], mat[piv] = mat[piv], mat[col]
        pv = mat[col][col]
        mat[col] = [v / pv for v in mat[col]]
        for r in range(D):
            if r != col and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
    sol = [mat[i][D] for i in range(D)]
    terms = {(Exponent.const(Fraction(i, D), s), ZERO_EXP): v
             for i, v in enumerate(sol) if v}
    return UsNumber(terms, s)


def s_power(alpha, beta=0, s=None):
    """The monomial s^alpha (s^i)^beta."""
    alpha = Exponent.coerce(alpha, s)
    beta = Exponent.coerce(beta, s)
    s = s or alpha.s or beta.s
    if s is None and not (alpha.is_rational() and alpha.rational() == 0):
        raise ValueError("s is required")
    return UsNumber({(alpha, beta): 1}, s)


def chi(x, p=None, rank=0):
    """Standard additive character: exp(2 pi i frac_part(p^-rank x)) as a root of unity."""
    if isinstance(x, PAdicNumber):
        p = x.p
        t = frac_part(x * Fraction(1, p**rank) if rank else x)
    else:
        if p is None:
            raise ValueError("p is required for rational input")
        t = frac_rational(Fraction(x) / Fraction(p) ** rank, p)
    if t == 0:
        return UsNumber.const(Cyclotomic.rational(1, p))
    m = round(math.log(t.denominator, p))
    return UsNumber.const(Cyclotomic.root_of_unity(p, m, t.numerator))


class SSize:
    """A certified s-adic size s^(-exponent); exponent None means size 0."""

    __slots__ = ("exponent",)

    def __init__(self, exponent):
        self.exponent = None if exponent is None else Exponent.coerce(exponent)

    @classmethod
    def zero(cls):
        return cls(None)

    def is_zero(self):
        return self.exponent is None

    def value(self, s, dps=None):
        if self.exponent is None:
            return mpmath.mpf(0)
        with mpmath.workdps(dps or config.NUMERIC_DPS):
            return mpmath.power(s, -self.exponent.numeric(dps))

    def _cmp(self, other):
        if self.exponent is None or other.exponent is None:
            a = self.exponent is not None
            b = other.exponent is not None
            return (a > b) - (a < b)
        return -self.exponent.compare(other.exponent)

    def __eq__(self, other):
        if not isinstance(other, SSize):
            return NotImplemented
        return self.exponent == other.exponent

    def __hash__(self):
        return hash(self.exponent)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __str__(self):
        if self.exponent is None:
            return "0"
        if self.exponent.is_rational():
            return f"s^({-self.exponent.rational()})"
        return f"s^-({self.exponent})"

    def __repr__(self):
        return f"SSize({self})"

    def to_json(self):
        return None if self.exponent is None else {"neg_exponent": self.exponent.to_json()}


def term_size(alpha, coeff, s):
    """(exponent e, certified) with |term|_s = s^-e, or an upper bound when not certified."""
    mono = coeff.unit_monomial()
    if mono is not None:
        return alpha + ord_rational(mono[0], s), True
    return alpha + coeff.min_coeff_ord(s), False


def valuation(x, s=None):
    """Certified s-adic size |x|_s as an SSize."""
    x = UsNumber.coerce(x)
    if x.is_zero():
        return SSize.zero()
    s = x.s or s
    if s is None:
        raise ValueError("the base s is unknown; pass s explicitly")
    sizes = [term_size(alpha, c, s) for (alpha, _), c in x.terms.items()]
    try:
        best = None
        for i, (e, cert) in enumerate(sizes):
            if best is None or e.compare(sizes[best][0]) < 0:
                best = i
        e_best, cert_best = sizes[best]
        if not cert_best:
            raise IndeterminateValuation(f"leading coefficient of {x} is not a monomial")
        for i, (e, _) in enumerate(sizes):
            if i != best and e.compare(e_best) <= 0:
                raise IndeterminateValuation(f"no strictly dominant term in {x}")
    except IndeterminateOrder as exc:
        raise IndeterminateValuation(str(exc)) from exc
    return SSize(e_best)


def rational_valuation(x, s):
    """s-adic size of a rational, as an SSize."""
    x = Fraction(x)
    if x == 0:
        return SSize.zero()
    return SSize(Exponent.const(ord_rational(x, s)))


def us(x, s):
    """Coerce x into a UsNumber over base s."""
    if isinstance(x, UsNumber):
        if x.s is None:
            return UsNumber(x.terms, s)
        return x
    return UsNumber.const(x, s)
