"""PD(b, f), the operator _P d^u and the kernel family f_u."""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cyclotomic import Cyclotomic
from .errors import DivergentSeries, GammaUnrepresentable, NotInvertible, TailNotClosedForm
from .exponent import Exponent
from .grid import GridFunction
from .haar import complex_exponent, fourier, gamma
from .padic import GridLevel, ord_int
from .value import UsNumber, s_power, us


def _shift(b, k, s):
    """(alpha + k, beta) for a complex exponent."""
    alpha, beta = complex_exponent(b, s)
    return alpha + k, beta


@dataclass(frozen=True)
class PDKernelSpec:
    """Order u and the normalization Gamma(1 + u) of the kernel f_u."""

    u: tuple
    p: int
    s: int
    normalization: UsNumber

    @classmethod
    def build(cls, u, p, s):
        alpha, beta = complex_exponent(u, s)
        if not beta.is_zero() or not alpha.is_rational():
            raise GammaUnrepresentable(f"Gamma(1 + {alpha}) has no closed form here")
        g = gamma((alpha + 1, beta), p, s, "closed")
        if g.is_zero():
            raise GammaUnrepresentable("Gamma(1 + u) vanishes")
        return cls((alpha, beta), p, s, g)


def kernel(u, level, s):
    """f_u(x) = s^(-(1+u) ord x) / Gamma(1+u), with f_u(0) = 0."""
    spec = PDKernelSpec.build(u, level.p, s)
    try:
        inv = spec.normalization.inverse()
    except NotInvertible as exc:
        raise GammaUnrepresentable(str(exc)) from exc
    alpha, beta = spec.u

    def value(pattern):
        if any(o is None for o in pattern):
            return None
        o = sum(pattern)
        return s_power(-(alpha + 1) * o, -beta * o, s) * inv

    if level.n != 1:
        raise ValueError("kernels are one-dimensional")
    return GridFunction.from_ord_function(level, value, s)


def abs_p(level):
    """|y|_p on the lattice (0 at the zero cell)."""
    p = level.p

    def value(pattern):
        (o,) = pattern
        return None if o is None else Fraction(p) ** (-o)

    return GridFunction.from_ord_function(level, value)


def psi(b, level, s):
    """psi(y) = s^((1+b) ord y) |y|_p^-1 (0 at the zero cell)."""
    alpha, beta = complex_exponent(b, s)
    p = level.p

    def value(pattern):
        (o,) = pattern
        if o is None:
            return None
        return s_power((alpha + 1) * o, beta * o, s) * (Fraction(p) ** o)

    return GridFunction.from_ord_function(level, value, s)


def p_deriv(u, f, s):
    """_P d^u f = F^-1( F(f_{u-1}) F(f) |y|_p )."""
    if f.level.n != 1:
        raise ValueError("p_deriv acts on one-dimensional grids")
    alpha, beta = complex_exponent(u, s)
    k = kernel((alpha - 1, beta), f.level, s)
    prod = fourier(k) * fourier(f) * abs_p(f.level.dual())
    return fourier(prod, "inverse")


def pd_multiplier(b, f, s):
    """PD(b, f) through the Fourier multiplier -Gamma(1+b) psi(v)."""
    if f.level.n != 1:
        raise ValueError("pd acts on one-dimensional grids")
    alpha, beta = complex_exponent(b, s)
    g = gamma((alpha + 1, beta), f.level.p, s, "closed")
    m = psi((alpha, beta), f.level.dual(), s).scale(-g)
    return fourier(fourier(f) * m, "inverse")


def _masked_sum(f, mask):
    """Unweighted sum of f over the cells in mask, as a UsNumber."""
    terms = {}
    for key, arr in f.parts.items():
        sel = arr.num[mask]
        if sel.size == 0:
            continue
        vec = sel.astype(object).sum(axis=0) if sel.dtype == object else sel.sum(axis=0)
        c = Cyclotomic(f.level.p, arr.L, [int(v) for v in np.atleast_1d(vec)], arr.den)
        if not c.is_zero():
            terms[key] = c
    return UsNumber(terms, f.s)


def pd(b, f, x, s, scope="full", exterior=0):
    """PD(b, f)(x) = sum over cells y != cell(x) of (f(x) - f(y)) s^((-1-b) ord(x-y)) w(y).

    scope "full" adds the exact tail from |y| > p^M, where f must equal the
    constant ``exterior``; scope "unit_ball" restricts y to Z_p.
    """
    level = f.level
    if level.n != 1:
        raise ValueError("pd acts on one-dimensional grids")
    if scope not in ("full", "unit_ball"):
        raise ValueError("scope must be full or unit_ball")
    alpha, beta = complex_exponent(b, s)
    p, M, P = level.p, level.M, level.side
    (X,) = level.index(x if isinstance(x, tuple) else (x,))
    fx = f.value_at_index((X,))
    Y = np.arange(P)
    diff = (X - Y) % P
    ords = np.array([level.coord_ord(int(d)) if d else level.N for d in diff])
    allowed = diff != 0
    if scope == "unit_ball":
        allowed &= (Y % p**M) == 0
    total = UsNumber.const(0, s)
    for k in sorted(set(ords[allowed].tolist())):
        mask = allowed & (ords == k)
        count = int(mask.sum())
        inner = fx * count - _masked_sum(f, mask)
        total = total + inner * s_power((-alpha - 1) * k, -beta * k, s)
    total = total * level.weight
    if scope == "full":
        total = total + _tail(alpha, beta, fx, exterior, level, s)
    return total


def _tail(alpha, beta, fx, exterior, level, s):
    """sum_{j > M} (f(x) - ext) (1 - 1/p) p^j s^((1+b) j)."""
    if exterior is None:
        raise TailNotClosedForm("f is not constant outside the grid; enlarge M")
    diff = fx - us(exterior, s)
    if diff.is_zero():
        return UsNumber.const(0, s)
    if (alpha + 1).sign() <= 0:
        raise DivergentSeries("the exterior tail needs Re(b) > -1")
    p, M = level.p, level.M
    r = s_power(alpha + 1, beta, s) * p
    try:
        geo = (r ** (M + 1)) * (1 - r).inverse()
    except NotInvertible as exc:
        raise TailNotClosedForm(str(exc)) from exc
    return diff * geo * Fraction(p - 1, p)


def interior_mask(level, width=1):
    """Cells whose shell lies strictly inside the lattice, dropping ``width`` shells per side."""
    lo = -level.M + width
    hi = level.N - 1 - width
    mask = np.zeros(level.shape, dtype=bool)
    for X in range(level.side):
        o = level.coord_ord(X)
        if o is not None and lo <= o <= hi:
            mask[X] = True
    return mask


def max_size(f, mask, s):
    """Largest certified s-adic size of f over the cells in mask."""
    from .value import SSize

    best = SSize.zero()
    for idx in zip(*np.nonzero(mask)):
        v = f.value_at_index(tuple(int(i) for i in idx))
        size = v.valuation(s)
        if size > best:
            best = size
    return best
