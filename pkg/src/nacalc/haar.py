"""Haar integration, the truncated Fourier transform, convolution and Gamma."""

from fractions import Fraction
import math

import numpy as np

from .cyclotomic import Cyclotomic, safe_int_array
from .errors import DivergentSeries, GammaUnrepresentable, LevelMismatch
from .exponent import Exponent
from .grid import CycArray, GridFunction, dft_array
from .value import UsNumber, ZERO_EXP, s_power, us


def integrate(f):
    """sum_x f(x) p^(-nN) as a UsNumber."""
    level = f.level
    terms = {}
    for key, arr in f.parts.items():
        axes = tuple(range(level.n))
        num = arr.num.astype(object).sum(axis=axes) if arr.num.dtype == object else arr.num.sum(axis=axes)
        c = Cyclotomic(level.p, arr.L, [int(v) for v in num],
                       arr.den * level.p ** (level.n * level.N))
        if not c.is_zero():
            terms[key] = c
    return UsNumber(terms, f.s)


def fourier(f, direction="forward"):
    """Transform of f from level (M, N) to the dual level (N, M).

    forward: F(f)(y) = sum_x chi(x y) f(x) p^(-nN); inverse uses chi(-x y).
    """
    if direction not in ("forward", "inverse"):
        raise ValueError("direction must be forward or inverse")
    level = f.level
    sign = 1 if direction == "forward" else -1
    weight = level.p ** (level.n * level.N)
    parts = {}
    for key, arr in f.parts.items():
        out = dft_array(arr, level, sign)
        out.den *= weight
        parts[key] = out
    return GridFunction(level.dual(), parts, f.s)


def convolve(f, g):
    """(f*g)(x) = sum_y f(x - y) g(y) p^(-nN) with wraparound on the lattice."""
    if f.level != g.level:
        raise LevelMismatch(f"levels differ: {f.level} vs {g.level}")
    level = f.level
    s = f.s or g.s
    out = GridFunction(level, {}, s)
    axes = tuple(range(level.n))
    weight = Fraction(1, level.p ** (level.n * level.N))
    for (a1, b1), x in f.parts.items():
        for (a2, b2), y in g.parts.items():
            nz = np.nonzero(np.any(y.num != 0, axis=-1))
            acc = None
            for idx in zip(*nz):
                idx = tuple(int(i) for i in idx)
                c = y.value(idx)
                shifted = CycArray(x.p, x.L, np.roll(x.num, idx, axis=axes), x.den)
                term = shifted.mul_scalar(c)
                acc = term if acc is None else acc + term
            if acc is not None:
                out._accumulate((a1 + a2, b1 + b2), acc.scale(weight))
    out.parts = {k: v.normalized() for k, v in out.parts.items() if not v.is_zero()}
    return out


def _re(b):
    return b[0] if isinstance(b, tuple) else Exponent.coerce(b)


def complex_exponent(b, s=None):
    """Normalize b to a pair (alpha, beta) of Exponents."""
    if isinstance(b, tuple):
        return Exponent.coerce(b[0], s), Exponent.coerce(b[1], s)
    return Exponent.coerce(b, s), Exponent()


def gamma(b, p, s, mode="closed", trunc=30):
    """Gamma^{K,s}(b) = (1 - 1/p) sum_{k>=0} p^-k s^(-b k) - s^b."""
    alpha, beta = complex_exponent(b, s)
    if mode == "series":
        sign = alpha.sign()
        if sign >= 0:
            raise DivergentSeries(f"series for Gamma({alpha}) needs Re(b) < 0; use closed mode")
        # term k has size s^(Re(b) k); stop once it is below s^-trunc
        if alpha.is_rational():
            K = math.floor(Fraction(trunc) / -alpha.rational()) + 1
        else:
            K = int(math.floor(trunc / -float(alpha.numeric(30)))) + 1
        total = UsNumber.const(0, s)
        c = Fraction(p - 1, p)
        for k in range(K):
            total = total + s_power(-alpha * k, -beta * k, s) * (c / p**k)
        return total - s_power(alpha, beta, s)
    if mode != "closed":
        raise ValueError("mode must be series or closed")
    if not beta.is_zero() or not alpha.is_rational():
        raise GammaUnrepresentable(f"no closed form for Gamma at b = ({alpha}, {beta})")
    r = -alpha.rational()
    j, d = r.numerator, r.denominator
    # a = s^r / p; 1/(1 - a) = (sum_{i<d} a^i) / (1 - a^d) with a^d rational
    a_d = Fraction(s) ** j / Fraction(p) ** d
    if a_d == 1:
        raise GammaUnrepresentable("geometric ratio equals 1")
    num = UsNumber.const(0, s)
    for i in range(d):
        num = num + s_power(r * i, 0, s) * Fraction(1, p**i)
    geo = num * (1 / (1 - a_d))
    return geo * Fraction(p - 1, p) - s_power(alpha, 0, s)


def size_of(x, s):
    return us(x, s).valuation(s)
