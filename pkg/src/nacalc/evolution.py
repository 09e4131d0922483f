"""Heat-type evolution driven by real symbols and q-Wiener transitions."""

from dataclasses import dataclass
from fractions import Fraction
import itertools
import math
import warnings

import sympy

from .errors import EllipticityWarning, InvalidSpec, InvalidSymbol, ParameterMismatch
from .exponent import Exponent
from .grid import GridFunction
from .haar import convolve, fourier
from .padic import frac_rational, parse_rational
from .qgauss import QGaussianSpec, convolve_specs, trace_expectation, vq, vq_from_ords
from .value import s_power


@dataclass(frozen=True)
class SymbolForm:
    """Coefficients b^k_{j1..jk} of A; indices are 0-based coordinates."""

    n: int
    coeffs: tuple  # ((k, idx), b) pairs

    def __post_init__(self):
        merged = {}
        for (k, idx), b in self.coeffs:
            idx = tuple(int(j) for j in idx)
            if len(idx) != k or any(j < 0 or j >= self.n for j in idx):
                raise InvalidSymbol(f"bad multi-index {idx} for k = {k}")
            merged[(k, idx)] = merged.get((k, idx), Fraction(0)) + Fraction(b)
        clean = tuple(sorted((key, b) for key, b in merged.items() if b != 0))
        object.__setattr__(self, "coeffs", clean)
        # odd-order terms carry a factor +-i; they must cancel for a real symbol
        sym = {}
        for (k, idx), b in clean:
            if k % 2:
                key = (k, tuple(sorted(idx)))
                sym[key] = sym.get(key, Fraction(0)) + b
        if any(v != 0 for v in sym.values()):
            raise InvalidSymbol("odd-order coefficients do not cancel; the symbol is not real")

    @classmethod
    def quadratic(cls, g):
        n = len(g)
        return cls(n, tuple(((2, (i, j)), Fraction(g[i][j]))
                            for i in range(n) for j in range(n) if g[i][j]))

    @property
    def order(self):
        return max((k for (k, _), _ in self.coeffs), default=0)

    def polynomial(self, y):
        """ln s * A(y) evaluated on any ring supporting + and *."""
        total = None
        for (k, idx), b in self.coeffs:
            if k % 2:
                continue
            term = -b * (-1) ** (k // 2)
            prod = None
            for j in idx:
                prod = y[j] if prod is None else prod * y[j]
            val = term if prod is None else prod * term
            total = val if total is None else total + val
        return total

    def quadratic_matrix(self):
        g = [[Fraction(0)] * self.n for _ in range(self.n)]
        for (k, idx), b in self.coeffs:
            if k == 2:
                i, j = idx
                g[i][j] += b / 2
                g[j][i] += b / 2
        return g

    def to_json(self):
        return {"n": self.n, "coeffs": [{"k": k, "idx": [j + 1 for j in idx], "b": f"{b.numerator}/{b.denominator}"}
                                        for (k, idx), b in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        n = int(data["n"])
        coeffs = tuple(((int(c["k"]), tuple(int(j) - 1 for j in c.get("idx", []))),
                        parse_rational(c["b"])) for c in data.get("coeffs", []))
        return cls(n, coeffs)


def symbol_eval(A, y, s):
    """A(y) = -sum (-i)^k b^k y_{j1}..y_{jk} / ln s as an Exponent."""
    if len(y) != A.n:
        raise ValueError("y has the wrong dimension")
    y = [Exponent.coerce(v, s) for v in y]
    poly = A.polynomial(y)
    if poly is None:
        return Exponent()
    return Exponent.coerce(poly, s) * Exponent.inv_log(s)


def ellipticity(A, mesh=4):
    """(elliptic, certified): exact for quadratic symbols, sampled otherwise."""
    orders = {k for (k, _), _ in A.coeffs}
    if orders <= {2} and orders:
        g = A.quadratic_matrix()
        mat = sympy.Matrix(A.n, A.n, lambda i, j: sympy.Rational(g[i][j].numerator, g[i][j].denominator))
        ok = all(mat[:k, :k].det() > 0 for k in range(1, A.n + 1))
        return ok, True
    if not orders or A.order % 2:
        return False, True
    pts = [Fraction(j, mesh) for j in range(-mesh, mesh + 1)]
    for y in itertools.product(pts, repeat=A.n):
        if all(v == 0 for v in y):
            continue
        if A.polynomial(list(y)) <= 0:
            return False, True
    return True, False


def _warn_if_uncertified(A):
    ok, certified = ellipticity(A)
    if not certified:
        warnings.warn("strict ellipticity checked by sampling only", EllipticityWarning)
    return ok


def transition_functional(A, t, z, s, p):
    """mu_hat_{tA}(z) = s^(t A(v_2(z)))."""
    t = Fraction(t)
    if t < 0:
        raise ValueError("t must be nonnegative")
    _warn_if_uncertified(A)
    return s_power(symbol_eval(A, vq(z, 2, s, p), s) * t, 0, s)


def multiplier_grid(A, t, dual_level, s):
    t = Fraction(t)
    return GridFunction.from_ord_function(
        dual_level, lambda pat: s_power(symbol_eval(A, vq_from_ords(pat, 2, s), s) * t, 0, s), s)


def evolve(A, u0, t, s):
    """u(t) = F^-1(F(u0)(z) s^(t A(v_2(z))))."""
    if A.n != u0.level.n:
        raise ParameterMismatch("symbol and grid dimensions differ")
    if Fraction(t) < 0:
        raise ValueError("t must be nonnegative")
    _warn_if_uncertified(A)
    return fourier(fourier(u0) * multiplier_grid(A, t, u0.level.dual(), s), "inverse")


def heat_density(A, t, level, s):
    """Grid density of mu_{tA}."""
    return fourier(multiplier_grid(A, t, level.dual(), s), "inverse")


def evolve_by_convolution(A, u0, t, s):
    """u(t) = u0 * density(mu_{tA}) computed by direct grid convolution."""
    return convolve(u0, heat_density(A, t, u0.level, s))


@dataclass(frozen=True)
class TimeGrid:
    times: tuple
    kind: str = "real"
    prime: int = None

    def __post_init__(self):
        times = tuple(parse_rational(t) for t in self.times)
        object.__setattr__(self, "times", times)
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("times must be strictly increasing")
        if self.kind not in ("real", "local-field"):
            raise ValueError("kind must be real or local-field")
        if self.kind == "local-field" and self.prime is None:
            raise ValueError("local-field time grids need the prime of the time field")

    def intervals(self):
        return list(zip(self.times, self.times[1:]))


def log_chi(tau, prime):
    """ln chi_F(tau) / i as the Exponent 2 pi frac_part(tau)."""
    f = frac_rational(tau, prime)
    return Exponent.tau(f) if f else Exponent()


def wiener_transition(spec, t, u, kind="real", prime=None):
    """Transition spec from time u to time t."""
    t, u = parse_rational(t), parse_rational(u)
    if t == u:
        raise ValueError("t and u must differ")
    if kind == "real":
        if t < u:
            raise InvalidSpec("real-time transitions need t > u")
        return spec.scaled(t - u)
    if kind == "local-field":
        if prime is None:
            raise ValueError("the prime of the time field is required")
        return spec.with_(zeta=(Exponent(), log_chi(t - u, prime)))
    raise ValueError("kind must be real or local-field")


def compose_transitions(a, b):
    """Law of the sum of independent increments: B-scales add (real) or zeta-scales add (local)."""
    if a.zeta == b.zeta:
        return convolve_specs(a, b)
    if a.B != b.B or (a.p, a.s, a.q) != (b.p, b.s, b.q):
        raise ParameterMismatch("transitions share neither zeta nor B")
    zeta = (a.zeta[0] + b.zeta[0], a.zeta[1] + b.zeta[1])
    gamma = tuple(x + y for x, y in zip(a.gamma, b.gamma))
    return a.with_(zeta=zeta, gamma=gamma)


def path_expectation(spec, grid, phi, level):
    """sum_j phi_j E[v_{2q}(increment_j)] for a step function phi on a real time grid."""
    if grid.kind != "real":
        raise ValueError("path expectations need a real time grid")
    if spec.n != 1 or spec.B[0][0] != 1 or any(g != 0 for g in spec.gamma):
        raise InvalidSpec("path expectations need n = 1, B = [1], gamma = 0")
    if len(phi) != len(grid.intervals()):
        raise ValueError("phi needs one value per interval")
    total = None
    for (a, b), ph in zip(grid.intervals(), phi):
        ph = parse_rational(ph)
        if ph == 0:
            continue
        term = trace_expectation(spec, b - a, level).value * ph
        total = term if total is None else total + term
    from .value import UsNumber

    return total if total is not None else UsNumber.const(0, spec.s)
