"""Finite-dimensional q-Gaussian measures and their calculus.

mu_hat(z) = s^(zeta B(v, v)) chi(z . gamma) with v_k = s^(-q ord z_k / 2).
Densities are inverse transforms of mu_hat sampled on the dual lattice.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import math

import numpy as np
import sympy

from .cyclotomic import Cyclotomic
from .errors import (IndeterminateOrder, InvalidSpec, NonDiagonalB, ParameterMismatch)
from .exponent import Exponent
from .grid import CycArray, GridFunction, root_array
from .haar import fourier, integrate
from .padic import (GridLevel, PAdicNumber, fmt_rational, ord_int, ord_rational,
                    parse_rational)
from .value import SSize, UsNumber, chi, s_power, us


def _rat(x):
    if isinstance(x, PAdicNumber):
        return x.to_rational()
    return parse_rational(x)


def _exp_matrix(B, s):
    return tuple(tuple(v if isinstance(v, Exponent) else Exponent.coerce(_rat(v), s)
                       for v in row) for row in B)


def principal_minors_nonnegative(B):
    """Exact PSD test for a rational symmetric matrix: every principal minor >= 0."""
    n = len(B)
    mat = sympy.Matrix(n, n, lambda i, j: sympy.Rational(B[i][j].numerator, B[i][j].denominator))
    for k in range(1, n + 1):
        for rows in itertools.combinations(range(n), k):
            if mat.extract(list(rows), list(rows)).det() < 0:
                return False
    return True


@dataclass(frozen=True)
class QGaussianSpec:
    """Parameters (p, s, q, B, gamma, zeta) of a q-Gaussian measure on Q_p^n."""

    p: int
    s: int
    q: Fraction
    B: tuple
    gamma: tuple
    zeta: tuple = (Exponent.const(1), Exponent())

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        object.__setattr__(self, "B", _exp_matrix(self.B, self.s))
        object.__setattr__(self, "gamma", tuple(_rat(g) for g in self.gamma))
        zr, zi = self.zeta
        object.__setattr__(self, "zeta", (Exponent.coerce(zr, self.s), Exponent.coerce(zi, self.s)))
        self.validate()

    @classmethod
    def make(cls, p, s, q, B, gamma=None, zeta=(1, 0)):
        n = len(B)
        return cls(p, s, Fraction(q), B, tuple(gamma or (0,) * n), zeta)

    @property
    def n(self):
        return len(self.B)

    def validate(self):
        if not sympy.isprime(self.p) or not sympy.isprime(self.s):
            raise InvalidSpec("p and s must be primes")
        if self.p == self.s:
            raise InvalidSpec("p and s must differ")
        if self.q <= 0:
            raise InvalidSpec("q must be positive")
        n = len(self.B)
        if n < 1 or any(len(row) != n for row in self.B):
            raise InvalidSpec("B must be a square matrix")
        if len(self.gamma) != n:
            raise InvalidSpec("gamma has the wrong length")
        for i in range(n):
            for j in range(i):
                if self.B[i][j] != self.B[j][i]:
                    raise InvalidSpec("B must be symmetric")
        try:
            if self.is_rational():
                if not principal_minors_nonnegative(self.B_rational()):
                    raise InvalidSpec("B must be positive semidefinite")
            else:
                for i in range(n):
                    if self.B[i][i].sign() < 0:
                        raise InvalidSpec("B must be positive semidefinite")
                if n > 1 and not self.is_diagonal():
                    raise InvalidSpec("symbolic B is only supported when diagonal")
            if self.zeta[0].sign() < 0:
                raise InvalidSpec("Re(zeta) must be nonnegative")
        except IndeterminateOrder as exc:
            raise InvalidSpec(str(exc)) from exc

    def is_rational(self):
        return all(v.is_rational() for row in self.B for v in row)

    def B_rational(self):
        return [[v.rational() for v in row] for row in self.B]

    def is_diagonal(self):
        return all(self.B[i][j].is_zero() for i in range(self.n) for j in range(self.n) if i != j)

    def trace(self):
        return sum((self.B[i][i] for i in range(self.n)), Exponent())

    def with_(self, **changes):
        data = dict(p=self.p, s=self.s, q=self.q, B=self.B, gamma=self.gamma, zeta=self.zeta)
        data.update(changes)
        return QGaussianSpec(**data)

    def scaled(self, t):
        """The spec with B replaced by t B."""
        t = Fraction(t)
        return self.with_(B=tuple(tuple(v * t for v in row) for row in self.B))

    def to_json(self):
        def enc(e):
            return fmt_rational(e.rational()) if e.is_rational() else e.to_json()

        return {"p": self.p, "s": self.s, "q": fmt_rational(self.q),
                "B": [[enc(v) for v in row] for row in self.B],
                "gamma": [fmt_rational(g) for g in self.gamma],
                "zeta": {"re": enc(self.zeta[0]), "im": enc(self.zeta[1])}}

    @classmethod
    def from_json(cls, data):
        s = int(data["s"])
        B = [[Exponent.from_json(v, s) for v in row] for row in data["B"]]
        n = len(B)
        gamma = [parse_rational(g) for g in data.get("gamma", ["0"] * n)]
        z = data.get("zeta", {"re": "1", "im": "0"})
        zeta = (Exponent.from_json(z.get("re", "1"), s), Exponent.from_json(z.get("im", "0"), s))
        return cls(int(data["p"]), s, parse_rational(data["q"]), B, gamma, zeta)


@dataclass(frozen=True)
class VqVector:
    """v_k = s^(-q ord z_k / 2), and 0 for z_k = 0."""

    entries: tuple

    @classmethod
    def of(cls, z, q, s, p):
        out = []
        for zk in z:
            o = zk.ord if isinstance(zk, PAdicNumber) else ord_rational(_rat(zk), p)
            out.append(Exponent() if o == math.inf else Exponent.s_pow(s, -Fraction(q) * o / 2))
        return cls(tuple(out))


def vq(z, q, s, p):
    return VqVector.of(z, q, s, p).entries


def vq_from_ords(ords, q, s):
    return tuple(Exponent() if o is None else Exponent.s_pow(s, -Fraction(q) * o / 2)
                 for o in ords)


def bilinear(B, v, w=None):
    w = v if w is None else w
    total = Exponent()
    for i, vi in enumerate(v):
        if vi.is_zero():
            continue
        for j, wj in enumerate(w):
            if not wj.is_zero() and not B[i][j].is_zero():
                total = total + B[i][j] * vi * wj
    return total


def _dot(z, gamma):
    return sum((_rat(a) * g for a, g in zip(z, gamma)), Fraction(0))


def char_functional(spec, z):
    """mu_hat(z) = s^(zeta B(v, v)) chi(z . gamma)."""
    if len(z) != spec.n:
        raise ValueError("z has the wrong dimension")
    X = bilinear(spec.B, vq(z, spec.q, spec.s, spec.p))
    zr, zi = spec.zeta
    return s_power(zr * X, zi * X, spec.s) * chi(_dot(z, spec.gamma), spec.p)


def chi_grid(level, vector, s=None):
    """x -> chi(x . vector) on the lattice, as a GridFunction of roots of unity."""
    p = level.p
    exps = np.zeros(level.shape, dtype=np.int64)
    e_max = 0
    coeffs = []
    for k, g in enumerate(vector):
        c = Fraction(_rat(g)) / p**level.M
        e = ord_int(c.denominator, p) if c != 0 else 0
        if c == 0 or e == 0:
            coeffs.append(None)
            continue
        pe = p**e
        u = c.denominator // pe
        coeffs.append((c.numerator * pow(u, -1, pe) % pe, e))
        e_max = max(e_max, e)
    if e_max == 0:
        return GridFunction.from_rational_array(level, np.ones(level.shape, dtype=object), s)
    pE = p**e_max
    X = np.arange(level.side, dtype=object)
    for k, cf in enumerate(coeffs):
        if cf is None:
            continue
        a, e = cf
        term = np.array([(int(x) * a) % p**e * p ** (e_max - e) for x in X], dtype=np.int64)
        shape = [1] * level.n
        shape[k] = level.side
        exps = (exps + term.reshape(shape)) % pE
    arr = root_array(p, e_max, exps)
    return GridFunction(level, {(Exponent(), Exponent()): arr}, s)


def exponent_grid(spec, level, power=None):
    """y -> s^(zeta B(v_q(y), v_q(y))), or (zeta X)^k / k! when power = k."""
    zr, zi = spec.zeta
    s = spec.s

    def value(pattern):
        X = bilinear(spec.B, vq_from_ords(pattern, spec.q, s))
        if power is None:
            return s_power(zr * X, zi * X, s)
        if not zi.is_zero():
            raise ValueError("graded moments need a real zeta")
        return UsNumber.from_exponent((zr * X) ** power, s) * Fraction(1, math.factorial(power))

    return GridFunction.from_ord_function(level, value, s)


def char_grid(spec, dual_level):
    """mu_hat sampled at the points of a (dual) lattice."""
    base = exponent_grid(spec, dual_level)
    if all(g == 0 for g in spec.gamma):
        return base
    return base * chi_grid(dual_level, spec.gamma, spec.s)


def _check_level(spec, level):
    if level.n != spec.n or level.p != spec.p:
        raise ParameterMismatch("level does not match the spec dimension or prime")


def density(spec, level):
    """Grid density F^-1(mu_hat restricted to the dual lattice)."""
    _check_level(spec, level)
    level.check_cap()
    return fourier(char_grid(spec, level.dual()), "inverse")


def project(spec, g):
    """One-dimensional spec of the pushforward along x -> sum_j g_j x_j (B diagonal)."""
    if len(g) != spec.n:
        raise ValueError("g has the wrong dimension")
    if not spec.is_diagonal():
        raise NonDiagonalB("projection formula needs a diagonal B")
    beta = Exponent()
    for j, gj in enumerate(g):
        gj = _rat(gj)
        if gj != 0:
            beta = beta + spec.B[j][j] * Exponent.s_pow(spec.s, -spec.q * ord_rational(gj, spec.p))
    shift = sum((_rat(gj) * gm for gj, gm in zip(g, spec.gamma)), Fraction(0))
    return QGaussianSpec(spec.p, spec.s, spec.q, ((beta,),), (shift,), spec.zeta)


def pushforward_level(level, g):
    ords = [ord_rational(_rat(gj), level.p) for gj in g if _rat(gj) != 0]
    o = min(ords) if ords else 0
    if level.M - o < 0 or level.N + o < 0:
        raise ValueError("projection leaves the representable range; adjust the level")
    return GridLevel(level.p, level.M - o, level.N + o, 1), o


def pushforward(f, g):
    """Density of the pushforward of f(x) dx along x -> sum_j g_j x_j."""
    level = f.level
    out_level, o = pushforward_level(level, g)
    p, P = level.p, level.side
    target = np.zeros(level.shape, dtype=np.int64)
    for k, gj in enumerate(g):
        c = _rat(gj) / Fraction(p) ** o
        if c == 0:
            continue
        ck = c.numerator * pow(c.denominator, -1, P) % P
        shape = [1] * level.n
        shape[k] = P
        target = (target + (np.arange(P, dtype=np.int64) * ck % P).reshape(shape)) % P
    factor = Fraction(p ** (level.n * level.N), p ** out_level.N)
    parts = {}
    flat_t = target.ravel()
    for key, arr in f.parts.items():
        src = arr.num.reshape(-1, arr.num.shape[-1])
        out = np.zeros((P, src.shape[-1]), dtype=src.dtype)
        np.add.at(out, flat_t, src)
        parts[key] = CycArray(p, arr.L, out, arr.den).scale(Fraction(1) / factor)
    return GridFunction(out_level, parts, f.s)


def convolve_specs(a, b):
    if (a.p, a.s, a.q, a.n) != (b.p, b.s, b.q, b.n) or a.zeta != b.zeta:
        raise ParameterMismatch("specs differ in p, s, q, n or zeta")
    B = tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a.B, b.B))
    gamma = tuple(x + y for x, y in zip(a.gamma, b.gamma))
    return a.with_(B=B, gamma=gamma)


def observable(level, indices, w, s):
    """x -> prod_i s^(-w ord x_{j_i}) (0 when any used coordinate is the zero cell)."""
    w = Fraction(w)

    def value(pattern):
        total = 0
        for j in indices:
            if pattern[j] is None:
                return None
            total += pattern[j]
        return s_power(-w * total, 0, s)

    return GridFunction.from_ord_function(level, value, s)


def moment(spec, indices, w, level, degree=None):
    """Grid moment sum_x prod_i v_{2w}(x_{j_i}) rho(x) p^(-nN).

    indices are 0-based coordinates.  degree=k replaces mu_hat by its k-th
    component (zeta X)^k / k!, the coefficient of (ln s)^k in s^(zeta X).
    """
    _check_level(spec, level)
    if degree is None:
        rho = density(spec, level)
    else:
        g = exponent_grid(spec, level.dual(), power=degree)
        if any(x != 0 for x in spec.gamma):
            g = g * chi_grid(level.dual(), spec.gamma, spec.s)
        rho = fourier(g, "inverse")
    return integrate(rho * observable(level, indices, w, spec.s))


@dataclass(frozen=True)
class TraceResult:
    value: UsNumber
    ratio: object  # UsNumber, or None when t Tr(B) is 0 or symbolic


def trace_expectation(spec, t, level):
    """sum_j M[v_q(x_j)^2] under mu_{q, tB, 0}, first order in the scale (degree-1 moments)."""
    if any(g != 0 for g in spec.gamma):
        raise ValueError("trace_expectation needs gamma = 0")
    t = Fraction(t)
    scaled = spec.scaled(t)
    value = UsNumber.const(0, spec.s)
    for j in range(spec.n):
        value = value + moment(scaled, (j, j), spec.q / 2, level, degree=1)
    tr = spec.trace()
    ratio = None
    if tr.is_rational() and tr.rational() * t != 0:
        ratio = value * (1 / (tr.rational() * t))
    return TraceResult(value, ratio)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite list of (point, weight) atoms."""

    atoms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pts = [tuple(_rat(c) for c in pt) for pt, _ in self.atoms]
        if len(set(pts)) != len(pts):
            raise ValueError("atoms must be distinct")
        clean = tuple((pt, w) for pt, (_, w) in zip(pts, self.atoms) if not us(w, None).is_zero())
        object.__setattr__(self, "atoms", clean)


def feynman_integral(nu, spec):
    """sum over atoms z of mu_hat(z) w(z) (right side of the reduction formula)."""
    total = UsNumber.const(0, spec.s)
    for pt, w in nu.atoms:
        total = total + char_functional(spec, pt) * us(w, spec.s)
    return total


def feynman_grid_side(nu, spec, level):
    """sum_x f(x) rho(x) p^(-nN) with f(x) = sum_a w_a chi(x . a), atoms on the dual lattice."""
    _check_level(spec, level)
    dual = level.dual()
    f = GridFunction.zeros(level, spec.s)
    for pt, w in nu.atoms:
        idx = dual.index(pt)
        if dual.point(idx) != tuple(pt):
            raise ValueError(f"atom {pt} is not a canonical point of the dual lattice")
        f = f + chi_grid(level, pt, spec.s).scale(us(w, spec.s))
    return integrate(f * density(spec, level))


def feynman_limit(nu, spec, ks=(1, 2, 4, 8, 16)):
    """Values along zeta_k = 1/k + i (scaled by the spec's B) and the limit at zeta = i."""
    seq = []
    for k in ks:
        sp = spec.with_(zeta=(Exponent.const(Fraction(1, k)), Exponent.const(1)))
        seq.append((k, feynman_integral(nu, sp)))
    limit = feynman_integral(nu, spec.with_(zeta=(Exponent(), Exponent.const(1))))
    return seq, limit


def _nullspace(B):
    mat = sympy.Matrix(len(B), len(B), lambda i, j: sympy.Rational(
        B[i][j].numerator, B[i][j].denominator))
    return mat, mat.nullspace()


def equivalence_test(a, b):
    """'equivalent', 'orthogonal' or 'undecided' for two finite-dimensional specs."""
    if (a.p, a.s, a.n) != (b.p, b.s, b.n):
        raise ParameterMismatch("specs differ in p, s or n")
    if a.q != b.q:
        return "orthogonal"
    if not (a.is_rational() and b.is_rational()):
        return "undecided"
    A, nullA = _nullspace(a.B_rational())
    Bm, nullB = _nullspace(b.B_rational())
    if a.B != b.B:
        # A = B^(1/2) T B^(1/2) with T positive definite exists iff ker A = ker B
        if A.rank() != Bm.rank() or A.row_join(Bm).rank() != A.rank():
            return "orthogonal"
    diff = [x - y for x, y in zip(a.gamma, b.gamma)]
    v = vq(diff, a.q, a.s, a.p)
    # v in range(B) = ker(B)^perp
    for vec in nullB:
        total = Exponent()
        for coef, vk in zip(vec, v):
            c = Fraction(int(sympy.fraction(coef)[0]), int(sympy.fraction(coef)[1]))
            total = total + vk * c
        if not total.is_zero():
            return "orthogonal"
    return "equivalent"


def orthogonality_probe(q, g, beta, p, s, n_max):
    """sup over the shell complement |y| > p^(n-1) of |mu_hat_q(y) / mu_hat_g(y)|_s, n = 1..n_max."""
    beta = Exponent.coerce(beta, s)
    a = QGaussianSpec(p, s, Fraction(q), ((beta,),), (0,))
    b = QGaussianSpec(p, s, Fraction(g), ((beta,),), (0,))
    sizes = []
    for n in range(1, n_max + 1):
        dual = GridLevel(p, 1, n).dual()
        best = SSize.zero()
        for Y in range(dual.side):
            o = dual.coord_ord(Y)
            if o is None or o > -n:
                continue
            y = (dual.coord(Y),)
            ratio = char_functional(a, y) / char_functional(b, y)
            size = ratio.valuation(s)
            if size > best:
                best = size
        sizes.append(best)
    return sizes
