"""Verification suites: the engine's identities run as named checks."""

from dataclasses import dataclass, field
from fractions import Fraction
import json
import random
import time

import numpy as np

from .errors import DivergentSeries, NacalcError
from .evolution import (SymbolForm, TimeGrid, compose_transitions, evolve,
                        evolve_by_convolution, path_expectation, wiener_transition)
from .grid import GridFunction
from .haar import convolve, fourier, gamma, integrate
from .padic import GridLevel, PAdicNumber, frac_part, lattice, ord as p_ord
from .pseudodiff import (interior_mask, kernel, max_size, p_deriv, pd, psi)
from .qgauss import (DiscreteMeasure, QGaussianSpec, char_functional, convolve_specs,
                     density, equivalence_test, feynman_grid_side, feynman_integral,
                     orthogonality_probe, project, pushforward, trace_expectation)
from .value import UsNumber, chi, s_power, valuation

SUITES = ("fourier", "gamma", "pd", "qgauss", "evolution")


@dataclass
class CheckResult:
    id: str
    status: str
    residual: str
    runtime_ms: float = 0.0


@dataclass
class VerificationReport:
    suite: str
    seed: int
    checks: list = field(default_factory=list)

    @property
    def overall(self):
        return "pass" if all(c.status == "pass" for c in self.checks) else "fail"

    def to_json(self, timings=False):
        checks = []
        for c in sorted(self.checks, key=lambda c: c.id):
            entry = {"id": c.id, "status": c.status, "residual": c.residual}
            if timings:
                entry["runtime_ms"] = round(c.runtime_ms, 3)
            checks.append(entry)
        return {"suite": self.suite, "seed": self.seed, "overall": self.overall, "checks": checks}

    def dumps(self, timings=False):
        return json.dumps(self.to_json(timings), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, data):
        checks = [CheckResult(c["id"], c["status"], c["residual"], c.get("runtime_ms", 0.0))
                  for c in data["checks"]]
        return cls(data["suite"], data["seed"], checks)


def _random_grid(rng, level):
    vals = np.array([Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(level.size)],
                    dtype=object)
    return GridFunction.from_rational_array(level, vals)


def _zero(x):
    return "0" if x else "nonzero"


# fourier suite (with the domain and value-field identities it rests on)

def _check_padic(rng):
    for _ in range(50):
        p = rng.choice([2, 3, 5])
        a = Fraction(rng.randint(1, 200), rng.randint(1, 50)) * rng.choice([1, -1])
        b = Fraction(rng.randint(1, 200), rng.randint(1, 50))
        x, y = PAdicNumber.from_rational(a, p), PAdicNumber.from_rational(b, p)
        if p_ord(x * y) != p_ord(x) + p_ord(y):
            return False
        s = x + y
        if not s.is_zero() and p_ord(s) < min(p_ord(x), p_ord(y)):
            return False
        if p_ord(x) != p_ord(y) and p_ord(s) != min(p_ord(x), p_ord(y)):
            return False
        if (frac_part(s) - frac_part(x) - frac_part(y)).denominator != 1:
            return False
    return True


def _check_lattice_weights():
    level = GridLevel(2, 2, 2)
    pts = lattice(level)
    for k in range(-2, 3):
        radius = Fraction(2) ** (-k)
        total = sum(w for pt, w in pts if pt[0] == 0 or Fraction(2) ** (-_ordq(pt[0])) <= radius)
        if total != radius:
            return False
    return True


def _ordq(x):
    from .padic import ord_rational

    return ord_rational(x, 2)


def _check_chi_additivity():
    level = GridLevel(2, 2, 1)
    pts = [pt[0] for pt, _ in lattice(level)]
    return all(chi(x + y, 2) == chi(x, 2) * chi(y, 2) for x in pts for y in pts)


def _check_spower():
    w1, w2 = (Fraction(1, 2), Fraction(3)), (Fraction(-2, 3), Fraction(1, 5))
    lhs = s_power(*w1, s=3) * s_power(*w2, s=3)
    return (lhs - s_power(w1[0] + w2[0], w1[1] + w2[1], s=3)).is_zero()


def _check_inversion(rng):
    for p in (2, 3):
        for k in (1, 2):
            level = GridLevel(p, k, k)
            for _ in range(3):
                f = _random_grid(rng, level)
                if not fourier(fourier(f), "inverse").equals(f):
                    return False
    return True


def _check_convolution_theorem(rng):
    for p in (2, 3):
        level = GridLevel(p, 1, 1)
        f, g = _random_grid(rng, level), _random_grid(rng, level)
        if not fourier(convolve(f, g)).equals(fourier(f) * fourier(g)):
            return False
    return True


def _check_zero_frequency(rng):
    level = GridLevel(3, 1, 2)
    f = _random_grid(rng, level)
    return integrate(f) == fourier(f).value_at_index((0,))


def _check_reflection(rng):
    level = GridLevel(2, 2, 2)
    f = _random_grid(rng, level)
    return fourier(fourier(f)).equals(f.reflect())


def suite_fourier(rng):
    return [
        ("fourier.padic-identities", lambda: _check_padic(rng)),
        ("fourier.lattice-weights", _check_lattice_weights),
        ("fourier.chi-additivity", _check_chi_additivity),
        ("fourier.s-power-homomorphism", _check_spower),
        ("fourier.inversion", lambda: _check_inversion(rng)),
        ("fourier.convolution-theorem", lambda: _check_convolution_theorem(rng)),
        ("fourier.zero-frequency", lambda: _check_zero_frequency(rng)),
        ("fourier.reflection", lambda: _check_reflection(rng)),
    ]


# gamma suite

def _check_gamma_closed():
    return gamma(-1, 2, 3, "closed") == Fraction(-4, 3)


def _check_gamma_series():
    diff = gamma(-1, 2, 3, "series", 30) - gamma(-1, 2, 3, "closed")
    size = valuation(diff, 3)
    return size <= valuation(s_power(30, s=3))


def _check_gamma_divergent():
    try:
        gamma(1, 2, 3, "series")
    except DivergentSeries:
        return True
    return False


def _check_gamma_nonvanishing():
    for b in (Fraction(-3), Fraction(-1, 2), Fraction(1, 3), Fraction(2), Fraction(5, 2)):
        for p, s in ((2, 3), (3, 2), (5, 3)):
            if gamma(b, p, s, "closed").is_zero():
                return False
    return True


def suite_gamma(rng):
    return [
        ("gamma.closed-value", _check_gamma_closed),
        ("gamma.series-agrees", _check_gamma_series),
        ("gamma.divergent-series", _check_gamma_divergent),
        ("gamma.nonvanishing", _check_gamma_nonvanishing),
    ]


# pd suite

def _check_pd_value():
    f = GridFunction.ball_indicator(GridLevel(2, 2, 2))
    return pd(0, f, 0, 3) == Fraction(-3, 5)


def _check_pd_constant():
    level = GridLevel(3, 1, 1)
    f = GridFunction.from_rational_array(level, np.full(level.shape, Fraction(2), dtype=object))
    return all(pd(Fraction(1, 2), f, level.coord(X), 2, exterior=2).is_zero()
               for X in range(level.side))


def _check_kernel_value():
    return kernel(-2, GridLevel(2, 2, 2), 3)(2) == Fraction(-9, 4)


def _check_psi_size():
    level = GridLevel(2, 2, 2)
    b = Fraction(1, 2)
    g = psi(b, level, 3)
    for X in range(1, level.side):
        o = level.coord_ord(X)
        if valuation(g.value_at_index((X,)), 3).exponent != (1 + b) * o:
            return False
    return True


def _check_pderiv_constant():
    level = GridLevel(2, 2, 2)
    f = GridFunction.from_rational_array(level, np.ones(level.shape, dtype=object))
    return p_deriv(-2, f, 3).is_zero()


def _check_kernel_fourier():
    level = GridLevel(2, 3, 3)
    d = fourier(kernel(-2, level, 3)) - psi(-2, level.dual(), 3)
    vals = {d.value_at_index((Y,)) for Y in range(1, level.side)}
    return len(vals) == 1


def composition_residual(u, b, level, s, width=1):
    r = p_deriv(u, kernel(b, level, s), s) - kernel(u + b, level, s)
    return max_size(r, interior_mask(level, width), s)


def check_composition_decay(s=3):
    out = []
    for u, b in ((-2, -2), (-2, -3)):
        r2 = composition_residual(u, b, GridLevel(2, 2, 2), s)
        r3 = composition_residual(u, b, GridLevel(2, 3, 3), s)
        ok = r3.is_zero() or (not r2.is_zero() and
                              (r3.exponent - r2.exponent).compare(1) >= 0)
        out.append((u, b, r2, r3, ok))
    return out


def suite_pd(rng):
    def composition():
        rows = check_composition_decay()
        detail = "; ".join(f"(u,b)=({u},{b}): (2,2) {r2}, (3,3) {r3}" for u, b, r2, r3, _ in rows)
        return all(r[-1] for r in rows), detail

    return [
        ("pd.value", _check_pd_value),
        ("pd.constant", _check_pd_constant),
        ("pd.kernel-value", _check_kernel_value),
        ("pd.psi-size-law", _check_psi_size),
        ("pd.pderiv-constant", _check_pderiv_constant),
        ("pd.kernel-fourier-constant-offset", _check_kernel_fourier),
        ("pd.composition-decay", composition),
    ]


# qgauss suite

def _spec(B, gamma=None, q=2, p=2, s=3, zeta=(1, 0)):
    return QGaussianSpec.make(p, s, q, B, gamma, zeta)


def _check_normalization(rng):
    for _ in range(3):
        n = rng.choice([1, 2])
        B = [[Fraction(rng.randint(0, 3))]] if n == 1 else [[2, 1], [1, 2]]
        gm = [Fraction(rng.randint(0, 3), 2) for _ in range(n)]
        sp = _spec(B, gm)
        level = GridLevel(2, 1, 1, n)
        if integrate(density(sp, level)) != 1:
            return False
    return True


def _check_conv_law():
    a, b = _spec([[1]], [Fraction(1, 2)]), _spec([[2]], [Fraction(1, 4)])
    level = GridLevel(2, 1, 1)
    return convolve(density(a, level), density(b, level)).equals(density(convolve_specs(a, b), level))


def _check_projection():
    sp = _spec([[1, 0], [0, 2]], [Fraction(1, 2), 0])
    g = (1, 3)
    pf = pushforward(density(sp, GridLevel(2, 1, 1, 2)), g)
    return pf.equals(density(project(sp, g), pf.level))


def _check_trace_linear():
    sp = _spec([[1]])
    level = GridLevel(2, 2, 2)
    return trace_expectation(sp, 2, level).value == trace_expectation(sp, 1, level).value * 2


def _check_probe():
    sizes = orthogonality_probe(2, 1, 1, 2, 3, 4)
    return all(a > b for a, b in zip(sizes, sizes[1:]))


def _check_equivalence():
    a = _spec([[1]], [Fraction(1, 2)])
    return (equivalence_test(a, a) == "equivalent"
            and equivalence_test(_spec([[1]], [0]), _spec([[1]], [Fraction(3, 4)])) == "equivalent"
            and equivalence_test(_spec([[1]], q=2), _spec([[1]], q=1)) == "orthogonal")


def _check_feynman():
    sp = _spec([[1]], [Fraction(1, 2)])
    nu = DiscreteMeasure(((( Fraction(1, 2),), 1),))
    if feynman_integral(nu, sp) != char_functional(sp, (Fraction(1, 2),)):
        return False
    nu3 = DiscreteMeasure((((0,), 1), ((Fraction(1, 2),), 2), ((1,), Fraction(1, 3))))
    return feynman_integral(nu3, sp) == feynman_grid_side(nu3, sp, GridLevel(2, 1, 1))


def suite_qgauss(rng):
    return [
        ("qgauss.normalization", lambda: _check_normalization(rng)),
        ("qgauss.convolution-law", _check_conv_law),
        ("qgauss.projection", _check_projection),
        ("qgauss.trace-linear", _check_trace_linear),
        ("qgauss.orthogonality-probe", _check_probe),
        ("qgauss.equivalence", _check_equivalence),
        ("qgauss.feynman-reduction", _check_feynman),
    ]


# evolution suite

def _heat_setup():
    level = GridLevel(2, 2, 2)
    return SymbolForm.quadratic([[1]]), GridFunction.ball_indicator(level)


def _check_semigroup():
    A, u0 = _heat_setup()
    half = Fraction(1, 2)
    return evolve(A, evolve(A, u0, half, 3), half, 3).equals(evolve(A, u0, 1, 3))


def _check_two_routes():
    A, u0 = _heat_setup()
    return evolve(A, u0, 1, 3).equals(evolve_by_convolution(A, u0, 1, 3))


def _check_mass():
    A, u0 = _heat_setup()
    return integrate(evolve(A, u0, 1, 3)) == integrate(u0) and evolve(A, u0, 0, 3).equals(u0)


def _check_wiener():
    sp = _spec([[1]])
    real = compose_transitions(wiener_transition(sp, Fraction(1, 2), 0),
                               wiener_transition(sp, 1, Fraction(1, 2))) == wiener_transition(sp, 1, 0)
    q = Fraction(1, 4)
    local = compose_transitions(wiener_transition(sp, q, 0, "local-field", 2),
                                wiener_transition(sp, 3 * q, q, "local-field", 2)) == \
        wiener_transition(sp, 3 * q, 0, "local-field", 2)
    return real and local


def _check_path():
    sp = _spec([[1]])
    level = GridLevel(2, 2, 2)
    a = path_expectation(sp, TimeGrid((0, Fraction(1, 2), 1)), [1, 1], level)
    b = path_expectation(sp, TimeGrid((0, 1)), [1], level)
    return a == b


def suite_evolution(rng):
    return [
        ("evolution.semigroup", _check_semigroup),
        ("evolution.two-routes", _check_two_routes),
        ("evolution.mass-and-identity", _check_mass),
        ("evolution.wiener-additivity", _check_wiener),
        ("evolution.path-partition", _check_path),
    ]


_SUITE_FNS = {"fourier": suite_fourier, "gamma": suite_gamma, "pd": suite_pd,
              "qgauss": suite_qgauss, "evolution": suite_evolution}


def _coverage_check():
    from .cli import OP_COVERAGE, ALL_OPS

    missing = sorted(set(ALL_OPS) - set(OP_COVERAGE))
    return not missing, "missing: " + ", ".join(missing) if missing else "all operations reachable"


def verify_suite(name, seed=0):
    if name != "all" and name not in _SUITE_FNS:
        raise ValueError(f"unknown suite {name!r}")
    names = SUITES if name == "all" else (name,)
    report = VerificationReport(name, seed)
    for suite in names:
        rng = random.Random(f"{seed}:{suite}")
        checks = _SUITE_FNS[suite](rng)
        if suite == "fourier":
            checks.append(("fourier.cli-coverage", _coverage_check))
        for cid, fn in checks:
            t0 = time.perf_counter()
            try:
                out = fn()
                ok, detail = out if isinstance(out, tuple) else (out, None)
                status = "pass" if ok else "fail"
                residual = detail or ("0" if ok else "nonzero")
            except NacalcError as exc:
                status, residual = "undecided", f"{type(exc).__name__}: {exc}"
            report.checks.append(CheckResult(cid, status, residual,
                                             (time.perf_counter() - t0) * 1000))
    return report
