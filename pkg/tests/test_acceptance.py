"""The thirteen acceptance criteria, each at its stated tolerance and time budget.

Each criterion prints one line ``ACCEPTANCE <n> PASS|FAIL <seconds> <detail>``;
the lines are collected again in the pytest terminal summary.  Run this file
directly to print them without pytest.
"""

from fractions import Fraction
import json
from pathlib import Path
import random
import time

import numpy as np
import pytest

from nacalc import (DiscreteMeasure, GridFunction, GridLevel, QGaussianSpec, SymbolForm, TimeGrid,
                    char_functional, convolve, convolve_specs, density, equivalence_test, evolve,
                    feynman_integral, fourier, gamma, integrate, orthogonality_probe, path_expectation,
                    pd, project, s_power, trace_expectation, valuation, wiener_transition)
from nacalc.errors import DivergentSeries
from nacalc.evolution import compose_transitions, evolve_by_convolution
from nacalc.qgauss import feynman_grid_side, pushforward
from nacalc.verify import check_composition_decay

GOLDEN = Path(__file__).parent / "golden"
RESULTS = []
SWEEP = [(p, k) for p in (2, 3) for k in (1, 2, 3)]


def _random_grid(rng, level):
    vals = np.array([Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(level.size)],
                    dtype=object).reshape(level.shape)
    return GridFunction.from_rational_array(level, vals)


def criterion_1():
    rng = random.Random(1)
    bad = 0
    for p, k in SWEEP:
        level = GridLevel(p, k, k)
        for _ in range(20):
            f = _random_grid(rng, level)
            bad += not (fourier(fourier(f), "inverse") - f).is_zero()
    return bad == 0, f"{bad} of {20 * len(SWEEP)} nonzero residues"


def criterion_2():
    rng = random.Random(2)
    bad = 0
    for p, k in SWEEP:
        level = GridLevel(p, k, k)
        for _ in range(20):
            f, g = _random_grid(rng, level), _random_grid(rng, level)
            bad += not (fourier(convolve(f, g)) - fourier(f) * fourier(g)).is_zero()
    return bad == 0, f"{bad} of {20 * len(SWEEP)} nonzero residues"


def criterion_3():
    closed = gamma(-1, 2, 3, "closed")
    resid = valuation(gamma(-1, 2, 3, "series", 30) - closed, 3)
    bound = valuation(s_power(30, 0, 3), 3)
    try:
        gamma(0, 2, 3, "series")
        divergent = False
    except DivergentSeries:
        divergent = True
    ok = closed == Fraction(-4, 3) and resid <= bound and divergent
    return ok, f"closed {closed}, series residual size {resid}, DivergentSeries raised: {divergent}"


def criterion_4():
    val = pd(0, GridFunction.ball_indicator(GridLevel(2, 2, 2)), 0, 3, "full")
    return val == Fraction(-3, 5), f"pd = {val}"


def criterion_5():
    rows = check_composition_decay(3)
    detail = "; ".join(f"(u,b)=({u},{b}) level(2,2) {r2} level(3,3) {r3}" for u, b, r2, r3, _ in rows)
    return all(r[-1] for r in rows), detail


def _random_spec(rng, n=None, q=None):
    n = n or rng.choice([1, 2])
    if n == 1:
        B = [[Fraction(rng.randint(0, 4), rng.randint(1, 2))]]
    else:
        a, c = rng.randint(1, 4), rng.randint(1, 4)
        b = rng.randint(-1, 1) if a * c > 1 else 0
        B = [[a, b], [b, c]]
    gm = [Fraction(rng.randint(0, 7), rng.choice([1, 2, 4])) for _ in range(n)]
    sp = QGaussianSpec.make(2, 3, q or rng.choice([1, 2]), B, gm)
    sp.validate()
    return sp


def criterion_6():
    rng = random.Random(6)
    norm_bad = 0
    specs = [_random_spec(rng) for _ in range(10)]
    for sp in specs:
        norm_bad += integrate(density(sp, GridLevel(2, 1, 1, sp.n))) != 1
    conv_bad = 0
    pairs = [(a, _random_spec(rng, a.n, a.q)) for a in specs]
    for a, b in pairs:
        level = GridLevel(2, 1, 1, a.n)
        lhs = convolve(density(a, level), density(b, level))
        conv_bad += not (lhs - density(convolve_specs(a, b), level)).is_zero()
    ok = norm_bad == 0 and conv_bad == 0
    return ok, f"normalization failures {norm_bad}/10, convolution residues {conv_bad}/{len(pairs)}"


PROJECTION_CASES = [
    ([[1, 0], [0, 2]], [Fraction(1, 2), 0], (1, 1)),
    ([[1, 0], [0, 2]], [0, 0], (Fraction(1, 2), Fraction(3, 2))),
    ([[2, 0], [0, 1]], [Fraction(1, 4), Fraction(1, 2)], (1, 3)),
    ([[1, 0], [0, 3]], [0, Fraction(1, 2)], (2, 0)),
    ([[3, 0], [0, 1]], [Fraction(3, 4), 0], (1, 1)),
]


def criterion_7():
    bad = 0
    for B, gm, g in PROJECTION_CASES:
        sp = QGaussianSpec.make(2, 3, 2, B, gm)
        pf = pushforward(density(sp, GridLevel(2, 1, 1, 2)), g)
        bad += not (pf - density(project(sp, g), pf.level)).is_zero()
    return bad == 0, f"{bad} of {len(PROJECTION_CASES)} nonzero residues"


TRACE_SPECS = ([[1]], [[Fraction(1, 2)]], [[1, 0], [0, 3]], [[2, 1], [1, 2]])


def criterion_8():
    golden = json.loads((GOLDEN / "trace_constant.json").read_text())
    level = GridLevel(2, 2, 2)
    base = QGaussianSpec.make(2, 3, 2, [[1]])
    t1 = trace_expectation(base, 1, level).value
    t2 = trace_expectation(base, 2, level).value
    linear = t2 == t1 * 2
    blocks = QGaussianSpec.make(2, 3, 2, [[1, 0], [0, 3]])
    lvl2 = GridLevel(2, 2, 2, 2)
    additive = trace_expectation(blocks, 1, lvl2).value == \
        trace_expectation(QGaussianSpec.make(2, 3, 2, [[1]]), 1, level).value + \
        trace_expectation(QGaussianSpec.make(2, 3, 2, [[3]]), 1, level).value
    ratios = []
    for B in TRACE_SPECS:
        sp = QGaussianSpec.make(2, 3, 2, B)
        ratios.append(trace_expectation(sp, 1, level.with_dim(sp.n)).ratio)
    constant = len(set(ratios)) == 1 and str(ratios[0]) == golden["constant"]
    ok = linear and additive and constant
    return ok, (f"linear {linear}, block-additive {additive}, ratios {[str(r) for r in ratios]} "
                f"(golden {golden['constant']})")


def criterion_9():
    sizes = orthogonality_probe(2, 1, 1, 2, 3, 4)
    ok = all(a > b for a, b in zip(sizes, sizes[1:]))
    return ok, "sizes " + ", ".join(str(x) for x in sizes)


def criterion_10():
    def sp(B, gm=None, q=2):
        return QGaussianSpec.make(2, 3, q, B, gm)

    verdicts = [
        equivalence_test(sp([[1]], [Fraction(1, 2)]), sp([[1]], [Fraction(1, 2)])),
        equivalence_test(sp([[1]]), sp([[1]], [Fraction(3, 4)])),
        equivalence_test(sp([[1]], q=2), sp([[1]], q=1)),
    ]
    return verdicts == ["equivalent", "equivalent", "orthogonal"], " / ".join(verdicts)


def criterion_11():
    level = GridLevel(2, 2, 2)
    A = SymbolForm.quadratic([[1]])
    u0 = GridFunction.ball_indicator(level) + GridFunction.delta(level)
    half = Fraction(1, 2)
    u1 = evolve(A, u0, 1, 3)
    checks = {
        "semigroup": (evolve(A, evolve(A, u0, half, 3), half, 3) - u1).is_zero(),
        "two routes": (evolve_by_convolution(A, u0, 1, 3) - u1).is_zero(),
        "integral": integrate(u1) == integrate(u0),
        "initial": (evolve(A, u0, 0, 3) - u0).is_zero(),
    }
    return all(checks.values()), ", ".join(f"{k} {v}" for k, v in checks.items())


def criterion_12():
    level = GridLevel(2, 1, 1)
    ok = True
    for zeta in ((1, 0), (1, 1)):
        sp = QGaussianSpec.make(2, 3, 2, [[1]], [Fraction(1, 2)], zeta)
        point = DiscreteMeasure((((Fraction(1, 2),), 1),))
        ok &= feynman_integral(point, sp) == char_functional(sp, (Fraction(1, 2),))
        nu = DiscreteMeasure((((0,), Fraction(1, 2)), ((Fraction(1, 2),), -1), ((Fraction(3, 2),), 3)))
        ok &= (feynman_integral(nu, sp) - feynman_grid_side(nu, sp, level)).is_zero()
    return ok, "zeta in {1, 1+i}"


def criterion_13():
    sp = QGaussianSpec.make(2, 3, 2, [[1]])
    real = compose_transitions(wiener_transition(sp, Fraction(1, 3), 0),
                               wiener_transition(sp, 1, Fraction(1, 3))) == wiener_transition(sp, 1, 0)
    local = all(
        compose_transitions(wiener_transition(sp, u, 0, "local-field", 2),
                            wiener_transition(sp, t, u, "local-field", 2))
        == wiener_transition(sp, t, 0, "local-field", 2)
        for u, t in ((Fraction(1, 4), Fraction(3, 4)), (Fraction(1, 8), Fraction(5, 8))))
    level = GridLevel(2, 2, 2)
    coarse = path_expectation(sp, TimeGrid((0, 1)), [1], level)
    fine = path_expectation(sp, TimeGrid((0, Fraction(1, 3), Fraction(1, 2), 1)), [1, 1, 1], level)
    path = (coarse - fine).is_zero()
    return real and local and path, f"real {real}, local-field {local}, path partition {path}"


CRITERIA = [
    (1, criterion_1, 10), (2, criterion_2, 10), (3, criterion_3, 1), (4, criterion_4, 1),
    (5, criterion_5, 30), (6, criterion_6, 30), (7, criterion_7, 10), (8, criterion_8, 60),
    (9, criterion_9, 30), (10, criterion_10, 1), (11, criterion_11, 30), (12, criterion_12, 10),
    (13, criterion_13, 30),
]


def run_criterion(n, fn, limit):
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    in_time = elapsed < limit
    status = "PASS" if ok and in_time else "FAIL"
    line = f"ACCEPTANCE {n:2d} {status} {elapsed:7.3f}s (limit {limit}s) {detail}"
    if not in_time:
        line += " [over time budget]"
    print(line, flush=True)
    RESULTS.append(line)
    return ok, in_time, line


@pytest.mark.parametrize("n,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_acceptance(n, fn, limit):
    ok, in_time, line = run_criterion(n, fn, limit)
    assert ok and in_time, line


if __name__ == "__main__":
    for crit in CRITERIA:
        run_criterion(*crit)
