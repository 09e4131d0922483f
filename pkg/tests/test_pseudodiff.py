from fractions import Fraction
import random

import numpy as np
import pytest

from nacalc import GridFunction, GridLevel, fourier, kernel, p_deriv, pd, pd_multiplier, psi, s_power
from nacalc.errors import DivergentSeries, TailNotClosedForm
from nacalc.padic import ord_rational
from nacalc.value import UsNumber, valuation

S = 3


def test_pd_value_unit_ball():
    f = GridFunction.ball_indicator(GridLevel(2, 2, 2))
    assert pd(0, f, 0, S) == Fraction(-3, 5)
    assert pd(0, GridFunction.ball_indicator(GridLevel(2, 1, 1)), 0, S) == Fraction(-3, 5)


def test_pd_value_partial_sums():
    # sum_{j >= 1} 2^(j-1) 3^j, the shells |y| = 2^j, converges 3-adically to -3/5
    total = Fraction(0)
    for j in range(1, 30):
        total += Fraction(2) ** (j - 1) * Fraction(3) ** j
        assert ord_rational(total + Fraction(3, 5), 3) >= j + 1


def brute_pd(vals, level, X, b, J):
    """Direct cell sum plus J shells of the exterior tail (exterior value 0)."""
    p, P = level.p, level.side
    x = level.coord(X)
    total = Fraction(0)
    for Y in range(P):
        if Y == X:
            continue
        o = ord_rational(x - level.coord(Y), p)
        total += (vals[X] - vals[Y]) * Fraction(S) ** ((-1 - b) * o) * level.weight
    for j in range(level.M + 1, level.M + 1 + J):
        total += vals[X] * Fraction(p - 1, p) * Fraction(p) ** j * Fraction(S) ** ((1 + b) * j)
    return total


@pytest.mark.parametrize("p,b", [(2, 1), (3, 0), (2, 2)])
def test_pd_matches_brute_force(p, b):
    level = GridLevel(p, 1, 2)
    rng = random.Random(p * 10 + b)
    vals = [Fraction(rng.randint(-3, 3)) for _ in range(level.side)]
    f = GridFunction.from_rational_array(level, np.array(vals, dtype=object))
    J = 20
    for X in range(level.side):
        got = pd(b, f, level.coord(X), S)
        diff = got - brute_pd(vals, level, X, b, J)
        if not diff.is_zero():
            # the truncated tail misses sum_{j > M + J}; its size is at most s^-((1+b)(M+1+J))
            assert ord_rational(diff.as_rational(), S) >= (1 + b) * (level.M + 1 + J)


def test_pd_unit_ball_scope():
    level = GridLevel(2, 2, 2)
    f = GridFunction.ball_indicator(level)
    # inside Z_2 the indicator is constant, so the restricted integral vanishes
    assert pd(0, f, 0, S, scope="unit_ball").is_zero()


def test_pd_tail_errors():
    f = GridFunction.ball_indicator(GridLevel(2, 1, 1))
    with pytest.raises(DivergentSeries):
        pd(-2, f, 0, S)
    with pytest.raises(TailNotClosedForm):
        pd(0, f, 0, S, exterior=None)


def test_pd_constant_function_vanishes():
    level = GridLevel(3, 1, 1)
    f = GridFunction.from_rational_array(level, np.full(level.shape, Fraction(5), dtype=object))
    for X in range(level.side):
        assert pd(Fraction(1, 2), f, level.coord(X), S, exterior=5).is_zero()


@pytest.mark.parametrize("b", [0, Fraction(1, 2), 1])
def test_multiplier_route_differs_by_a_constant(b):
    # the multiplier acts on the periodic extension; for x in the window the
    # extra cells all sit at ord(x - y) = ord(y), so the difference is constant
    level = GridLevel(2, 2, 2)
    rng = random.Random(3)
    vals = np.array([Fraction(rng.randint(-2, 2)) for _ in range(level.side)], dtype=object)
    f = GridFunction.from_rational_array(level, vals)
    m = pd_multiplier(b, f, S)
    diffs = {pd(b, f, level.coord(X), S, exterior=0) - m.value_at_index((X,))
             for X in range(level.side)}
    assert len(diffs) == 1


def test_kernel_values():
    level = GridLevel(2, 2, 2)
    k = kernel(-2, level, S)
    # f_{-2}(x) = s^(ord x) / Gamma(-1) = 3^ord(x) * (-3/4)
    assert k(2) == Fraction(-9, 4)
    assert k(Fraction(1, 2)) == Fraction(-1, 4)
    assert k(0).is_zero()


def test_psi_size_law():
    level = GridLevel(2, 2, 2)
    b = Fraction(1, 3)
    g = psi(b, level, S)
    for X in range(1, level.side):
        o = level.coord_ord(X)
        v = valuation(g.value_at_index((X,)), S)
        assert v == valuation(s_power((1 + b) * o, 0, S), S)


def test_kernel_transform_is_multiplier_up_to_constant():
    level = GridLevel(2, 3, 3)
    d = fourier(kernel(-2, level, S)) - psi(-2, level.dual(), S)
    assert len({d.value_at_index((Y,)) for Y in range(1, level.side)}) == 1


def test_p_deriv_kills_constants():
    level = GridLevel(2, 2, 2)
    one = GridFunction.from_rational_array(level, np.ones(level.shape, dtype=object))
    assert p_deriv(-2, one, S).is_zero()
    assert p_deriv(Fraction(-3, 2), one, S).is_zero()


def test_p_deriv_linear():
    level = GridLevel(2, 1, 2)
    rng = random.Random(0)
    vals = np.array([Fraction(rng.randint(-3, 3)) for _ in range(level.side)], dtype=object)
    a = GridFunction.from_rational_array(level, vals)
    b = GridFunction.ball_indicator(level)
    lhs = p_deriv(-2, a + b.scale(UsNumber.const(2, S)), S)
    rhs = p_deriv(-2, a, S) + p_deriv(-2, b, S).scale(UsNumber.const(2, S))
    assert lhs.equals(rhs)
