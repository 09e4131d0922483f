"""Runtime limits read from the environment."""

import os

DEFAULT_MAX_GRID = 10**6
DEFAULT_PRECISION = 32
# largest p^L allowed as a cyclotomic conductor
DEFAULT_MAX_CONDUCTOR = 3**8
# digits used for numeric evaluation of exponents
NUMERIC_DPS = 60
# two exponents closer than this many digits are declared indeterminate
ORDER_THRESHOLD_DIGITS = 30


def max_grid():
    return int(os.environ.get("NACALC_MAX_GRID", DEFAULT_MAX_GRID))


def default_precision():
    return int(os.environ.get("NACALC_PRECISION", DEFAULT_PRECISION))


def max_conductor():
    return int(os.environ.get("NACALC_MAX_CONDUCTOR", DEFAULT_MAX_CONDUCTOR))
