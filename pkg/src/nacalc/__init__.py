"""nacalc: exact computations for s-adic valued analysis over Q_p."""

from .errors import *  # noqa: F401,F403
from .padic import GridLevel, PAdicNumber, frac_part, lattice, ord
from .value import SSize, UsNumber, chi, s_power, valuation
from .exponent import Exponent
from .cyclotomic import Cyclotomic
from .grid import GridFunction
from .haar import convolve, fourier, gamma, integrate
from .pseudodiff import kernel, p_deriv, pd, pd_multiplier, psi
from .qgauss import (DiscreteMeasure, QGaussianSpec, char_functional, convolve_specs, density,
                     equivalence_test, feynman_integral, moment, orthogonality_probe, project,
                     trace_expectation)
from .evolution import (SymbolForm, TimeGrid, evolve, path_expectation, symbol_eval,
                        transition_functional, wiener_transition)
from .verify import VerificationReport, verify_suite

__version__ = "0.1.0"
