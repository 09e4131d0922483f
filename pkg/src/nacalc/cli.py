"""Command-line front end: ``nacalc <subcommand> ...``.

Exit status is 0 on success, 1 when a check fails and 2 on usage or input
errors.  Every diagnostic line starts with ``error[Ennn]``.
"""

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from .errors import NacalcError
from .evolution import (SymbolForm, TimeGrid, ellipticity, evolve, path_expectation,
                        symbol_eval, transition_functional, wiener_transition)
from .exponent import Exponent
from .grid import GridFunction
from .haar import convolve, fourier, gamma, integrate
from .padic import GridLevel, PAdicNumber, fmt_rational, frac_part, lattice_to_json, ord as p_ord
from .padic import parse_rational
from .pseudodiff import kernel, p_deriv, pd
from .qgauss import (DiscreteMeasure, QGaussianSpec, char_functional, convolve_specs, density,
                     equivalence_test, feynman_integral, moment, orthogonality_probe, project,
                     trace_expectation)
from .value import UsNumber, chi, s_power, valuation

# every public operation and the subcommand that reaches it
OP_COVERAGE = {
    "ord": "padic ord",
    "frac_part": "padic frac",
    "lattice": "lattice",
    "s_power": "value spower",
    "chi": "value chi",
    "valuation": "value valuation",
    "integrate": "integrate",
    "fourier": "fourier",
    "convolve": "convolve",
    "gamma": "gamma",
    "pd": "pd",
    "p_deriv": "pderiv",
    "kernel": "kernel",
    "char_functional": "qgauss char",
    "density": "qgauss density",
    "project": "qgauss project",
    "convolve_specs": "qgauss convolve",
    "moment": "qgauss moments",
    "trace_expectation": "qgauss trace",
    "feynman_integral": "qgauss feynman",
    "equivalence_test": "qgauss compare",
    "orthogonality_probe": "qgauss probe",
    "symbol_eval": "heat symbol",
    "transition_functional": "heat transition",
    "evolve": "heat evolve",
    "wiener_transition": "wiener transition",
    "path_expectation": "wiener expect",
    "dispatch": "(entry point)",
    "verify_suite": "verify",
}

ALL_OPS = (
    "ord", "lattice", "frac_part", "s_power", "chi", "valuation", "integrate", "fourier",
    "convolve", "gamma", "pd", "p_deriv", "kernel", "char_functional", "density", "project",
    "convolve_specs", "moment", "trace_expectation", "feynman_integral", "equivalence_test",
    "orthogonality_probe", "symbol_eval", "transition_functional", "evolve",
    "wiener_transition", "path_expectation", "dispatch", "verify_suite",
)


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        code = "E101" if "invalid choice" in message else "E104"
        raise CliError(code, f"{self.prog}: {message}")


# argument parsing helpers

def _level(text):
    try:
        M, N = (int(v) for v in text.split(","))
    except ValueError:
        raise CliError("E104", f"--level expects M,N, got {text!r}")
    return M, N


def _cexp(text, s=None):
    """'a' or 'a,b' for the complex exponent a + i b."""
    parts = text.split(",")
    if len(parts) == 1:
        return Exponent.coerce(parse_rational(parts[0]), s)
    if len(parts) == 2:
        return (Exponent.coerce(parse_rational(parts[0]), s),
                Exponent.coerce(parse_rational(parts[1]), s))
    raise CliError("E104", f"bad complex exponent {text!r}")


def _vector(text):
    return tuple(parse_rational(v) for v in text.split(","))


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError("E102", f"{path}: malformed JSON ({exc})")
    except OSError as exc:
        raise CliError("E104", f"{path}: {exc.strerror}")


def _from_json(loader, path, *args):
    data = _load(path)
    try:
        return loader(data, *args)
    except (KeyError, TypeError, IndexError) as exc:
        raise CliError("E102", f"{path}: missing or malformed field ({exc})")


def _need(args, name):
    val = getattr(args, name)
    if val is None:
        raise CliError("E104", f"--{name.replace('_', '-')} is required")
    return val


def _grid(path, s=None, level=None):
    data = _load(path)
    if isinstance(data, dict) and "level" in data:
        return _from_json(GridFunction.from_json, path, s)
    vals = data.get("values") if isinstance(data, dict) else data
    if level is None or not isinstance(vals, list):
        raise CliError("E102", f"{path}: expected a grid function with a level")
    if len(vals) != level.size:
        raise CliError("E102", f"{path}: expected {level.size} values, got {len(vals)}")
    arr = np.array([parse_rational(v) for v in vals], dtype=object).reshape(level.shape)
    return GridFunction.from_rational_array(level, arr)


def _spec(path):
    spec = _from_json(QGaussianSpec.from_json, path)
    spec.validate()
    return spec


# output

def _scalar_json(x):
    if isinstance(x, UsNumber):
        return x.to_json()
    if isinstance(x, Fraction):
        return fmt_rational(x)
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


def _emit(args, payload, text=None):
    if isinstance(payload, (dict, list)) or args.json or text is None:
        out = json.dumps(payload, indent=2, sort_keys=True)
    else:
        out = text
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _emit_value(args, x):
    _emit(args, {"value": _scalar_json(x), "text": str(x)} if args.json else str(x), str(x))


# subcommands

def cmd_padic(args):
    p = _need(args, "p")
    x = PAdicNumber.from_rational(parse_rational(_need(args, "x")), p)
    if args.op == "ord":
        o = p_ord(x)
        _emit_value(args, "inf" if o == float("inf") else o)
    else:
        _emit_value(args, frac_part(x))


def cmd_lattice(args):
    M, N = _level(_need(args, "level"))
    _emit(args, lattice_to_json(GridLevel(_need(args, "p"), M, N, args.n)))


def cmd_value(args):
    s = args.s
    if args.op == "spower":
        alpha, beta = parse_rational(_need(args, "alpha")), parse_rational(args.beta or "0")
        _emit_value(args, s_power(alpha, beta, _need(args, "s")))
    elif args.op == "chi":
        _emit_value(args, chi(parse_rational(_need(args, "x")), _need(args, "p")))
    else:
        if args.input:
            x = _from_json(UsNumber.from_json, args.input, s)
        else:
            x = UsNumber.const(parse_rational(_need(args, "x")), s)
        _emit(args, valuation(x, _need(args, "s")).to_json())


def cmd_gamma(args):
    b = _cexp(_need(args, "b"), args.s)
    _emit_value(args, gamma(b, _need(args, "p"), _need(args, "s"), args.mode or "closed", args.trunc))


def cmd_fourier(args):
    f = _grid(_need(args, "input"), args.s)
    _emit(args, fourier(f, args.direction).to_json())


def cmd_integrate(args):
    _emit_value(args, integrate(_grid(_need(args, "input"), args.s)))


def cmd_convolve(args):
    f = _grid(_need(args, "input"), args.s)
    g = _grid(_need(args, "input2"), args.s)
    _emit(args, convolve(f, g).to_json())


def cmd_kernel(args):
    M, N = _level(_need(args, "level"))
    s = _need(args, "s")
    _emit(args, kernel(_cexp(_need(args, "u"), s), GridLevel(_need(args, "p"), M, N), s).to_json())


def _grid_arg(args, s):
    level = None
    if args.level and args.p:
        level = GridLevel(args.p, *_level(args.level))
    return _grid(_need(args, "input"), s, level)


def cmd_pd(args):
    s = _need(args, "s")
    f = _grid_arg(args, s)
    ext = None if args.exterior == "none" else parse_rational(args.exterior)
    x = parse_rational(args.x or "0")
    _emit_value(args, pd(_cexp(_need(args, "b"), s), f, x, s, args.scope or "full", ext))


def cmd_pderiv(args):
    s = _need(args, "s")
    f = _grid_arg(args, s)
    _emit(args, p_deriv(_cexp(_need(args, "u"), s), f, s).to_json())


def _spec_level(args, spec):
    M, N = _level(args.level or "1,1")
    return GridLevel(spec.p, M, N, spec.n)


def cmd_qgauss(args):
    op = args.op
    if op == "probe":
        sizes = orthogonality_probe(parse_rational(_need(args, "q")), parse_rational(_need(args, "g")),
                                    parse_rational(args.beta or "1"), _need(args, "p"),
                                    _need(args, "s"), args.nmax)
        _emit(args, {"sizes": [str(x) for x in sizes],
                     "strictly_decreasing": all(a > b for a, b in zip(sizes, sizes[1:]))})
        return 0
    spec = _spec(_need(args, "spec"))
    if op == "density":
        _emit(args, density(spec, _spec_level(args, spec)).to_json())
    elif op == "char":
        _emit_value(args, char_functional(spec, _vector(_need(args, "z"))))
    elif op == "convolve":
        _emit(args, convolve_specs(spec, _spec(_need(args, "spec2"))).to_json())
    elif op == "project":
        _emit(args, project(spec, _vector(_need(args, "g"))).to_json())
    elif op == "moments":
        idx = tuple(int(j) - 1 for j in _need(args, "indices").split(","))
        w = parse_rational(args.w or fmt_rational(spec.q / 2))
        _emit_value(args, moment(spec, idx, w, _spec_level(args, spec), args.degree))
    elif op == "trace":
        res = trace_expectation(spec, parse_rational(args.t or "1"), _spec_level(args, spec))
        if args.json:
            _emit(args, {"value": res.value.to_json(), "text": str(res.value),
                         "ratio": None if res.ratio is None else str(res.ratio)})
        else:
            _emit(args, None, str(res.value))
    elif op == "feynman":
        data = _load(_need(args, "nu"))
        try:
            atoms = tuple((tuple(parse_rational(c) for c in a["point"]),
                           UsNumber.from_json(a.get("weight", "1"), spec.s, spec.p))
                          for a in data["atoms"])
        except (KeyError, TypeError) as exc:
            raise CliError("E102", f"{args.nu}: malformed measure ({exc})")
        _emit_value(args, feynman_integral(DiscreteMeasure(atoms), spec))
    elif op == "compare":
        verdict = equivalence_test(spec, _spec(_need(args, "spec2")))
        _emit(args, {"verdict": verdict} if args.json else verdict, verdict)
    return 0


def _symbol(args):
    return _from_json(SymbolForm.from_json, _need(args, "symbol"))


def cmd_heat(args):
    A = _symbol(args)
    if args.op == "symbol":
        s = _need(args, "s")
        _emit_value(args, symbol_eval(A, [parse_rational(v) for v in _need(args, "y").split(",")], s))
    elif args.op == "transition":
        z = _vector(_need(args, "z"))
        _emit_value(args, transition_functional(A, parse_rational(args.t or "1"), z,
                                                _need(args, "s"), _need(args, "p")))
    elif args.op == "ellipticity":
        ok, certified = ellipticity(A)
        _emit(args, {"elliptic": ok, "certified": certified})
    else:
        s = args.s
        level = None
        if args.level and args.p:
            level = GridLevel(args.p, *_level(args.level), A.n)
        u0 = _grid(_need(args, "u0"), s, level)
        if level is not None and u0.level != level:
            raise CliError("E104", "--level does not match the level stored in --u0")
        s = s or u0.s
        if s is None:
            raise CliError("E104", "--s is required")
        _emit(args, evolve(A, u0, parse_rational(_need(args, "t")), s).to_json())
    return 0


def cmd_wiener(args):
    spec = _spec(_need(args, "spec"))
    if args.op == "transition":
        kind = args.kind
        out = wiener_transition(spec, parse_rational(_need(args, "t")),
                                parse_rational(args.u or "0"), kind, args.prime)
        _emit(args, out.to_json())
    else:
        times = _need(args, "grid").split(",")
        grid = TimeGrid(tuple(times))
        if args.phi:
            data = _load(args.phi)
            phi = data.get("values") if isinstance(data, dict) else data
            if not isinstance(phi, list):
                raise CliError("E102", f"{args.phi}: expected a list of values")
        else:
            phi = ["1"] * (len(times) - 1)
        _emit_value(args, path_expectation(spec, grid, phi, _spec_level(args, spec)))
    return 0


def cmd_verify(args):
    from .verify import verify_suite

    report = verify_suite(args.suite, args.seed)
    _emit(args, report.to_json(args.timings))
    return 0 if report.overall == "pass" else 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--s", type=int)
    common.add_argument("--q")
    common.add_argument("--b")
    common.add_argument("--u")
    common.add_argument("--t")
    common.add_argument("--level")
    common.add_argument("--spec")
    common.add_argument("--spec2")
    common.add_argument("--symbol")
    common.add_argument("--u0")
    common.add_argument("--grid")
    common.add_argument("--mode", choices=["closed", "series"])
    common.add_argument("--scope", choices=["full", "unit_ball"])
    common.add_argument("--out")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true")

    parser = _Parser(prog="nacalc", description="Exact non-Archimedean analysis engine.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_, ops=None, **extra):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if ops:
            sp.add_argument("op", choices=ops)
        for flag, kw in extra.items():
            sp.add_argument("--" + flag.replace("_", "-"), dest=flag, **kw)
        sp.set_defaults(func=fn)
        return sp

    add("padic", cmd_padic, "p-adic order and fractional part", ["ord", "frac"], x={})
    add("lattice", cmd_lattice, "lattice points and Haar weights", n={"type": int, "default": 1})
    add("value", cmd_value, "s-powers, characters and valuations", ["spower", "chi", "valuation"],
        x={}, alpha={}, beta={}, input={"metavar": "FILE"})
    add("gamma", cmd_gamma, "the Gamma integral", trunc={"type": int, "default": 30})
    add("fourier", cmd_fourier, "Fourier transform of a grid function", input={"metavar": "FILE"},
        direction={"choices": ["forward", "inverse"], "default": "forward"})
    add("integrate", cmd_integrate, "Haar integral of a grid function", input={"metavar": "FILE"})
    add("convolve", cmd_convolve, "convolution of two grid functions",
        input={"metavar": "FILE"}, input2={"metavar": "FILE"})
    add("kernel", cmd_kernel, "the kernel f_u on a lattice")
    add("pd", cmd_pd, "PD(b, f)(x)", input={"metavar": "FILE"}, x={},
        exterior={"default": "0", "help": "constant value of f outside the grid, or 'none'"})
    add("pderiv", cmd_pderiv, "the operator of order u applied to f", input={"metavar": "FILE"})
    add("qgauss", cmd_qgauss, "q-Gaussian measures",
        ["density", "char", "convolve", "project", "moments", "trace", "feynman", "compare", "probe"],
        z={}, g={}, indices={}, w={}, degree={"type": int}, nu={"metavar": "FILE"},
        beta={}, nmax={"type": int, "default": 4})
    add("heat", cmd_heat, "heat-type evolution", ["evolve", "symbol", "transition", "ellipticity"],
        y={}, z={})
    add("wiener", cmd_wiener, "q-Wiener transitions and path expectations", ["expect", "transition"],
        phi={"metavar": "FILE"}, kind={"choices": ["real", "local-field"], "default": "real"},
        prime={"type": int})
    add("verify", cmd_verify, "run verification suites",
        suite={"choices": ["all", "fourier", "gamma", "pd", "qgauss", "evolution"], "default": "all"},
        timings={"action": "store_true"})
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args) or 0
    except CliError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except NacalcError as exc:
        print(f"error[{exc.code}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error[E104]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
