"""
Commands - Derived Chronicles

This module dispatches named commands with key=value arguments against a
workspace and turns every result into a Report.
"""

import logging

from models.algebra import syzygy
from models.complexes import cone, hom_complex, homotopy_hom
from models.dg import (
    canonical_bimodule_maps,
    check_dg_axioms,
    cohomology_ring,
    composition_action_map,
    dump_dg_algebra,
    end_dg_algebra,
    quasi_iso_verdict,
    tensor_induction_map,
)
from models.equivalence import (
    DEFAULT_WINDOW,
    LEFT,
    RIGHT,
    auslander_yoneda,
    compare_resolutions,
    example_apr_tilt,
    example_nakayama,
    example_two_loop,
    left_approximation,
    mutation_pipeline,
    right_approximation,
    tilting_selforthogonality,
    verify_approximation,
)
from models.resolutions import DEFAULT_LENGTH, resolve
from utils.errors import UnknownCommand, UsageError
from utils.reports import Report
from utils.workspace import save_workspace

logger = logging.getLogger(__name__)

COMMANDS = {}
EXAMPLES = ("two-loop", "nakayama", "apr-tilt")
COMMAND_ALIASES = {"lemma35": "composition-map", "thm41": "mutate"}
EXAMPLE_ALIASES = {"dugas": "two-loop"}


def command(name):
    def register(func):
        COMMANDS[name] = func
        return func
    return register


def parse_window(text):
    """Read "a..b" into (a, b)"""
    lo, sep, hi = str(text).partition("..")
    try:
        if not sep:
            raise ValueError
        window = (int(lo), int(hi))
    except ValueError:
        raise UsageError(f"window must look like a..b, got {text!r}")
    if window[0] > window[1]:
        raise UsageError(f"empty window {text!r}")
    return window


def parse_args(tokens):
    """key=value tokens into a dict"""
    args = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or not key:
            raise UsageError(f"arguments are key=value, got {token!r}")
        args[key] = value
    return args


class Arguments:
    """Typed access to command arguments with CLI-level defaults"""

    def __init__(self, ws, args, window=DEFAULT_WINDOW, length=DEFAULT_LENGTH):
        self.ws = ws
        self.raw = dict(args)
        self.window = window
        self.length = length

    def text(self, key, default=None):
        if key in self.raw:
            return self.raw[key]
        if default is None:
            raise UsageError(f"missing argument {key}=")
        return default

    def integer(self, key, default=None):
        value = self.text(key, None if default is None else str(default))
        try:
            return int(value)
        except ValueError:
            raise UsageError(f"{key} must be an integer, got {value!r}")

    def flag(self, key, default):
        value = self.raw.get(key)
        if value is None:
            return default
        if value.lower() in ("1", "true", "yes"):
            return True
        if value.lower() in ("0", "false", "no"):
            return False
        raise UsageError(f"{key} must be true or false, got {value!r}")

    def window_arg(self, *keys):
        for key in keys:
            if key in self.raw:
                return parse_window(self.raw[key])
        return self.window

    def length_arg(self):
        return self.integer("L", self.length)

    def obj(self, key, kind):
        return self.ws.get(self.text(key), kind)

    def register(self, key, kind, value, default_name):
        """Store a computed object under name=... (or a default) and return the name"""
        name = self.raw.get(key, default_name)
        if name in self.ws:
            raise UsageError(f"name {name!r} is already registered; pass {key}=<new name>")
        self.ws.add(name, kind, value)
        return name


def _rank_rows(verdict):
    return [{"degree": r.degree, "source_dim": r.source_dim, "target_dim": r.target_dim,
             "rank": r.rank, "bijective": r.bijective} for r in verdict.rows]


def _dims_rows(dims):
    return [{"degree": n, "dim": d} for n, d in sorted(dims.items())]


@command("homology")
def _homology(a):
    X = a.obj("C", "complex")
    space = X.underlying_space()
    if "n" in a.raw:
        n = a.integer("n")
        return Report("homology", None, {"complex": a.text("C"), "degree": n, "dim": space.homology(n).dim})
    dims = space.cohomology_dims()
    return Report("homology", None, {"complex": a.text("C")}, {"cohomology": _dims_rows(dims)})


@command("hom-complex")
def _hom_complex(a):
    H = hom_complex(a.obj("X", "complex"), a.obj("Y", "complex"))
    rows = [{"degree": n, "dim": H.dim(n), "cohomology": H.homology(n).dim} for n in range(H.lo, H.hi + 1)]
    return Report("hom-complex", None, {"source": a.text("X"), "target": a.text("Y")}, {"hom": rows})


@command("k-hom")
def _k_hom(a):
    X, Y = a.obj("X", "complex"), a.obj("Y", "complex")
    if "n" in a.raw:
        n = a.integer("n")
        return Report("k-hom", None, {"source": a.text("X"), "target": a.text("Y"), "shift": n,
                                      "dim": homotopy_hom(X, Y, n).dim})
    lo, hi = a.window_arg("window")
    rows = [{"shift": n, "dim": homotopy_hom(X, Y, n).dim} for n in range(lo, hi + 1)]
    return Report("k-hom", None, {"source": a.text("X"), "target": a.text("Y"), "window": [lo, hi]},
                  {"homotopy_hom": rows})


@command("cone")
def _cone(a):
    triangle = cone(a.obj("f", "map"))
    name = a.register("name", "complex", triangle.cone, f"cone_{a.text('f')}")
    return Report("cone", triangle.verify(),
                  {"cone": name, "dims": {str(i): d for i, d in triangle.cone.dims().items()},
                   "triangle_verified": triangle.verify()})


@command("approximate")
def _approximate(a):
    side = a.text("side", LEFT)
    X, M = a.obj("X", "complex"), a.obj("M", "complex")
    window = a.window_arg("window", "W")
    minimal = a.flag("minimal", True)
    if side == LEFT:
        result = left_approximation(X, M, window, minimal)
    elif side == RIGHT:
        result = right_approximation(X, M, window, minimal)
    else:
        raise UsageError(f"side must be {LEFT} or {RIGHT}")
    data = {"side": side, "window": list(window),
            "multiplicities": {str(k): v for k, v in sorted(result.multiplicities.items())}}
    if "name" in a.raw:
        data["target"] = a.register("target", "complex", result.target, f"{a.text('name')}_target")
        data["map"] = a.register("name", "map", result.map, a.text("name"))
    return Report("approximate", result.report.passed, data, {"ranks": result.report.to_dict()["ranks"]})


@command("verify-approx")
def _verify_approx(a):
    report = verify_approximation(a.obj("f", "map"), a.obj("M", "complex"),
                                  a.window_arg("window", "W"), a.text("side", LEFT))
    return Report("verify-approx", report.passed,
                  {"side": report.side, "window": list(report.window), "failing_shifts": report.failing_shifts()},
                  {"ranks": report.to_dict()["ranks"]})


@command("end-dg")
def _end_dg(a):
    L = end_dg_algebra(a.obj("X", "complex"))
    axioms = check_dg_axioms(L, associativity=a.flag("associativity", True))
    data = {"degrees": [L.lo, L.hi], "validity": list(L.validity) if L.validity else None,
            "axioms": axioms.failure or "ok"}
    if "name" in a.raw:
        data["dg"] = a.register("name", "dg", dump_dg_algebra(L, a.text("name")), a.text("name"))
    return Report("end-dg", axioms.passed, data, {"dims": _dims_rows({n: L.dim(n) for n in L.degrees})})


def _dg_or_end(a, key):
    kind = a.ws.kind_of(a.text(key))
    if kind == "complex":
        return end_dg_algebra(a.obj(key, "complex"))
    return a.obj(key, "dg")


@command("hstar")
def _hstar(a):
    L = _dg_or_end(a, "L")
    window = a.window_arg("window") if "window" in a.raw else None
    ring = cohomology_ring(L, window)
    return Report("hstar", ring.check_associativity(),
                  {"window": list(ring.validity), "has_unit": ring.unit is not None,
                   "products": len(ring.products)},
                  {"dims": _dims_rows(ring.dims)})


@command("quasi-iso")
def _quasi_iso(a):
    f = a.obj("f", "map")
    if f.degree != 0:
        raise UsageError("quasi-iso needs a degree-0 map")
    X, Y = f.source, f.target
    lo, hi = min(X.lo, Y.lo), max(X.hi, Y.hi)
    if "window" in a.raw:
        lo, hi = a.window_arg("window")
    verdict = quasi_iso_verdict(X.underlying_space(), Y.underlying_space(),
                                {n: f.component(n) for n in range(lo, hi + 1)}, (lo, hi))
    return Report("quasi-iso", verdict.passed,
                  {"window": [lo, hi], "failing_degrees": verdict.failing_degrees()},
                  {"ranks": _rank_rows(verdict)})


@command("canonical-maps")
def _canonical_maps(a):
    maps = canonical_bimodule_maps(a.obj("Y", "bicomplex"), a.integer("sign", 1))
    passed = all((maps.left_check.passed, maps.right_check.passed,
                  maps.left_verdict.passed, maps.right_verdict.passed))
    return Report("canonical-maps", passed,
                  {"left_dg_map": maps.left_check.passed, "right_dg_map": maps.right_check.passed,
                   "left_failure": maps.left_check.failure, "right_failure": maps.right_check.failure},
                  {"left_ranks": _rank_rows(maps.left_verdict), "right_ranks": _rank_rows(maps.right_verdict)})


@command("composition-map")
def _composition_map(a):
    window = a.window_arg("window") if "window" in a.raw else None
    result = composition_action_map(a.obj("X", "complex"), a.obj("Y", "complex"), a.obj("Z", "complex"), window)
    return Report("composition-map", result.verdict.passed,
                  {"window": list(result.verdict.window), "chain_map": result.is_chain_map()},
                  {"ranks": _rank_rows(result.verdict)})


@command("mutate")
def _mutate(a):
    report = mutation_pipeline(a.obj("X", "complex"), a.obj("M", "complex"),
                               a.window_arg("window", "W"), a.flag("minimal", True))
    data = report.to_dict()
    if "name" in a.raw:
        data["mutated"] = a.register("name", "complex", report.triangle.cone, a.text("name"))
    return Report("mutate", report.passed, data)


@command("tilting-check")
def _tilting(a):
    report = tilting_selforthogonality(a.obj("T", "complex"), a.window_arg("window", "W"))
    return Report("tilting-check", report.passed,
                  {"window": list(report.window), "failing": report.failing(),
                   "projectivity_checked": report.projectivity_checked},
                  {"homotopy_hom": [{"shift": n, "dim": d} for n, d in sorted(report.dims.items())]})


@command("yoneda")
def _yoneda(a):
    N = a.obj("N", "module")
    if "A" in a.raw and a.obj("A", "algebra") != N.algebra:
        raise UsageError(f"module {a.text('N')} does not live over {a.text('A')}")
    window = a.window_arg("phi", "window") if ("phi" in a.raw or "window" in a.raw) else (0, 4)
    E = auslander_yoneda(N, window, a.length_arg(), a.flag("minimal", True))
    ring = E.algebra
    return Report("yoneda", E.degree_zero_matches(),
                  {"window": list(E.window), "length": E.length, "dims": list(E.dims()),
                   "associative": ring.check_associativity(), "unital": ring.check_unit()},
                  {"dims": _dims_rows(ring.dims)})


@command("tensor-map")
def _tensor_map(a):
    window = a.window_arg("window") if "window" in a.raw else None
    result = tensor_induction_map(a.obj("Y", "bicomplex"), a.obj("P", "complex"), window)
    return Report("tensor-map", result.check.passed and result.verdict.passed,
                  {"dg_map": result.check.passed, "failure": result.check.failure,
                   "window": list(result.verdict.window)},
                  {"ranks": _rank_rows(result.verdict)})


@command("resolve")
def _resolve(a):
    res = resolve(a.obj("M", "module"), a.length_arg(), not a.flag("free", False))
    data = {"length": res.length, "minimal": res.minimal,
            "dims": {str(i): d for i, d in res.complex.dims().items()}}
    if "name" in a.raw:
        data["complex"] = a.register("name", "complex", res.complex, a.text("name"))
    return Report("resolve", None, data)


@command("syzygy")
def _syzygy(a):
    omega = syzygy(a.obj("M", "module"))
    data = {"dim": omega.dim}
    if "name" in a.raw:
        data["module"] = a.register("name", "module", omega, a.text("name"))
    return Report("syzygy", None, data)


@command("compare-resolutions")
def _compare(a):
    result = compare_resolutions(a.obj("M", "module"), a.length_arg())
    return Report("compare-resolutions", result.passed, result.to_dict())


def _example(a, which):
    K = a.ws.field
    if which == "two-loop":
        ws = example_two_loop(a.integer("n", 2), a.integer("s", 2), K, a.window_arg("window", "W"))
    elif which == "nakayama":
        ws = example_nakayama(a.integer("n", 3), a.integer("r", 1), a.length_arg(), K)
    elif which == "apr-tilt":
        ws = example_apr_tilt(K)
    else:
        raise UnknownCommand(f"example {which}")
    passed = all(v for v in ws.checks.values() if isinstance(v, bool))
    data = {"example": which, "checks": ws.checks, "objects": ws.names()}
    if "save" in a.raw:
        save_workspace(ws, a.text("save"))
        data["saved"] = a.text("save")
    return Report(f"example {which}", passed, data)


def run_command(ws, name, args=None, window=DEFAULT_WINDOW, length=DEFAULT_LENGTH):
    """
    Run one command

    Args:
        ws (Workspace): the workspace the command reads and extends
        name (str): command name or alias, "example <which>" for the examples
        args (dict): key=value arguments
        window (tuple): default shift/degree window
        length (int): default resolution length

    Returns:
        Report: the command's report

    Raises:
        UnknownCommand: for a name outside the command table
    """
    a = Arguments(ws, args or {}, window, length)
    parts = name.split()
    if parts and parts[0] == "example":
        if len(parts) != 2:
            raise UsageError(f"usage: example {{{'|'.join(EXAMPLES)}}}")
        return _example(a, EXAMPLE_ALIASES.get(parts[1], parts[1]))
    name = COMMAND_ALIASES.get(name, name)
    handler = COMMANDS.get(name)
    if handler is None:
        raise UnknownCommand(name)
    logger.info(f"Running {name} with {a.raw}")
    return handler(a)
