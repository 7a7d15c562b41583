"""
Workspace - Derived Chronicles

This module handles the named registry of algebras, modules, bimodules,
complexes, maps, dg algebra dumps and reports that commands run against,
and its human-editable text format.

Grammar, one directive per line, `#` starts a comment:

    field Q | Fp:<p>
    algebra NAME quiver            block: vertices N [labels], arrow LABEL SRC TGT,
                                   relation EXPR, cap N, end
    algebra NAME table DIM         block: labels ..., unit ..., mult I J = v ..., end
    module NAME over A regular | quotient EXPR, EXPR | sum M N ... | syzygy M
    module NAME over A explicit DIM            block: act LABEL = MATRIX, end
    bimodule NAME over B A regular
    bimodule NAME over B A explicit DIM        block: left LABEL = MATRIX, right LABEL = MATRIX, end
    complex NAME over A explicit LO HI         block: term DEG MODULE | term DEG regular |
                                   term DEG explicit DIM, act DEG LABEL = MATRIX,
                                   diff DEG = MATRIX, truncation L, end
    complex NAME from shift X N | sum X Y ... | resolve M L [free] | stalk M [DEG] | cone F
    bicomplex NAME over B A explicit LO HI     block: term DEG explicit DIM, left DEG LABEL = MATRIX,
                                   right DEG LABEL = MATRIX, diff DEG = MATRIX, end
    bicomplex NAME from stalk BIMODULE [DEG]
    map NAME SRC -> TGT DEG        block: comp DEG = MATRIX | comp DEG leftmult EXPR, end
    dg NAME from end X
    dg NAME                        block: degrees LO HI, validity LO HI | validity none, dim N D,
                                   diff N = MATRIX, unit v ..., prod P I Q J = v ..., end
    report NAME json {...}
    checks {...}

MATRIX is "ROWS COLS : a b ; c d", entries are integers or p/q. EXPR is a sum
of terms "c*x^2*y" over basis labels (arrow labels inside a quiver block).
"""

import json
import logging
import re
from dataclasses import dataclass
from typing import Any

import pandas as pd

from models.algebra import (
    FDBimodule,
    FDModule,
    QuiverPresentation,
    build_algebra_from_quiver,
    build_algebra_from_structure_constants,
    cyclic_quotient,
    direct_sum_modules,
    regular_bimodule,
    regular_module,
    same_algebra,
    syzygy,
    zero_module,
)
from models.complexes import (
    BimoduleComplex,
    BoundedComplex,
    GradedMap,
    SpaceComplex,
    bimodule_stalk,
    cone,
    direct_sum,
    shift,
    stalk,
    zero_bimodule,
)
from models.dg import TableDGAlgebra, dump_dg_algebra, end_dg_algebra
from models.resolutions import resolve
from utils.errors import ChroniclesError, InvariantError, ParseError, UsageError
from utils.linalg import RATIONAL_FIELD, FieldSpec, Mat

logger = logging.getLogger(__name__)

KINDS = ("algebra", "module", "bimodule", "complex", "bicomplex", "map", "dg", "report")
WORKSPACE_SUFFIX = ".ws"
_NUMBER = re.compile(r"^\d+(/\d+)?$")


@dataclass
class Entry:
    """One named object; recipe keeps the directive it was built from"""

    name: str
    kind: str
    value: Any
    recipe: str = ""


class Workspace:
    """Named registry of objects over one ground field"""

    def __init__(self, field_spec=RATIONAL_FIELD):
        self.field = field_spec
        self.entries = {}
        self.presentations = {}
        self.checks = {}

    def add(self, name, kind, value, recipe=""):
        if kind not in KINDS:
            raise UsageError(f"unknown object kind {kind!r}")
        if name in self.entries:
            raise UsageError(f"name {name!r} is already registered")
        self.entries[name] = Entry(name, kind, value, recipe)
        logger.debug(f"Registered {kind} {name}")
        return value

    def add_algebra(self, name, algebra, presentation=None, recipe=""):
        self.add(name, "algebra", algebra, recipe)
        if presentation is not None:
            self.presentations[name] = presentation
        return algebra

    def get(self, name, kind=None):
        entry = self.entries.get(name)
        if entry is None:
            raise UsageError(f"no object named {name!r} in the workspace")
        if kind is not None and entry.kind not in ((kind,) if isinstance(kind, str) else kind):
            raise UsageError(f"{name!r} is a {entry.kind}, expected {kind}")
        return entry.value

    def kind_of(self, name):
        self.get(name)
        return self.entries[name].kind

    def names(self, kind=None):
        return [n for n, e in self.entries.items() if kind is None or e.kind == kind]

    def name_of(self, value, kind):
        """The registered name of an object, matched by value"""
        for n, e in self.entries.items():
            if e.kind == kind and (e.value is value or e.value == value):
                return n
        return None

    def __contains__(self, name):
        return name in self.entries

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, Workspace):
            return NotImplemented
        if self.field != other.field or list(self.entries) != list(other.entries):
            return False
        if self.checks != other.checks:
            return False
        return all(a.kind == b.kind and a.value == b.value
                   for a, b in zip(self.entries.values(), other.entries.values()))

    __hash__ = None

    def summary(self):
        """
        Registry listing for display

        Returns:
            pd.DataFrame: one row per object with its kind and a short description
        """
        rows = [{"name": e.name, "kind": e.kind, "description": describe(e.value, e.kind)}
                for e in self.entries.values()]
        return pd.DataFrame(rows, columns=["name", "kind", "description"])


def describe(value, kind):
    if kind == "algebra":
        return f"dim {value.dim}: {', '.join(value.labels)}"
    if kind in ("module", "bimodule"):
        return f"dim {value.dim}"
    if kind in ("complex", "bicomplex"):
        return "dims " + " ".join(f"{i}:{value.dim(i)}" for i in value.degrees)
    if kind == "map":
        return f"degree {value.degree}, {len(value.components)} nonzero components"
    if kind == "dg":
        return f"degrees {value.lo}..{value.hi}, total dim {value.total_dim()}"
    if kind == "report":
        return ", ".join(sorted(value)) if isinstance(value, dict) else str(value)
    return ""


# Scalars, matrices and element expressions

def parse_scalar(field_spec, token, line):
    try:
        return field_spec.element(token)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(line, f"bad field element {token!r}: {str(e)}")


def parse_vector(field_spec, tokens, line):
    return tuple(parse_scalar(field_spec, t, line) for t in tokens)


def format_vector(field_spec, v):
    return " ".join(field_spec.format(a) for a in v)


def parse_matrix(field_spec, text, line):
    head, sep, body = text.partition(":")
    if not sep:
        raise ParseError(line, f"matrix {text!r} needs a 'ROWS COLS :' header")
    try:
        rows, cols = (int(t) for t in head.split())
    except ValueError:
        raise ParseError(line, f"bad matrix header {head!r}")
    body_rows = [r.split() for r in body.split(";")] if body.strip() else []
    if rows == 0 or cols == 0:
        if any(body_rows):
            raise ParseError(line, "an empty matrix takes no entries")
        return Mat.zeros(rows, cols, field_spec)
    if len(body_rows) != rows or any(len(r) != cols for r in body_rows):
        raise ParseError(line, f"matrix body does not have shape {rows}x{cols}")
    return Mat.from_rows([parse_vector(field_spec, r, line) for r in body_rows], field_spec, cols)


def format_matrix(m):
    head = f"{m.rows} {m.cols} :"
    if not m.rows or not m.cols:
        return head
    return head + " " + " ; ".join(format_vector(m.field, m.row(i)) for i in range(m.rows))


def _terms(text, line):
    compact = text.replace(" ", "")
    if not compact:
        raise ParseError(line, "empty expression")
    if not re.fullmatch(r"[+-]?[^+-]+([+-][^+-]+)*", compact):
        raise ParseError(line, f"cannot read expression {text!r}")
    return re.findall(r"([+-]?)([^+-]+)", compact)


def _factors(term, line):
    """Split c*u^k*v into (coefficient tokens, [(name, power)])"""
    coeffs, names = [], []
    for factor in term.split("*"):
        if not factor:
            raise ParseError(line, f"empty factor in {term!r}")
        if _NUMBER.match(factor):
            coeffs.append(factor)
            continue
        name, _, power = factor.partition("^")
        try:
            k = int(power) if power else 1
        except ValueError:
            raise ParseError(line, f"bad exponent in {factor!r}")
        if k < 1:
            raise ParseError(line, f"exponent must be positive in {factor!r}")
        names.append((name, k))
    return coeffs, names


def _coefficient(field_spec, sign, coeffs, line):
    c = field_spec.one
    for token in coeffs:
        c = c * parse_scalar(field_spec, token, line)
    return -c if sign == "-" else c


def parse_element(A, text, line):
    """Coordinates of an expression like 2*x^2 - 1/3*y in the algebra A"""
    K = A.field
    acc = [K.zero] * A.dim
    for sign, term in _terms(text, line):
        coeffs, names = _factors(term, line)
        vec = A.unit
        for name, k in names:
            if name not in A.labels:
                raise ParseError(line, f"unknown basis label {name!r}")
            for _ in range(k):
                vec = A.multiply(vec, A.basis_vector(A.index(name)))
        c = _coefficient(K, sign, coeffs, line)
        for i, a in enumerate(vec):
            acc[i] += c * a
    return tuple(acc)


def parse_relation(field_spec, arrows, text, line):
    labels = [a[0] for a in arrows]
    terms = []
    for sign, term in _terms(text, line):
        coeffs, names = _factors(term, line)
        path = []
        for name, k in names:
            if name not in labels:
                raise ParseError(line, f"unknown arrow {name!r}")
            path.extend([labels.index(name)] * k)
        terms.append((tuple(path), _coefficient(field_spec, sign, coeffs, line)))
    return tuple(terms)


def format_terms(field_spec, terms):
    """Render (coefficient, monomial) pairs as a signed sum"""
    parts = []
    for c, monomial in terms:
        negative = field_spec.kind == RATIONAL_FIELD.kind and c < 0
        c = -c if negative else c
        body = monomial if c == field_spec.one else f"{field_spec.format(c)}*{monomial}"
        if not parts:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f"{'-' if negative else '+'} {body}")
    return " ".join(parts)


# Parsing

class _Lines:
    def __init__(self, text):
        self.items = []
        for number, raw in enumerate(text.splitlines(), start=1):
            content = raw.split("#", 1)[0].strip()
            if content:
                self.items.append((number, content))
        self.pos = 0

    def next(self):
        item = self.items[self.pos]
        self.pos += 1
        return item

    def done(self):
        return self.pos >= len(self.items)

    def block(self, opener):
        """Lines up to the matching 'end'"""
        body = []
        while not self.done():
            number, content = self.next()
            if content == "end":
                return body
            body.append((number, content))
        raise ParseError(opener, "block is missing its 'end'")


def _split_assignment(content, line):
    left, sep, right = content.partition("=")
    if not sep:
        raise ParseError(line, f"expected '=' in {content!r}")
    return left.split(), right.strip()


def _int(token, line):
    try:
        return int(token)
    except ValueError:
        raise ParseError(line, f"expected an integer, got {token!r}")


class WorkspaceParser:
    """Reads workspace text into a Workspace, validating every object as it is built"""

    def __init__(self, text):
        self.lines = _Lines(text)
        self.ws = Workspace()
        self._field_seen = False

    def parse(self):
        while not self.lines.done():
            line, content = self.lines.next()
            tokens = content.split()
            head = tokens[0]
            handler = getattr(self, f"_parse_{head}", None)
            if handler is None:
                raise ParseError(line, f"unknown directive {head!r}")
            handler(line, content, tokens)
        logger.info(f"Parsed workspace with {len(self.ws)} objects over {self.ws.field}")
        return self.ws

    def _name(self, tokens, line, kind):
        if len(tokens) < 2:
            raise ParseError(line, f"{kind} needs a name")
        name = tokens[1]
        if name in self.ws:
            raise ParseError(line, f"name {name!r} is already registered")
        return name

    def _ref(self, name, kind, line):
        entry = self.ws.entries.get(name)
        if entry is None:
            raise ParseError(line, f"unknown reference {name!r}")
        if entry.kind != kind:
            raise ParseError(line, f"{name!r} is a {entry.kind}, expected {kind}")
        return entry.value

    def _over(self, tokens, at, line):
        if len(tokens) <= at + 1 or tokens[at] != "over":
            raise ParseError(line, "expected 'over ALGEBRA'")
        return self._ref(tokens[at + 1], "algebra", line)

    def _parse_field(self, line, content, tokens):
        if self._field_seen or len(self.ws):
            raise ParseError(line, "the field directive must come first and only once")
        if len(tokens) != 2:
            raise ParseError(line, "usage: field Q | Fp:<p>")
        try:
            self.ws.field = FieldSpec.parse(tokens[1])
        except ValueError as e:
            raise ParseError(line, str(e))
        self._field_seen = True

    def _parse_checks(self, line, content, tokens):
        try:
            self.ws.checks = json.loads(content[len("checks"):].strip())
        except json.JSONDecodeError as e:
            raise ParseError(line, f"bad checks document: {str(e)}")

    def _parse_report(self, line, content, tokens):
        name = self._name(tokens, line, "report")
        if len(tokens) < 3 or tokens[2] != "json":
            raise ParseError(line, "usage: report NAME json {...}")
        payload = content.split("json", 1)[1].strip()
        try:
            self.ws.add(name, "report", json.loads(payload), content)
        except json.JSONDecodeError as e:
            raise ParseError(line, f"bad report document: {str(e)}")

    # algebras

    def _parse_algebra(self, line, content, tokens):
        name = self._name(tokens, line, "algebra")
        form = tokens[2] if len(tokens) > 2 else ""
        K = self.ws.field
        if form == "quiver":
            body = self.lines.block(line)
            vertex_count, vertex_labels, arrows, cap = None, (), [], None
            raw_relations = []
            for number, text in body:
                parts = text.split()
                if parts[0] == "vertices":
                    vertex_count = _int(parts[1], number) if len(parts) > 1 else None
                    vertex_labels = tuple(parts[2:])
                elif parts[0] == "arrow":
                    if len(parts) != 4:
                        raise ParseError(number, "usage: arrow LABEL SOURCE TARGET")
                    arrows.append((parts[1], _int(parts[2], number), _int(parts[3], number)))
                elif parts[0] == "relation":
                    raw_relations.append((number, text[len("relation"):].strip()))
                elif parts[0] == "cap":
                    cap = _int(parts[1], number)
                else:
                    raise ParseError(number, f"unknown quiver directive {parts[0]!r}")
            if vertex_count is None or cap is None:
                raise ParseError(line, "a quiver needs 'vertices' and 'cap'")
            relations = tuple(parse_relation(K, arrows, text, number) for number, text in raw_relations)
            q = QuiverPresentation(K, vertex_count, tuple(arrows), relations, cap, vertex_labels)
            self.ws.add_algebra(name, build_algebra_from_quiver(q), q, content)
        elif form == "table":
            if len(tokens) != 4:
                raise ParseError(line, "usage: algebra NAME table DIM")
            d = _int(tokens[3], line)
            labels, unit = None, None
            mult = [[[K.zero] * d for _ in range(d)] for _ in range(d)]
            for number, text in self.lines.block(line):
                parts = text.split()
                if parts[0] == "labels":
                    labels = tuple(parts[1:])
                elif parts[0] == "unit":
                    unit = parse_vector(K, parts[1:], number)
                elif parts[0] == "mult":
                    left, right = _split_assignment(text, number)
                    i, j = _int(left[1], number), _int(left[2], number)
                    vec = parse_vector(K, right.split(), number)
                    if not (0 <= i < d and 0 <= j < d) or len(vec) != d:
                        raise ParseError(number, f"mult entry out of range for dimension {d}")
                    mult[i][j] = list(vec)
                else:
                    raise ParseError(number, f"unknown table directive {parts[0]!r}")
            if labels is None or unit is None or len(labels) != d:
                raise ParseError(line, f"a table algebra needs {d} labels and a unit")
            self.ws.add_algebra(name, build_algebra_from_structure_constants(K, labels, mult, unit),
                                None, content)
        else:
            raise ParseError(line, "usage: algebra NAME quiver | table DIM")

    # modules and bimodules

    def _explicit_actions(self, A, dim, body, keyword, line, degree=None):
        """Collect 'keyword [DEG] LABEL = MATRIX' lines into one matrix per basis label"""
        K = self.ws.field
        found = {}
        for number, text in body:
            if text.split()[0] != keyword:
                continue
            left, right = _split_assignment(text, number)
            if degree is not None:
                if len(left) != 3:
                    raise ParseError(number, f"usage: {keyword} DEG LABEL = MATRIX")
                if _int(left[1], number) != degree:
                    continue
                label = left[2]
            else:
                if len(left) != 2:
                    raise ParseError(number, f"usage: {keyword} LABEL = MATRIX")
                label = left[1]
            if label not in A.labels:
                raise ParseError(number, f"unknown basis label {label!r}")
            m = parse_matrix(K, right, number)
            if m.shape != (dim, dim):
                raise ParseError(number, f"{keyword} {label} must be {dim}x{dim}")
            found[label] = m
        if dim == 0:
            return tuple(Mat.zeros(0, 0, K) for _ in A.labels)
        missing = [a for a in A.labels if a not in found]
        if missing:
            raise ParseError(line, f"missing {keyword} matrices for {', '.join(missing)}")
        return tuple(found[a] for a in A.labels)

    def _parse_module(self, line, content, tokens):
        name = self._name(tokens, line, "module")
        A = self._over(tokens, 2, line)
        form = tokens[4] if len(tokens) > 4 else ""
        args = tokens[5:]
        if form == "regular":
            M = regular_module(A)
        elif form == "quotient":
            text = content.split("quotient", 1)[1]
            M = cyclic_quotient(A, [parse_element(A, g, line) for g in text.split(",")])
        elif form == "sum":
            if not args:
                raise ParseError(line, "sum needs at least one module")
            M = direct_sum_modules([self._module_over(a, A, line) for a in args], A)[0]
        elif form == "syzygy":
            if len(args) != 1:
                raise ParseError(line, "usage: module NAME over A syzygy M")
            M = syzygy(self._module_over(args[0], A, line))
        elif form == "explicit":
            if len(args) != 1:
                raise ParseError(line, "usage: module NAME over A explicit DIM")
            dim = _int(args[0], line)
            M = FDModule(A, dim, self._explicit_actions(A, dim, self.lines.block(line), "act", line))
        else:
            raise ParseError(line, f"unknown module form {form!r}")
        self.ws.add(name, "module", M.validate(name), content)

    def _module_over(self, ref, A, line):
        M = self._ref(ref, "module", line)
        if not same_algebra(M.algebra, A):
            raise ParseError(line, f"module {ref!r} lives over another algebra")
        return M

    def _parse_bimodule(self, line, content, tokens):
        name = self._name(tokens, line, "bimodule")
        if len(tokens) < 6 or tokens[2] != "over":
            raise ParseError(line, "usage: bimodule NAME over LEFT RIGHT regular | explicit DIM")
        B = self._ref(tokens[3], "algebra", line)
        A = self._ref(tokens[4], "algebra", line)
        if tokens[5] == "regular":
            if not same_algebra(A, B):
                raise ParseError(line, "the regular bimodule needs equal left and right algebras")
            Y = regular_bimodule(A)
        elif tokens[5] == "explicit" and len(tokens) == 7:
            dim = _int(tokens[6], line)
            body = self.lines.block(line)
            Y = FDBimodule(B, A, dim, self._explicit_actions(B, dim, body, "left", line),
                           self._explicit_actions(A, dim, body, "right", line))
        else:
            raise ParseError(line, "usage: bimodule NAME over LEFT RIGHT regular | explicit DIM")
        self.ws.add(name, "bimodule", Y.validate(name), content)

    # complexes

    def _diffs(self, body, lo, hi, dims, line):
        K = self.ws.field
        diffs = {}
        for number, text in body:
            if not text.startswith("diff"):
                continue
            left, right = _split_assignment(text, number)
            i = _int(left[1], number)
            if not lo <= i < hi:
                raise ParseError(number, f"differential degree {i} outside [{lo}, {hi - 1}]")
            m = parse_matrix(K, right, number)
            if m.shape != (dims[i], dims[i + 1]):
                raise ParseError(number, f"diff {i} must be {dims[i]}x{dims[i + 1]}")
            diffs[i] = m
        return tuple(diffs.get(i, Mat.zeros(dims[i], dims[i + 1], K)) for i in range(lo, hi))

    def _parse_complex(self, line, content, tokens):
        name = self._name(tokens, line, "complex")
        if len(tokens) > 3 and tokens[2] == "from":
            X = self._complex_from(tokens[3], tokens[4:], line)
        elif len(tokens) == 7 and tokens[2] == "over" and tokens[4] == "explicit":
            A = self._ref(tokens[3], "algebra", line)
            lo, hi = _int(tokens[5], line), _int(tokens[6], line)
            body = self.lines.block(line)
            modules, truncation = {}, None
            for number, text in body:
                parts = text.split()
                if parts[0] == "term":
                    if len(parts) < 3:
                        raise ParseError(number, "usage: term DEG MODULE | regular | explicit DIM")
                    i = _int(parts[1], number)
                    if not lo <= i <= hi:
                        raise ParseError(number, f"term degree {i} outside [{lo}, {hi}]")
                    if parts[2] == "regular":
                        modules[i] = regular_module(A)
                    elif parts[2] == "explicit":
                        dim = _int(parts[3], number)
                        acts = self._explicit_actions(A, dim, body, "act", number, degree=i)
                        modules[i] = FDModule(A, dim, acts).validate(f"{name} term {i}")
                    else:
                        modules[i] = self._module_over(parts[2], A, number)
                elif parts[0] == "truncation":
                    truncation = _int(parts[1], number)
                elif parts[0] not in ("act", "diff"):
                    raise ParseError(number, f"unknown complex directive {parts[0]!r}")
            terms = tuple(modules.get(i, zero_module(A)) for i in range(lo, hi + 1))
            dims = {i: terms[i - lo].dim for i in range(lo, hi + 1)}
            X = BoundedComplex(A, lo, hi, terms, self._diffs(body, lo, hi, dims, line), truncation)
        else:
            raise ParseError(line, "usage: complex NAME over A explicit LO HI | complex NAME from ...")
        self.ws.add(name, "complex", X.validate(name), content)

    def _complex_from(self, form, args, line):
        if form == "shift" and len(args) == 2:
            return shift(self._ref(args[0], "complex", line), _int(args[1], line))
        if form == "sum" and args:
            return direct_sum([self._ref(a, "complex", line) for a in args]).complex
        if form == "resolve" and len(args) in (2, 3):
            if len(args) == 3 and args[2] != "free":
                raise ParseError(line, "usage: from resolve M L [free]")
            return resolve(self._ref(args[0], "module", line), _int(args[1], line), minimal=len(args) == 2).complex
        if form == "stalk" and len(args) in (1, 2):
            degree = _int(args[1], line) if len(args) == 2 else 0
            return stalk(self._ref(args[0], "module", line), degree)
        if form == "cone" and len(args) == 1:
            return cone(self._ref(args[0], "map", line)).cone
        raise ParseError(line, f"cannot build a complex from {form!r} with {args}")

    def _parse_bicomplex(self, line, content, tokens):
        name = self._name(tokens, line, "bicomplex")
        if len(tokens) in (5, 6) and tokens[2:4] == ["from", "stalk"]:
            Y = self._ref(tokens[4], "bimodule", line)
            X = bimodule_stalk(Y, _int(tokens[5], line) if len(tokens) == 6 else 0)
        elif len(tokens) == 8 and tokens[2] == "over" and tokens[5] == "explicit":
            B = self._ref(tokens[3], "algebra", line)
            A = self._ref(tokens[4], "algebra", line)
            lo, hi = _int(tokens[6], line), _int(tokens[7], line)
            body = self.lines.block(line)
            modules = {}
            for number, text in body:
                parts = text.split()
                if parts[0] == "term":
                    i = _int(parts[1], number)
                    if not lo <= i <= hi:
                        raise ParseError(number, f"term degree {i} outside [{lo}, {hi}]")
                    if len(parts) == 4 and parts[2] == "explicit":
                        dim = _int(parts[3], number)
                        modules[i] = FDBimodule(
                            B, A, dim,
                            self._explicit_actions(B, dim, body, "left", number, degree=i),
                            self._explicit_actions(A, dim, body, "right", number, degree=i),
                        ).validate(f"{name} term {i}")
                    elif len(parts) == 3:
                        modules[i] = self._ref(parts[2], "bimodule", number)
                    else:
                        raise ParseError(number, "usage: term DEG BIMODULE | explicit DIM")
                elif parts[0] not in ("left", "right", "diff"):
                    raise ParseError(number, f"unknown bicomplex directive {parts[0]!r}")
            terms = tuple(modules.get(i, zero_bimodule(B, A)) for i in range(lo, hi + 1))
            dims = {i: terms[i - lo].dim for i in range(lo, hi + 1)}
            X = BimoduleComplex(B, A, lo, hi, terms, self._diffs(body, lo, hi, dims, line))
        else:
            raise ParseError(line, "usage: bicomplex NAME over B A explicit LO HI | bicomplex NAME from stalk Y")
        self.ws.add(name, "bicomplex", X.validate(name), content)

    # maps and dg algebras

    def _parse_map(self, line, content, tokens):
        name = self._name(tokens, line, "map")
        if len(tokens) != 6 or tokens[3] != "->":
            raise ParseError(line, "usage: map NAME SOURCE -> TARGET DEGREE")
        X = self._ref(tokens[2], "complex", line)
        Y = self._ref(tokens[4], "complex", line)
        n = _int(tokens[5], line)
        A = X.algebra
        comps = {}
        for number, text in self.lines.block(line):
            parts = text.split()
            if parts[0] != "comp" or len(parts) < 3:
                raise ParseError(number, "usage: comp DEG = MATRIX | comp DEG leftmult EXPR")
            i = _int(parts[1], number)
            if parts[2] == "leftmult":
                if X.dim(i) != A.dim or Y.dim(i + n) != A.dim:
                    raise ParseError(number, "leftmult needs regular terms on both sides")
                comps[i] = A.left_mult_matrix(parse_element(A, text.split("leftmult", 1)[1], number))
            else:
                _, right = _split_assignment(text, number)
                comps[i] = parse_matrix(self.ws.field, right, number)
        try:
            f = GradedMap.build(X, Y, n, comps)
        except ChroniclesError as e:
            raise InvariantError(name, str(e))
        self.ws.add(name, "map", f.validate(name), content)

    def _parse_dg(self, line, content, tokens):
        name = self._name(tokens, line, "dg")
        if len(tokens) == 5 and tokens[2:4] == ["from", "end"]:
            L = dump_dg_algebra(end_dg_algebra(self._ref(tokens[4], "complex", line)), name)
            self.ws.add(name, "dg", L, content)
            return
        if len(tokens) != 2:
            raise ParseError(line, "usage: dg NAME | dg NAME from end X")
        K = self.ws.field
        body = self.lines.block(line)
        window, validity, dims, unit, products = None, None, {}, (), {}
        for number, text in body:
            parts = text.split()
            if parts[0] == "degrees":
                window = (_int(parts[1], number), _int(parts[2], number))
            elif parts[0] == "validity":
                validity = None if parts[1:] == ["none"] else (_int(parts[1], number), _int(parts[2], number))
            elif parts[0] == "dim":
                dims[_int(parts[1], number)] = _int(parts[2], number)
            elif parts[0] == "unit":
                unit = parse_vector(K, parts[1:], number)
            elif parts[0] == "prod":
                left, right = _split_assignment(text, number)
                key = tuple(_int(t, number) for t in left[1:])
                if len(key) != 4:
                    raise ParseError(number, "usage: prod P I Q J = VECTOR")
                products[key] = parse_vector(K, right.split(), number)
            elif parts[0] != "diff":
                raise ParseError(number, f"unknown dg directive {parts[0]!r}")
        if window is None:
            raise ParseError(line, "a dg dump needs 'degrees LO HI'")
        lo, hi = window
        full = {n: dims.get(n, 0) for n in range(lo, hi + 1)}
        diffs = self._diffs(body, lo, hi, full, line)
        space = SpaceComplex(K, lo, hi, full, {n: diffs[n - lo] for n in range(lo, hi)})
        if len(unit) != full.get(0, 0):
            raise ParseError(line, f"unit must have {full.get(0, 0)} entries")
        self.ws.add(name, "dg", TableDGAlgebra(space, unit, products, validity, name), content)


def parse_workspace(text):
    """
    Parse workspace text

    Raises:
        ParseError: on a malformed line
        InvariantError: when a constructed object fails its checks
    """
    return WorkspaceParser(text).parse()


def load_workspace(path):
    """
    Load a workspace file

    Args:
        path (str): path to a workspace file

    Returns:
        Workspace: the registry with every object validated
    """
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        logger.error(f"Failed to read workspace {path}: {str(e)}")
        raise UsageError(f"cannot read workspace {path}: {str(e)}")
    try:
        ws = parse_workspace(text)
    except ChroniclesError as e:
        logger.error(f"Failed to load workspace {path}: {str(e)}")
        raise
    logger.info(f"Loaded workspace {path} with {len(ws)} objects")
    return ws


# Serialization

class WorkspaceWriter:
    """Writes every object in explicit form"""

    def __init__(self, ws):
        self.ws = ws
        self.out = []

    def _algebra_name(self, A):
        name = self.ws.name_of(A, "algebra")
        if name is None:
            raise InvariantError("workspace", "an object lives over an unregistered algebra")
        return name

    def _ref(self, value, kind):
        name = self.ws.name_of(value, kind)
        if name is None:
            raise InvariantError("workspace", f"a map refers to an unregistered {kind}")
        return name

    def write(self):
        self.out.append(f"field {self.ws.field}")
        for entry in self.ws.entries.values():
            getattr(self, f"_write_{entry.kind}")(entry)
        if self.ws.checks:
            self.out.append(f"checks {json.dumps(self.ws.checks, sort_keys=True)}")
        return "\n".join(self.out) + "\n"

    def _write_algebra(self, entry):
        A = entry.value
        K = A.field
        q = self.ws.presentations.get(entry.name)
        if q is not None:
            self.out.append(f"algebra {entry.name} quiver")
            labels = " ".join(q.vertex_labels)
            self.out.append(f"  vertices {q.vertex_count}" + (f" {labels}" if labels else ""))
            for label, src, tgt in q.arrows:
                self.out.append(f"  arrow {label} {src} {tgt}")
            for rel in q.relations:
                self.out.append("  relation " + format_terms(K, [(c, q.path_label(p)) for p, c in rel]))
            self.out.append(f"  cap {q.nilpotency_cap}")
        else:
            self.out.append(f"algebra {entry.name} table {A.dim}")
            self.out.append("  labels " + " ".join(A.labels))
            self.out.append("  unit " + format_vector(K, A.unit))
            for i in range(A.dim):
                for j in range(A.dim):
                    if any(A.mult[i][j]):
                        self.out.append(f"  mult {i} {j} = {format_vector(K, A.mult[i][j])}")
        self.out.append("end")

    def _actions(self, prefix, labels, mats, dim):
        if dim:
            for label, m in zip(labels, mats):
                self.out.append(f"  {prefix}{label} = {format_matrix(m)}")

    def _write_module(self, entry):
        M = entry.value
        A = M.algebra
        head = f"module {entry.name} over {self._algebra_name(A)}"
        if M == regular_module(A):
            self.out.append(f"{head} regular")
            return
        self.out.append(f"{head} explicit {M.dim}")
        self._actions("act ", A.labels, M.action, M.dim)
        self.out.append("end")

    def _write_bimodule(self, entry):
        Y = entry.value
        self.out.append(f"bimodule {entry.name} over {self._algebra_name(Y.left)} "
                        f"{self._algebra_name(Y.right)} explicit {Y.dim}")
        self._actions("left ", Y.left.labels, Y.left_action, Y.dim)
        self._actions("right ", Y.right.labels, Y.right_action, Y.dim)
        self.out.append("end")

    def _write_diffs(self, X):
        for i in range(X.lo, X.hi):
            d = X.diff(i)
            if not d.is_zero():
                self.out.append(f"  diff {i} = {format_matrix(d)}")

    def _write_complex(self, entry):
        X = entry.value
        A = X.algebra
        self.out.append(f"complex {entry.name} over {self._algebra_name(A)} explicit {X.lo} {X.hi}")
        regular = regular_module(A)
        for i in X.degrees:
            M = X.module(i)
            if M == regular:
                self.out.append(f"  term {i} regular")
            elif M.dim:
                self.out.append(f"  term {i} explicit {M.dim}")
                self._actions(f"act {i} ", A.labels, M.action, M.dim)
        self._write_diffs(X)
        if X.truncation is not None:
            self.out.append(f"  truncation {X.truncation}")
        self.out.append("end")

    def _write_bicomplex(self, entry):
        X = entry.value
        self.out.append(f"bicomplex {entry.name} over {self._algebra_name(X.left)} "
                        f"{self._algebra_name(X.right)} explicit {X.lo} {X.hi}")
        for i in X.degrees:
            Y = X.module(i)
            if Y.dim:
                self.out.append(f"  term {i} explicit {Y.dim}")
                self._actions(f"left {i} ", X.left.labels, Y.left_action, Y.dim)
                self._actions(f"right {i} ", X.right.labels, Y.right_action, Y.dim)
        self._write_diffs(X)
        self.out.append("end")

    def _write_map(self, entry):
        f = entry.value
        self.out.append(f"map {entry.name} {self._ref(f.source, 'complex')} -> "
                        f"{self._ref(f.target, 'complex')} {f.degree}")
        for i, m in f.components:
            self.out.append(f"  comp {i} = {format_matrix(m)}")
        self.out.append("end")

    def _write_dg(self, entry):
        L = entry.value
        K = L.field
        self.out.append(f"dg {entry.name}")
        self.out.append(f"  degrees {L.lo} {L.hi}")
        self.out.append("  validity none" if L.validity is None else f"  validity {L.validity[0]} {L.validity[1]}")
        for n in L.degrees:
            if L.dim(n):
                self.out.append(f"  dim {n} {L.dim(n)}")
        for n in range(L.lo, L.hi):
            d = L.diff(n)
            if not d.is_zero():
                self.out.append(f"  diff {n} = {format_matrix(d)}")
        self.out.append(("  unit " + format_vector(K, L.unit)).rstrip())
        for (p, i, q, j), vec in sorted(L.product_table().items()):
            self.out.append(f"  prod {p} {i} {q} {j} = {format_vector(K, vec)}")
        self.out.append("end")

    def _write_report(self, entry):
        self.out.append(f"report {entry.name} json {json.dumps(entry.value, sort_keys=True)}")


def serialize_workspace(ws):
    """Workspace text; parse_workspace(serialize_workspace(ws)) == ws"""
    return WorkspaceWriter(ws).write()


def save_workspace(ws, path):
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(serialize_workspace(ws))
        logger.info(f"Saved workspace with {len(ws)} objects to {path}")
    except OSError as e:
        logger.error(f"Failed to save workspace {path}: {str(e)}")
        raise UsageError(f"cannot write workspace {path}: {str(e)}")
