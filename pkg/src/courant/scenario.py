"""Scenario documents: a chart, named definitions and an ordered list of checks.

A scenario is a UTF-8 JSON object (schema version 1)::

    {"schema": 1, "name": "...", "chart": ["x", "y"], "seed": 0,
     "expected": "pass",
     "definitions": {"r": {"kind": "endo", "matrix": [["0", "-1"], ["1", "0"]]}, ...},
     "checks": [{"kind": "nijenhuis", "args": {"derivation": "D"}, "options": {...}}]}

Expressions are strings in the field grammar. See docs/scenarios.md.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Any, Callable, Optional

from .algebroid import PreLieAlgebroidData, ProtoBialgebroidData, check_lie, tangent_algebroid
from .bundle import CourantData, check_courant_axioms, make_double, make_twisted_TM, tm_labels
from .cartan import KForm
from .compat import (
    bfield_transform,
    bivector_graph,
    bivector_graph_PN,
    check_CN,
    check_dirac,
    check_dual_IM,
    check_H_r_compatible,
    check_IM,
    cotangent_frame,
    form_graph,
    gauge_equivalent,
    lagrangian_invariance,
    tangent_frame,
)
from .deriv import MultiSection, OneDerivation, check_nijenhuis, dualize, make_lift, make_metric_derivation, restrict_to_invariant
from .field import Chart, ExpressionError, RatFunc
from .linalg import Matrix
from .report import CheckReport
from .split import check_manin, extract_proto, induced_bivector_identity

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Malformed scenario input (exit status 2)."""


# -- values -------------------------------------------------------------------------


@dataclass
class Value:
    kind: str
    obj: Any


def _expr(chart: Chart, text, where: str) -> RatFunc:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ScenarioError(f"{where}: expected an expression string, got {text!r}")
    try:
        return chart.parse(str(text))
    except ExpressionError as e:
        raise ScenarioError(f"{where}: {e}") from None


def _matrix(chart: Chart, rows, where: str) -> Matrix:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ScenarioError(f"{where}: expected a non-empty list of rows")
    try:
        return Matrix(chart, [[_expr(chart, e, f"{where}[{i}][{j}]") for j, e in enumerate(r)] for i, r in enumerate(rows)])
    except ScenarioError:
        raise
    except ValueError as e:
        raise ScenarioError(f"{where}: {e}") from None


def _index_key(chart: Chart, key: str, where: str) -> tuple[int, ...]:
    if key.strip() == "":
        return ()
    out = []
    for part in key.split(","):
        part = part.strip()
        if part in chart.var_names:
            out.append(chart.index(part))
        else:
            raise ScenarioError(f"{where}: unknown coordinate {part!r} in key {key!r}")
    return tuple(out)


def _frame_key(key: str, k: int, where: str) -> tuple[int, ...]:
    try:
        idx = tuple(int(p) - 1 for p in key.split(","))
    except ValueError:
        raise ScenarioError(f"{where}: frame keys are 1-based integers like '1,2', got {key!r}") from None
    if any(i < 0 or i >= k for i in idx):
        raise ScenarioError(f"{where}: frame index out of range in {key!r}")
    return idx


def _alternating_coeffs(items: dict, to_index, where: str, chart: Chart) -> dict:
    coeffs: dict[tuple[int, ...], RatFunc] = {}
    for key, text in items.items():
        idx = to_index(key)
        if len(set(idx)) != len(idx):
            raise ScenarioError(f"{where}: repeated index in {key!r}")
        order = sorted(range(len(idx)), key=lambda t: idx[t])
        inversions = sum(1 for a, b in combinations(range(len(idx)), 2) if idx[a] > idx[b])
        sidx = tuple(idx[t] for t in order)
        v = _expr(chart, text, f"{where}[{key!r}]")
        v = -v if inversions % 2 else v
        coeffs[sidx] = coeffs.get(sidx, chart.zero) + v
    return coeffs


# -- definitions ------------------------------------------------------------------------


class Scenario:
    def __init__(self, doc: dict, source: str = "<scenario>"):
        if not isinstance(doc, dict):
            raise ScenarioError("scenario must be a JSON object")
        if doc.get("schema") != SCHEMA_VERSION:
            raise ScenarioError(f"unsupported schema version {doc.get('schema')!r} (expected {SCHEMA_VERSION})")
        unknown = set(doc) - {"schema", "name", "description", "chart", "seed", "expected", "definitions", "checks"}
        if unknown:
            raise ScenarioError(f"unknown top-level fields: {', '.join(sorted(unknown))}")
        self.source = source
        self.name = doc.get("name", Path(source).stem)
        chart = doc.get("chart")
        if not isinstance(chart, list) or not chart or not all(isinstance(v, str) for v in chart):
            raise ScenarioError("chart must be a non-empty list of coordinate names")
        try:
            self.chart = Chart(chart)
        except ValueError as e:
            raise ScenarioError(f"chart: {e}") from None
        self.seed = doc.get("seed", 0)
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ScenarioError("seed must be an integer")
        self.expected = doc.get("expected")
        if self.expected not in (None, "pass", "fail"):
            raise ScenarioError("expected must be 'pass' or 'fail'")
        defs = doc.get("definitions", {})
        if not isinstance(defs, dict):
            raise ScenarioError("definitions must be an object")
        self.raw_definitions = defs
        self.values: dict[str, Value] = {}
        for name, body in defs.items():
            self.values[name] = self._define(name, body)
        checks = doc.get("checks", [])
        if not isinstance(checks, list):
            raise ScenarioError("checks must be a list")
        self.checks = [self._check_entry(i, c) for i, c in enumerate(checks)]

    # lookups

    def get(self, name, kinds: tuple[str, ...], where: str) -> Any:
        if not isinstance(name, str):
            raise ScenarioError(f"{where}: expected a definition name, got {name!r}")
        if name not in self.values:
            raise ScenarioError(f"{where}: undefined name {name!r}")
        v = self.values[name]
        if v.kind not in kinds:
            raise ScenarioError(f"{where}: {name!r} has kind {v.kind}, expected {' or '.join(kinds)}")
        return v.obj

    def _matrix_arg(self, body: dict, key: str, where: str, kinds=("endo", "metric", "bivector", "matrix")) -> Matrix:
        v = body.get(key)
        if isinstance(v, str):
            return self.get(v, kinds, f"{where}.{key}")
        if v is None:
            raise ScenarioError(f"{where}: missing {key!r}")
        return _matrix(self.chart, v, f"{where}.{key}")

    def _form_arg(self, body: dict, key: str, where: str, degree: int) -> KForm:
        f = self.get(body.get(key), ("form",), f"{where}.{key}")
        if f.degree != degree:
            raise ScenarioError(f"{where}.{key}: expected a {degree}-form")
        return f

    # construction

    def _define(self, name: str, body) -> Value:
        where = f"definitions.{name}"
        if not isinstance(body, dict) or "kind" not in body:
            raise ScenarioError(f"{where}: expected an object with a 'kind'")
        kind = body["kind"]
        builder = _BUILDERS.get(kind)
        if builder is None:
            raise ScenarioError(f"{where}: unknown kind {kind!r}")
        try:
            return Value(kind, builder(self, body, where))
        except ScenarioError:
            raise
        except (ValueError, TypeError, ZeroDivisionError) as e:
            raise ScenarioError(f"{where}: {e}") from None

    def _check_entry(self, i: int, c) -> dict:
        where = f"checks[{i}]"
        if not isinstance(c, dict) or "kind" not in c:
            raise ScenarioError(f"{where}: expected an object with a 'kind'")
        kind = c["kind"]
        if kind not in CHECKS:
            raise ScenarioError(f"{where}: unknown check kind {kind!r}")
        args = c.get("args", {})
        options = c.get("options", {})
        if not isinstance(args, dict) or not isinstance(options, dict):
            raise ScenarioError(f"{where}: args and options must be objects")
        info = CHECKS[kind]
        missing = [a for a in info.required if a not in args]
        if missing:
            raise ScenarioError(f"{where}: missing argument(s) {', '.join(missing)}")
        extra = set(args) - set(info.args)
        if extra:
            raise ScenarioError(f"{where}: unknown argument(s) {', '.join(sorted(extra))}")
        for a, v in args.items():
            self.get(v, info.args[a], f"{where}.args.{a}")
        bad_opts = set(options) - set(info.options) - {"seed"}
        if bad_opts:
            raise ScenarioError(f"{where}: unknown option(s) {', '.join(sorted(bad_opts))}")
        return {"kind": kind, "label": c.get("label", kind), "args": args, "options": options}


def _build_function(sc: Scenario, body, where):
    return _expr(sc.chart, body.get("expr"), f"{where}.expr")


def _build_vector(sc: Scenario, body, where):
    comps = body.get("components")
    if not isinstance(comps, list) or len(comps) != sc.chart.dim:
        raise ScenarioError(f"{where}.components: expected {sc.chart.dim} expressions")
    return tuple(_expr(sc.chart, c, f"{where}.components[{i}]") for i, c in enumerate(comps))


def _build_form(sc: Scenario, body, where):
    degree = body.get("degree")
    if isinstance(degree, bool) or not isinstance(degree, int) or degree < 0:
        raise ScenarioError(f"{where}.degree: expected a nonnegative integer")
    comps = body.get("components", {})
    if not isinstance(comps, dict):
        raise ScenarioError(f"{where}.components: expected an object keyed by coordinate lists")
    for key in comps:
        if len(_index_key(sc.chart, key, where)) != degree:
            raise ScenarioError(f"{where}: key {key!r} does not have {degree} coordinates")
    coeffs = _alternating_coeffs(comps, lambda k: _index_key(sc.chart, k, where), f"{where}.components", sc.chart)
    return KForm(sc.chart, degree, coeffs)


def _build_matrix_kind(sc: Scenario, body, where):
    n = sc.chart.dim
    m = _matrix(sc.chart, body.get("matrix"), f"{where}.matrix")
    kind = body["kind"]
    if kind != "matrix" and m.shape != (n, n):
        raise ScenarioError(f"{where}: expected a {n}x{n} matrix")
    if kind == "metric" and (not m.is_symmetric() or m.det().is_zero()):
        raise ScenarioError(f"{where}: metric must be symmetric and nondegenerate")
    if kind == "bivector" and not m.is_antisymmetric():
        raise ScenarioError(f"{where}: bivector must be antisymmetric")
    return m


def _build_bundle(sc: Scenario, body, where):
    c = body.get("construct")
    chart = sc.chart
    if c == "twisted_tm":
        H = sc._form_arg(body, "H", where, 3) if "H" in body else None
        return make_twisted_TM(chart, H)
    if c == "double":
        return make_double(sc.get(body.get("proto"), ("proto",), f"{where}.proto"))
    if c == "explicit":
        pairing = _matrix(chart, body.get("pairing"), f"{where}.pairing")
        k = pairing.shape[0]
        anchor = _matrix(chart, body["anchor"], f"{where}.anchor") if "anchor" in body else Matrix.zeros(chart, chart.dim, k)
        structure = _structure(sc, body.get("structure", {}), k, f"{where}.structure")
        labels = body.get("labels")
        return CourantData(chart, pairing, anchor, structure, tuple(labels) if labels else None)
    raise ScenarioError(f"{where}: unknown bundle construct {c!r}")


def _structure(sc: Scenario, items, k: int, where: str):
    if not isinstance(items, dict):
        raise ScenarioError(f"{where}: expected an object keyed by 'a,b'")
    z = sc.chart.zero
    st = [[(z,) * k for _ in range(k)] for _ in range(k)]
    for key, comps in items.items():
        idx = _frame_key(key, k, where)
        if len(idx) != 2:
            raise ScenarioError(f"{where}: keys name two frame elements, got {key!r}")
        if not isinstance(comps, list) or len(comps) != k:
            raise ScenarioError(f"{where}[{key!r}]: expected {k} expressions")
        st[idx[0]][idx[1]] = tuple(_expr(sc.chart, e, f"{where}[{key!r}][{i}]") for i, e in enumerate(comps))
    return tuple(tuple(r) for r in st)


def _build_derivation(sc: Scenario, body, where):
    c = body.get("construct")
    chart = sc.chart
    if c == "lift":
        r = sc._matrix_arg(body, "r", where)
        return make_lift(r, body.get("lift", "generalized"))
    if c == "metric":
        g = sc._matrix_arg(body, "g", where, ("metric", "matrix"))
        r = sc._matrix_arg(body, "r", where) if "r" in body else None
        return make_metric_derivation(g, r)
    if c == "explicit":
        base = sc._matrix_arg(body, "base", where)
        fiber = sc._matrix_arg(body, "fiber", where)
        conn = body.get("conn", {})
        if not isinstance(conn, dict):
            raise ScenarioError(f"{where}.conn: expected an object keyed by coordinate")
        k = fiber.shape[0]
        mats = []
        for v in chart.var_names:
            mats.append(_matrix(chart, conn[v], f"{where}.conn.{v}") if v in conn else Matrix.zeros(chart, k))
        extra = set(conn) - set(chart.var_names)
        if extra:
            raise ScenarioError(f"{where}.conn: unknown coordinate(s) {', '.join(sorted(extra))}")
        return OneDerivation(chart, base, fiber, tuple(mats))
    if c == "sum":
        terms = body.get("terms")
        if not isinstance(terms, list) or not terms:
            raise ScenarioError(f"{where}.terms: expected a non-empty list of names")
        ds = [sc.get(t, ("derivation",), f"{where}.terms") for t in terms]
        out = ds[0]
        for d in ds[1:]:
            out = out + d
        return out
    if c == "dual":
        D = sc.get(body.get("of"), ("derivation",), f"{where}.of")
        if "bundle" in body:
            G = sc.get(body["bundle"], ("bundle",), f"{where}.bundle").pairing
        else:
            G = Matrix.identity(chart, D.rank)
        return dualize(D, G)
    if c == "restrict":
        D = sc.get(body.get("of"), ("derivation",), f"{where}.of")
        F = sc.get(body.get("frame"), ("frame",), f"{where}.frame")
        return restrict_to_invariant(D, F)
    if c == "bfield":
        D = sc.get(body.get("of"), ("derivation",), f"{where}.of")
        return bfield_transform(sc._form_arg(body, "B", where, 2), D)
    raise ScenarioError(f"{where}: unknown derivation construct {c!r}")


def _build_frame(sc: Scenario, body, where):
    c = body.get("construct")
    chart = sc.chart
    if c == "columns":
        cols = body.get("columns")
        if not isinstance(cols, list) or not cols:
            raise ScenarioError(f"{where}.columns: expected a list of columns")
        return _matrix(chart, cols, f"{where}.columns").T
    if c == "tm":
        return tangent_frame(chart)
    if c == "cotm":
        return cotangent_frame(chart)
    if c == "graph_bivector":
        return bivector_graph(sc._matrix_arg(body, "pi", where, ("bivector",)))
    if c == "graph_form":
        return form_graph(sc._form_arg(body, "B", where, 2))
    raise ScenarioError(f"{where}: unknown frame construct {c!r}")


def _build_prelie(sc: Scenario, body, where):
    c = body.get("construct")
    chart = sc.chart
    if c == "tangent":
        return tangent_algebroid(chart)
    if c == "zero":
        rank = body.get("rank")
        if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
            raise ScenarioError(f"{where}.rank: expected a positive integer")
        return PreLieAlgebroidData.zero(chart, rank)
    if c == "explicit":
        anchor = _matrix(chart, body.get("anchor"), f"{where}.anchor")
        k = anchor.shape[1]
        structure = _structure(sc, body.get("structure", {}), k, f"{where}.structure")
        labels = body.get("labels")
        return PreLieAlgebroidData(chart, anchor, structure, tuple(labels) if labels else None)
    raise ScenarioError(f"{where}: unknown prelie construct {c!r}")


def _build_proto(sc: Scenario, body, where):
    c = body.get("construct")
    if c == "extract":
        E = sc.get(body.get("bundle"), ("bundle",), f"{where}.bundle")
        A = sc.get(body.get("A"), ("frame",), f"{where}.A")
        B = sc.get(body.get("B"), ("frame",), f"{where}.B")
        return extract_proto(E, A, B)
    if c == "explicit":
        A = sc.get(body.get("A"), ("prelie",), f"{where}.A")
        B = sc.get(body.get("Astar"), ("prelie",), f"{where}.Astar")
        m = A.rank
        chart = sc.chart

        def three(key):
            items = body.get(key, {})
            if not isinstance(items, dict):
                raise ScenarioError(f"{where}.{key}: expected an object keyed by 'a,b,c'")
            for k in items:
                if len(_frame_key(k, m, where)) != 3:
                    raise ScenarioError(f"{where}.{key}: key {k!r} needs three indices")
            return MultiSection(chart, m, 3, _alternating_coeffs(items, lambda k: _frame_key(k, m, where), f"{where}.{key}", chart))

        return ProtoBialgebroidData(A, B, three("phi"), three("chi"))
    raise ScenarioError(f"{where}: unknown proto construct {c!r}")


_BUILDERS: dict[str, Callable] = {
    "function": _build_function,
    "vector": _build_vector,
    "form": _build_form,
    "endo": _build_matrix_kind,
    "metric": _build_matrix_kind,
    "bivector": _build_matrix_kind,
    "matrix": _build_matrix_kind,
    "bundle": _build_bundle,
    "derivation": _build_derivation,
    "frame": _build_frame,
    "prelie": _build_prelie,
    "proto": _build_proto,
}


# -- checks -----------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckKind:
    args: dict  # name -> accepted definition kinds
    required: tuple
    options: tuple
    run: Callable
    summary: str


def _labels_for(sc: Scenario, a: dict, D: OneDerivation):
    if "bundle" in a:
        return sc.values[a["bundle"]].obj.labels
    n = sc.chart.dim
    if D.rank == 2 * n:
        return tm_labels(sc.chart)
    if D.rank == n:
        return tuple(f"d/d{v}" for v in sc.chart.var_names)
    return None


def _run_nijenhuis(sc, a, o, seed):
    D = sc.values[a["derivation"]].obj
    return check_nijenhuis(D, o.get("mode", "nijenhuis"), seed=seed, labels=_labels_for(sc, a, D))


def _run_lagrangian(sc, a, o, seed):
    rep, pair = lagrangian_invariance(sc.values[a["bundle"]].obj, sc.values[a["derivation"]].obj, sc.values[a["frame"]].obj)
    rep.info["S_L"] = pair.S.to_strings()
    return rep


def _run_induced(sc, a, o, seed):
    pi, rep = induced_bivector_identity(sc.values[a["proto"]].obj)
    rep.info["pi"] = pi.to_strings()
    return rep


def _obj(sc, a, key):
    return sc.values[a[key]].obj


CHECKS: dict[str, CheckKind] = {
    "courant_axioms": CheckKind(
        {"bundle": ("bundle",)}, ("bundle",), ("samples",),
        lambda sc, a, o, s: check_courant_axioms(_obj(sc, a, "bundle"), seed=s, samples=o.get("samples", 2)),
        "Courant algebroid axioms C1-C5",
    ),
    "nijenhuis": CheckKind(
        {"derivation": ("derivation",), "bundle": ("bundle",)}, ("derivation",), ("mode",),
        _run_nijenhuis,
        "Nijenhuis / almost_complex / dolbeault equations of a 1-derivation",
    ),
    "courant_compatibility": CheckKind(
        {"bundle": ("bundle",), "derivation": ("derivation",)}, ("bundle", "derivation"), ("short_circuit",),
        lambda sc, a, o, s: check_CN(_obj(sc, a, "bundle"), _obj(sc, a, "derivation"), seed=s, short_circuit=o.get("short_circuit", True)),
        "self-duality and CN1-CN4",
    ),
    "h_r_compatibility": CheckKind(
        {"H": ("form",), "r": ("endo", "matrix")}, ("H", "r"), (),
        lambda sc, a, o, s: check_H_r_compatible(_obj(sc, a, "H"), _obj(sc, a, "r")),
        "total skewness and closedness of H(r., ., .)",
    ),
    "lagrangian_invariance": CheckKind(
        {"bundle": ("bundle",), "derivation": ("derivation",), "frame": ("frame",)}, ("bundle", "derivation", "frame"), (),
        _run_lagrangian,
        "S_L = 0 and C_L = 0, cross-checked with direct invariance",
    ),
    "dirac": CheckKind(
        {"bundle": ("bundle",), "frame": ("frame",)}, ("bundle", "frame"), (),
        lambda sc, a, o, s: check_dirac(_obj(sc, a, "bundle"), _obj(sc, a, "frame")),
        "involutivity of a lagrangian frame",
    ),
    "gauge_equivalence": CheckKind(
        {"B": ("form",), "derivation": ("derivation",), "target": ("derivation",)}, ("B", "derivation", "target"), (),
        lambda sc, a, o, s: gauge_equivalent(_obj(sc, a, "B"), _obj(sc, a, "derivation"), _obj(sc, a, "target")),
        "tau_B D tau_B^-1 equals a target derivation",
    ),
    "im": CheckKind(
        {"algebroid": ("prelie",), "derivation": ("derivation",)}, ("algebroid", "derivation"), (),
        lambda sc, a, o, s: check_IM(_obj(sc, a, "algebroid"), _obj(sc, a, "derivation"), seed=s),
        "IM1-IM4 against a pre-Lie algebroid",
    ),
    "dual_im": CheckKind(
        {"algebroid": ("prelie",), "derivation": ("derivation",)}, ("algebroid", "derivation"), ("degrees",),
        lambda sc, a, o, s: check_dual_IM(_obj(sc, a, "algebroid"), _obj(sc, a, "derivation"), tuple(o.get("degrees", (0, 1, 2))), seed=s),
        "dual formulation of the IM equations in degrees m <= 2",
    ),
    "lie_algebroid": CheckKind(
        {"algebroid": ("prelie",)}, ("algebroid",), (),
        lambda sc, a, o, s: check_lie(_obj(sc, a, "algebroid"), seed=s),
        "anchor morphism and Jacobi identity of a pre-Lie algebroid",
    ),
    "poisson_nijenhuis": CheckKind(
        {"pi": ("bivector",), "r": ("endo", "matrix")}, ("pi", "r"), ("full",),
        lambda sc, a, o, s: bivector_graph_PN(_obj(sc, a, "pi"), _obj(sc, a, "r"), o.get("full", False)),
        "Magri-Morosi compatibility of (pi, r) via graph invariance",
    ),
    "induced_bivector": CheckKind(
        {"proto": ("proto",)}, ("proto",), (),
        _run_induced,
        "(1/2)[pi,pi] = rho(chi) + rho_*(phi) for the bivector of a splitting",
    ),
    "manin": CheckKind(
        {"bundle": ("bundle",), "A": ("frame",), "B": ("frame",), "derivation": ("derivation",)},
        ("bundle", "A", "B", "derivation"), ("bivector",),
        lambda sc, a, o, s: check_manin(
            _obj(sc, a, "bundle"), _obj(sc, a, "A"), _obj(sc, a, "B"), _obj(sc, a, "derivation"), o.get("bivector", False), seed=s
        ),
        "CN verdict equals the split (IM + phi/chi) verdict",
    ),
}


# -- running ----------------------------------------------------------------------------


@dataclass
class CheckResult:
    kind: str
    label: str
    report: CheckReport
    elapsed: float

    def to_dict(self, timings: bool = False) -> dict:
        d = {"kind": self.kind, "label": self.label}
        d.update(self.report.to_dict())
        if timings:
            d["elapsed_s"] = round(self.elapsed, 3)
        return d


@dataclass
class RunReport:
    scenario: str
    seed: int
    results: list[CheckResult] = field(default_factory=list)
    expected: Optional[str] = None

    @property
    def status(self) -> str:
        return "fail" if any(not r.report.passed for r in self.results) else "pass"

    def to_dict(self, timings: bool = False) -> dict:
        d = {"schema": SCHEMA_VERSION, "scenario": self.scenario, "seed": self.seed, "status": self.status}
        if self.expected is not None:
            d["expected"] = self.expected
        d["checks"] = [r.to_dict(timings) for r in self.results]
        return d

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2, ensure_ascii=False) + "\n"


class CheckInputError(ScenarioError):
    """A check rejected its inputs (precondition failure)."""


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read {path}: {e.strerror or e}") from None
    return parse_scenario(text, str(p))


def _unique_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ScenarioError(f"duplicate key {k!r}")
        out[k] = v
    return out


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    try:
        doc = json.loads(text, object_pairs_hook=_unique_keys)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{source}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}") from None
    return Scenario(doc, source)


def run_scenario(sc: Scenario, seed: Optional[int] = None) -> RunReport:
    seed = sc.seed if seed is None else seed
    run = RunReport(sc.name, seed, expected=sc.expected)
    for i, c in enumerate(sc.checks):
        kind = CHECKS[c["kind"]]
        s = c["options"].get("seed", seed)
        t0 = time.perf_counter()
        try:
            rep = kind.run(sc, c["args"], c["options"], s)
        except (ValueError, ZeroDivisionError) as e:
            raise CheckInputError(f"checks[{i}] ({c['kind']}): {e}") from None
        run.results.append(CheckResult(c["kind"], c["label"], rep, time.perf_counter() - t0))
    return run


def shipped_scenarios() -> list[Path]:
    return sorted((Path(__file__).parent / "scenarios").glob("*.json"))
