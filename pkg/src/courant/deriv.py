"""1-derivations (D, l, r) on trivialized bundles.

A 1-derivation is stored by its values on the frame: ``conn[i]`` is the
matrix whose column ``a`` holds the components of ``D_{d_i}(e_a)``.  On
arbitrary sections the Leibniz rule

    D_X(f s) = f D_X(s) + (L_X f) l(s) - (L_{r(X)} f) s

assembles the rest; ``D_X`` is function-linear in ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Optional, Sequence

from .cartan import (
    Alternating,
    Christoffel,
    _format_terms,
    _sort_sign,
    apply_vector,
    coordinate_field,
    deformed_bracket,
    format_vector,
    levi_civita,
    lie_bracket,
    nijenhuis_torsion,
)
from .field import Chart, RatFunc, partial
from .linalg import Matrix, Vector, solve, vadd, vsub, vzero
from .report import FAIL, PASS, CheckReport, Entry, Witness, bool_entry, run_entry
from .sampling import Sampler

__all__ = [
    "OneDerivation",
    "MultiSection",
    "NonInvariantError",
    "apply_D",
    "dualize",
    "make_lift",
    "make_metric_derivation",
    "check_nijenhuis",
    "check_self_dual",
    "extended_dual_apply",
    "dual_eval",
    "restrict_to_invariant",
    "invariance_report",
]


@dataclass(frozen=True)
class OneDerivation:
    chart: Chart
    base: Matrix
    fiber: Matrix
    conn: tuple[Matrix, ...]

    def __post_init__(self):
        n = self.chart.dim
        k = self.fiber.shape[0]
        if self.base.shape != (n, n):
            raise ValueError(f"base endomorphism must be {n}x{n}")
        if self.fiber.shape != (k, k):
            raise ValueError("fiber endomorphism must be square")
        if len(self.conn) != n or any(m.shape != (k, k) for m in self.conn):
            raise ValueError(f"conn must hold {n} matrices of shape {k}x{k}")
        object.__setattr__(self, "conn", tuple(self.conn))

    @property
    def rank(self) -> int:
        return self.fiber.shape[0]

    def __add__(self, other: "OneDerivation") -> "OneDerivation":
        if other.chart != self.chart or other.rank != self.rank:
            raise ValueError("shape mismatch")
        return OneDerivation(
            self.chart,
            self.base + other.base,
            self.fiber + other.fiber,
            tuple(a + b for a, b in zip(self.conn, other.conn)),
        )

    def to_strings(self) -> dict:
        return {
            "base": self.base.to_strings(),
            "fiber": self.fiber.to_strings(),
            "conn": [m.to_strings() for m in self.conn],
        }

    @classmethod
    def connection(cls, chart: Chart, conn: Sequence[Matrix]) -> "OneDerivation":
        """The 1-derivation (nabla, id, 0) of a linear connection."""
        k = conn[0].shape[0]
        return cls(chart, Matrix.zeros(chart, chart.dim), Matrix.identity(chart, k), tuple(conn))


class MultiSection(Alternating):
    """An element of Gamma(wedge^m E^*), stored on increasing frame indices."""

    __slots__ = ()

    def _new(self, coeffs) -> "MultiSection":
        return MultiSection(self.chart, self.size, self.degree, coeffs)


class NonInvariantError(ValueError):
    def __init__(self, message: str, witness: Optional[Witness] = None):
        self.witness = witness
        super().__init__(message if witness is None else f"{message}: {witness.expr} at {', '.join(witness.where)}")


# -- evaluation ----------------------------------------------------------------


def _derivative(X: Sequence[RatFunc], s: Sequence[RatFunc]) -> Vector:
    return tuple(apply_vector(X, c) for c in s)


def apply_D(D: OneDerivation, X: Sequence[RatFunc], s: Sequence[RatFunc]) -> Vector:
    n = D.chart.dim
    k = D.rank
    if len(X) != n or len(s) != k:
        raise ValueError("shape mismatch in apply_D")
    out = list(vzero(D.chart, k))
    for i in range(n):
        if X[i].num:
            v = D.conn[i].apply(s)
            out = [o + X[i] * c if c.num else o for o, c in zip(out, v)]
    if any(not c.is_constant() for c in s):
        Xs = _derivative(X, s)
        rXs = _derivative(D.base.apply(X), s)
        out = list(vsub(vadd(out, D.fiber.apply(Xs)), rXs))
    return tuple(out)


def _d_matrix(M: Matrix, i: int) -> Matrix:
    return M.map(lambda e: partial(e, i))


def dualize(D: OneDerivation, pairing: Matrix) -> OneDerivation:
    """The dual 1-derivation, transported back to E along E -> E*, s -> <s, .>.

    In the dual frame the dual has connection matrices ``(d_i l)^T - conn_i^T``
    and fiber ``l^T``.  Transport by the pairing matrix G includes the
    derivative terms of G, which vanish for constant pairings.
    """
    k = D.rank
    if pairing.shape != (k, k):
        raise ValueError("pairing has the wrong shape")
    G = pairing
    Ginv = G.inverse()
    l_t = D.fiber.T
    const_G = all(e.is_constant() for r in G.rows for e in r)
    n = D.chart.dim
    conn = []
    for i in range(n):
        star = _d_matrix(D.fiber, i).T - D.conn[i].T
        M = star @ G
        if not const_G:
            corr = l_t @ _d_matrix(G, i)
            for j in range(n):
                if D.base[j, i].num:
                    corr = corr - _d_matrix(G, j).scale(D.base[j, i])
            M = M + corr
        conn.append(Ginv @ M)
    return OneDerivation(D.chart, D.base, Ginv @ l_t @ G, tuple(conn))


def check_self_dual(D: OneDerivation, pairing: Matrix) -> Entry:
    dual = dualize(D, pairing)
    if dual == D:
        return Entry("self-duality", PASS, None, "D* = D under the pairing")
    for name, a, b in [("fiber", dual.fiber, D.fiber), ("base", dual.base, D.base)] + [
        (f"conn[{D.chart.var_names[i]}]", dual.conn[i], D.conn[i]) for i in range(D.chart.dim)
    ]:
        if a != b:
            return Entry("self-duality", FAIL, Witness(str(a - b), (f"{name} of D* - D",)), "D* = D under the pairing")
    raise AssertionError("unreachable")


# -- constructors -------------------------------------------------------------


def make_lift(r: Matrix, kind: str = "tangent") -> OneDerivation:
    """Lifts of a (1,1)-tensor: ``tangent``, ``cotangent`` or ``generalized``."""
    chart = r.chart
    n = chart.dim
    if r.shape != (n, n):
        raise ValueError("r must be a dim x dim matrix")
    if kind == "tangent":
        # D_{d_i} d_a = d_a(r d_i) = sum_b d_a r[b, i] d_b
        conn = [Matrix(chart, [[partial(r[b, i], a) for a in range(n)] for b in range(n)]) for i in range(n)]
        return OneDerivation(chart, Matrix(chart, r.rows), Matrix(chart, r.rows), tuple(conn))
    if kind == "cotangent":
        # D_{d_i} dx^a = L_{d_i}(r^* dx^a) - L_{r d_i} dx^a
        conn = [
            Matrix(chart, [[partial(r[a, b], i) - partial(r[a, i], b) for a in range(n)] for b in range(n)])
            for i in range(n)
        ]
        return OneDerivation(chart, Matrix(chart, r.rows), r.T, tuple(conn))
    if kind == "generalized":
        t = make_lift(r, "tangent")
        c = make_lift(r, "cotangent")
        return direct_sum(t, c)
    raise ValueError(f"unknown lift kind {kind!r}")


def direct_sum(D1: OneDerivation, D2: OneDerivation) -> OneDerivation:
    if D1.base != D2.base:
        raise ValueError("direct sums need a common base endomorphism")
    chart = D1.chart
    k1, k2 = D1.rank, D2.rank
    z12, z21 = Matrix.zeros(chart, k1, k2), Matrix.zeros(chart, k2, k1)
    fiber = Matrix.block(chart, [[D1.fiber, z12], [z21, D2.fiber]])
    conn = tuple(Matrix.block(chart, [[a, z12], [z21, b]]) for a, b in zip(D1.conn, D2.conn))
    return OneDerivation(chart, D1.base, fiber, conn)


def make_metric_derivation(g: Matrix, r: Optional[Matrix] = None) -> OneDerivation:
    """D^g on TM + T*M, or D^{r,g} = D^r + D^g when ``r`` is given.

    ``D^g_X(Y, beta) = (0, g_flat(nabla_X Y))`` with the Levi-Civita connection,
    fiber ``l = [[0, 0], [g_flat, 0]]`` and base 0.
    """
    chart = g.chart
    n = chart.dim
    gamma: Christoffel = levi_civita(g)
    z = Matrix.zeros(chart, n)
    conn = []
    for i in range(n):
        # column a: g_flat(nabla_{d_i} d_a) = sum_c g[b, c] Gamma^c_{ia}
        P = Matrix(
            chart,
            [[_sum_products([(g[b, c], gamma[c, i, a]) for c in range(n)], chart) for a in range(n)] for b in range(n)],
        )
        conn.append(Matrix.block(chart, [[z, z], [P, z]]))
    fiber = Matrix.block(chart, [[z, z], [Matrix(chart, g.rows), z]])
    Dg = OneDerivation(chart, z, fiber, tuple(conn))
    if r is None:
        return Dg
    return make_lift(r, "generalized") + Dg


def _sum_products(pairs, chart: Chart) -> RatFunc:
    t = chart.zero
    for a, b in pairs:
        if a.num and b.num:
            t = t + a * b
    return t


# -- Nijenhuis / almost complex -------------------------------------------------


def _section_fmt(labels: Optional[Sequence[str]], k: int):
    labels = list(labels) if labels else [f"e{a + 1}" for a in range(k)]
    return lambda s: _format_terms(zip(s, labels))


def check_nijenhuis(
    D: OneDerivation,
    mode: str = "nijenhuis",
    seed: int = 0,
    samples: int = 2,
    labels: Optional[Sequence[str]] = None,
) -> CheckReport:
    """Decide the Nijenhuis and/or almost-complex equations of ``D``."""
    if mode not in ("nijenhuis", "almost_complex", "dolbeault"):
        raise ValueError(f"unknown mode {mode!r}")
    chart = D.chart
    n, k = chart.dim, D.rank
    sampler = Sampler(chart, seed)
    rand = [(sampler.vector_field(), sampler.vector_field(), sampler.vector(k)) for _ in range(samples)]
    coords = [coordinate_field(chart, i) for i in range(n)]
    frame = [tuple(chart.one if b == a else chart.zero for b in range(k)) for a in range(k)]
    lab = list(labels) if labels else [f"e{a + 1}" for a in range(k)]
    vname = [f"d/d{v}" for v in chart.var_names]
    fmt = _section_fmt(labels, k)
    r, l = D.base, D.fiber
    report = CheckReport(f"nijenhuis[{mode}]", seed=seed)

    def vec_pairs():
        for i, j in combinations(range(n), 2):
            yield (vname[i], vname[j]), coords[i], coords[j]
        for s, (X, Y, _) in enumerate(rand):
            yield (f"random sample {s}",), X, Y

    def vec_sec():
        for i, a in product(range(n), range(k)):
            yield (vname[i], lab[a]), coords[i], frame[a]
        for s, (X, _, sec) in enumerate(rand):
            yield (f"random sample {s}",), X, sec

    def vec_vec_sec():
        for i, j in combinations(range(n), 2):
            for a in range(k):
                yield (vname[i], vname[j], lab[a]), coords[i], coords[j], frame[a]
        for s, (X, Y, sec) in enumerate(rand):
            yield (f"random sample {s}",), X, Y, sec

    if mode in ("nijenhuis", "dolbeault"):
        report.add(
            run_entry(
                "N_r = 0",
                ((w, nijenhuis_torsion(r, X, Y)) for w, X, Y in vec_pairs()),
                format_vector,
                "Nijenhuis torsion of the base endomorphism",
            )
        )
        report.add(
            run_entry(
                "[D_X, l] = 0",
                ((w, vsub(apply_D(D, X, l.apply(s)), l.apply(apply_D(D, X, s)))) for w, X, s in vec_sec()),
                fmt,
            )
        )

        def third():
            for w, X, Y, s in vec_vec_sec():
                XY = lie_bracket(X, Y)
                lhs = l.apply(apply_D(D, XY, s))
                comm = vsub(apply_D(D, X, apply_D(D, Y, s)), apply_D(D, Y, apply_D(D, X, s)))
                yield w, vsub(vsub(lhs, comm), apply_D(D, deformed_bracket(r, X, Y), s))

        report.add(run_entry("l D_[X,Y] - [D_X, D_Y] - D_[X,Y]_r = 0", third(), fmt))
    if mode in ("almost_complex", "dolbeault"):
        I_n = Matrix.identity(chart, n)
        I_k = Matrix.identity(chart, k)
        report.add(run_entry("r^2 = -id", [((), r @ r + I_n)], str))
        report.add(run_entry("l^2 = -id", [((), l @ l + I_k)], str))
        report.add(
            run_entry(
                "D_rX + l D_X = 0",
                ((w, vadd(apply_D(D, r.apply(X), s), l.apply(apply_D(D, X, s)))) for w, X, s in vec_sec()),
                fmt,
            )
        )
    return report


# -- exterior powers ----------------------------------------------------------------


def _frame(chart: Chart, k: int, a: int) -> Vector:
    return tuple(chart.one if b == a else chart.zero for b in range(k))


def dual_eval(D: OneDerivation, X: Sequence[RatFunc], mu: Alternating, sections: Sequence[Sequence[RatFunc]]) -> RatFunc:
    """D*_X(mu)(s_1, ..., s_m) on arbitrary sections.

    D*_X(mu)(s_1..s_m) = L_X mu(l s_1, s_2, ..) - L_{rX} mu(s_1, .., s_m)
                         - sum_k (-1)^{k-1} mu(D_X s_k, s_1, .., ^s_k, .., s_m)
    and D*_X(f) = -L_{rX} f in degree zero.
    """
    m = mu.degree
    if len(sections) != m:
        raise ValueError(f"expected {m} sections")
    rX = D.base.apply(X)
    if m == 0:
        return -apply_vector(rX, mu.evaluate([]))
    first = list(sections)
    first[0] = D.fiber.apply(sections[0])
    out = apply_vector(X, mu.evaluate(first)) - apply_vector(rX, mu.evaluate(list(sections)))
    for kk in range(m):
        rest = [sections[j] for j in range(m) if j != kk]
        term = mu.evaluate([apply_D(D, X, sections[kk])] + rest)
        out = out - term if kk % 2 == 0 else out + term
    return out


def gamma_l_witness(l: Matrix, mu: Alternating) -> Optional[Witness]:
    """First frame tuple violating mu(l s1, s2, ..) = mu(s1, l s2, ..), if any."""
    m = mu.degree
    if m < 2:
        return None
    chart = mu.chart
    k = mu.size
    frames = [_frame(chart, k, a) for a in range(k)]
    for idx in product(range(k), repeat=m):
        args1 = [l.col(idx[0])] + [frames[i] for i in idx[1:]]
        args2 = [frames[idx[0]], l.col(idx[1])] + [frames[i] for i in idx[2:]]
        val = mu.evaluate(args1) - mu.evaluate(args2)
        if not val.is_zero():
            return Witness(str(val), tuple(f"e{i + 1}" for i in idx))
    return None


@dataclass(frozen=True)
class DualApplyResult:
    in_gamma_l: bool
    gamma_l_witness: Optional[Witness]
    mu_l: dict  # full index tuple -> RatFunc, possibly non-alternating
    mu_l_alternating: bool
    value: MultiSection  # D*_X(mu) from its values on increasing frame tuples
    tensorial: bool


def multisection_from(chart: Chart, k: int, m: int, fn) -> MultiSection:
    coeffs = {}
    for I in combinations(range(k), m):
        coeffs[I] = fn(I)
    return MultiSection(chart, k, m, coeffs)


def mu_l_tensor(l: Matrix, mu: Alternating) -> dict:
    m = mu.degree
    k = mu.size
    chart = mu.chart
    frames = [_frame(chart, k, a) for a in range(k)]
    out = {}
    if m == 0:
        return out
    for idx in product(range(k), repeat=m):
        out[idx] = mu.evaluate([l.col(idx[0])] + [frames[i] for i in idx[1:]])
    return out


def _is_alternating(t: dict, m: int) -> bool:
    for idx, v in t.items():
        for p in permutations(range(m)):
            s, _ = _sort_sign(p)
            pidx = tuple(idx[i] for i in p)
            w = t[pidx]
            if len(set(idx)) < m:
                if not v.is_zero():
                    return False
            elif not (v - (w if s > 0 else -w)).is_zero():
                return False
    return True


def mu_l(l: Matrix, mu: Alternating) -> MultiSection:
    """mu_l(s, s_1, ..) = mu(l s, s_1, ..) as a multisection (requires mu in Gamma_l)."""
    m = mu.degree
    k = mu.size
    frames = [_frame(mu.chart, k, a) for a in range(k)]
    if m == 0:
        return MultiSection(mu.chart, k, 0, {})
    return multisection_from(mu.chart, k, m, lambda I: mu.evaluate([l.col(I[0])] + [frames[i] for i in I[1:]]))


def extended_dual_apply(D: OneDerivation, X: Sequence[RatFunc], mu: Alternating) -> DualApplyResult:
    k = D.rank
    m = mu.degree
    chart = D.chart
    wit = gamma_l_witness(D.fiber, mu)
    in_gl = wit is None
    t = mu_l_tensor(D.fiber, mu)
    alt = _is_alternating(t, m) if m else True
    frames = [_frame(chart, k, a) for a in range(k)]
    value = multisection_from(chart, k, m, lambda I: dual_eval(D, X, mu, [frames[i] for i in I]))
    return DualApplyResult(in_gl, wit, t, alt, value, in_gl)


# -- invariant subbundles -----------------------------------------------------------


def invariance_report(D: OneDerivation, F: Matrix, labels: Optional[Sequence[str]] = None):
    """Decide l(F) in F and D_X Gamma(F) in Gamma(F); return (report, restriction or None)."""
    chart = D.chart
    k, p = F.shape
    if k != D.rank:
        raise ValueError("frame rows must match the bundle rank")
    if F.rank() != p:
        raise ValueError("frame is rank deficient over Q(x)")
    fmt = _section_fmt(labels, k)
    report = CheckReport("invariance")
    cols = F.columns()
    l_cols = []
    bad = None
    for j, c in enumerate(cols):
        img = D.fiber.apply(c)
        sol = solve(F, img)
        if sol is None:
            bad = Witness(fmt(img), (f"l(f{j + 1})",))
            break
        l_cols.append(sol)
    report.add(bool_entry("l(F) in F", bad is None, bad))
    conn = []
    bad = None
    for i in range(chart.dim):
        X = coordinate_field(chart, i)
        mcols = []
        for j, c in enumerate(cols):
            img = apply_D(D, X, c)
            sol = solve(F, img)
            if sol is None:
                bad = Witness(fmt(img), (f"d/d{chart.var_names[i]}", f"f{j + 1}"))
                break
            mcols.append(sol)
        if bad is not None:
            break
        conn.append(Matrix.from_columns(chart, mcols))
    report.add(bool_entry("D_X F in F", bad is None, bad))
    if not report.passed:
        return report, None
    restricted = OneDerivation(chart, D.base, Matrix.from_columns(chart, l_cols), tuple(conn))
    return report, restricted


def restrict_to_invariant(D: OneDerivation, F: Matrix, labels: Optional[Sequence[str]] = None) -> OneDerivation:
    report, restricted = invariance_report(D, F, labels)
    if restricted is None:
        e = report.failures()[0]
        raise NonInvariantError(f"subbundle is not invariant ({e.id})", e.witness)
    return restricted
