"""Trivialized anchored pseudo-euclidean bundles and their Courant brackets.

A :class:`CourantData` stores the bracket on a global frame ``e_1..e_k``.  On
arbitrary sections the bracket is extended by the Leibniz rule in the second
slot and by the rule forced on the first slot by the symmetric-part axiom::

    [[s1, f s2]] = f [[s1, s2]] + (rho(s1) f) s2
    [[f s1, s2]] = f [[s1, s2]] - (rho(s2) f) s1 + <s1, s2> rho^*(df)
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterator, Optional, Sequence

from .cartan import (
    KForm,
    _format_terms,
    apply_vector,
    differential,
    exterior_d,
    format_vector,
    lie_bracket,
)
from .field import Chart, RatFunc
from .linalg import Matrix, Vector, dot, vadd, vscale, vsub
from .report import CheckReport, run_entry
from .sampling import Sampler

Section = Vector

__all__ = [
    "Section",
    "CourantData",
    "NonClosedFormError",
    "make_twisted_TM",
    "make_double",
    "courant_bracket",
    "check_courant_axioms",
]


class NonClosedFormError(ValueError):
    """A form that was required to be closed is not."""


@dataclass(frozen=True, eq=False)
class CourantData:
    chart: Chart
    pairing: Matrix
    anchor: Matrix
    structure: tuple[tuple[Vector, ...], ...]
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        k = self.pairing.shape[0]
        if self.pairing.shape != (k, k) or not self.pairing.is_symmetric():
            raise ValueError("pairing must be a symmetric square matrix")
        if self.anchor.shape != (self.chart.dim, k):
            raise ValueError(f"anchor must be {self.chart.dim}x{k}")
        if len(self.structure) != k or any(len(row) != k or any(len(v) != k for v in row) for row in self.structure):
            raise ValueError("structure functions must form a k x k x k array")
        if self.pairing.det().is_zero():
            raise ValueError("pairing is degenerate")
        if self.labels is not None and len(self.labels) != k:
            raise ValueError("one label per frame element required")

    @property
    def rank(self) -> int:
        return self.pairing.shape[0]

    @cached_property
    def pairing_inverse(self) -> Matrix:
        return self.pairing.inverse()

    @cached_property
    def _dual_anchor_matrix(self) -> Matrix:
        return self.pairing_inverse @ self.anchor.T

    @cached_property
    def _nonzero_structure(self) -> list[tuple[int, int, Vector]]:
        out = []
        for a in range(self.rank):
            for b in range(self.rank):
                v = self.structure[a][b]
                if any(c.num for c in v):
                    out.append((a, b, v))
        return out

    @cached_property
    def pairing_is_constant(self) -> bool:
        return all(e.is_constant() for r in self.pairing.rows for e in r)

    def frame(self, a: int) -> Section:
        return tuple(self.chart.one if b == a else self.chart.zero for b in range(self.rank))

    def frames(self) -> list[Section]:
        return [self.frame(a) for a in range(self.rank)]

    def zero_section(self) -> Section:
        return (self.chart.zero,) * self.rank

    def pair(self, s1: Sequence[RatFunc], s2: Sequence[RatFunc]) -> RatFunc:
        return dot(s1, self.pairing.apply(s2))

    def rho(self, s: Sequence[RatFunc]) -> Vector:
        return self.anchor.apply(s)

    def rho_dual(self, alpha: Sequence[RatFunc]) -> Section:
        """rho^*(alpha) = G^{-1} (anchor)^T alpha."""
        return self._dual_anchor_matrix.apply(alpha)

    def label_list(self) -> list[str]:
        return list(self.labels) if self.labels else [f"e{a + 1}" for a in range(self.rank)]

    def format_section(self, s: Sequence[RatFunc]) -> str:
        return _format_terms(zip(s, self.label_list()))

    def same_structure(self, other: "CourantData") -> bool:
        return (
            self.chart == other.chart
            and self.pairing == other.pairing
            and self.anchor == other.anchor
            and self.structure == other.structure
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, CourantData) and self.same_structure(other)

    __hash__ = None


def tm_labels(chart: Chart) -> tuple[str, ...]:
    return tuple(f"d/d{n}" for n in chart.var_names) + tuple(f"d{n}" for n in chart.var_names)


def standard_pairing(chart: Chart, m: int) -> Matrix:
    """The split pairing [[0, I], [I, 0]] on a rank-2m frame."""
    z = Matrix.zeros(chart, m)
    i = Matrix.identity(chart, m)
    return Matrix.block(chart, [[z, i], [i, z]])


def make_twisted_TM(chart: Chart, H: Optional[KForm] = None) -> CourantData:
    """TM + T*M with the H-twisted bracket on the frame (d_i, dx^i)."""
    n = chart.dim
    if H is None:
        H = KForm(chart, 3, {})
    if H.degree != 3:
        raise ValueError("the twist must be a 3-form")
    if not exterior_d(H).is_zero():
        raise NonClosedFormError("the twisting 3-form is not closed")
    z = chart.zero
    structure = [[[z] * (2 * n) for _ in range(2 * n)] for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                structure[i][j][n + k] = H[(i, j, k)]
    anchor = Matrix.block(chart, [[Matrix.identity(chart, n), Matrix.zeros(chart, n)]])
    return CourantData(
        chart,
        standard_pairing(chart, n),
        anchor,
        tuple(tuple(tuple(v) for v in row) for row in structure),
        tm_labels(chart),
    )


def make_double(proto) -> CourantData:
    """The double A + A* of a proto-bialgebroid.

    On frames ``e_a`` of A and the dual frame ``eps^a`` of A*::

        [[e_a, e_b]]     = ([e_a, e_b], phi(e_a, e_b, .))
        [[eps^a, eps^b]] = (chi(eps^a, eps^b, .), [eps^a, eps^b]_*)
        [[e_a, eps^b]]   = (-i_{eps^b} d_{A*} e_a, L_{e_a} eps^b)
        [[eps^a, e_b]]   = (L_{eps^a} e_b, -i_{e_b} d_A eps^a)
    """
    A, B = proto.A, proto.Astar
    chart = A.chart
    m = A.rank
    if B.rank != m:
        raise ValueError("A and A* must have the same rank")
    z = chart.zero
    c = A.structure  # c[a][b][d]: coefficient of e_d in [e_a, e_b]
    cs = B.structure
    structure = [[[z] * (2 * m) for _ in range(2 * m)] for _ in range(2 * m)]
    for a in range(m):
        for b in range(m):
            for d in range(m):
                structure[a][b][d] = c[a][b][d]
                structure[a][b][m + d] = proto.phi[(a, b, d)]
                structure[m + a][m + b][d] = proto.chi[(a, b, d)]
                structure[m + a][m + b][m + d] = cs[a][b][d]
                structure[a][m + b][d] = cs[b][d][a]
                structure[a][m + b][m + d] = -c[a][d][b]
                structure[m + a][b][d] = -cs[a][d][b]
                structure[m + a][b][m + d] = c[b][d][a]
    anchor = Matrix.block(chart, [[A.anchor, B.anchor]])
    labels = tuple(f"a{i + 1}" for i in range(m)) + tuple(f"b{i + 1}" for i in range(m))
    return CourantData(
        chart,
        standard_pairing(chart, m),
        anchor,
        tuple(tuple(tuple(v) for v in row) for row in structure),
        labels,
    )


def courant_bracket(E: CourantData, s1: Sequence[RatFunc], s2: Sequence[RatFunc]) -> Section:
    k = E.rank
    if len(s1) != k or len(s2) != k:
        raise ValueError("section does not belong to this bundle")
    out = list(E.zero_section())
    for a, b, v in E._nonzero_structure:
        if s1[a].num and s2[b].num:
            f = s1[a] * s2[b]
            for d in range(k):
                if v[d].num:
                    out[d] = out[d] + f * v[d]
    rho1 = E.rho(s1)
    rho2 = E.rho(s2)
    for b in range(k):
        if not s2[b].is_constant():
            out[b] = out[b] + apply_vector(rho1, s2[b])
        if not s1[b].is_constant():
            out[b] = out[b] - apply_vector(rho2, s1[b])
    # rho^* of sum_a <e_a, s2> d(s1^a)
    Gs2 = E.pairing.apply(s2)
    n = E.chart.dim
    theta = [E.chart.zero] * n
    nonconst = False
    for a in range(k):
        if s1[a].is_constant() or not Gs2[a].num:
            continue
        nonconst = True
        da = differential(s1[a])
        for i in range(n):
            if da[i].num:
                theta[i] = theta[i] + da[i] * Gs2[a]
    if nonconst:
        out = list(vadd(out, E.rho_dual(theta)))
    return tuple(out)


def section_derivative(X: Sequence[RatFunc], s: Sequence[RatFunc]) -> Section:
    """Componentwise derivative of a section along a vector field."""
    return tuple(apply_vector(X, c) for c in s)


def dual_anchor_composite(E: CourantData) -> Matrix:
    """The matrix of rho o rho^* : T*M -> TM (zero for Courant algebroids)."""
    return E.anchor @ E._dual_anchor_matrix


# -- axioms ---------------------------------------------------------------------


def check_courant_axioms(E: CourantData, seed: int = 0, samples: int = 2) -> CheckReport:
    """Evaluate axioms C1-C5 on all frame tuples and seeded random sections."""
    k = E.rank
    sampler = Sampler(E.chart, seed)
    rand = [(sampler.vector(k), sampler.vector(k), sampler.vector(k), sampler.nonzero_poly()) for _ in range(samples)]
    frames = E.frames()
    lab = E.label_list()
    br = lambda s, t: courant_bracket(E, s, t)  # noqa: E731
    fmt = E.format_section

    def triples() -> Iterator[tuple[tuple[str, ...], tuple[Section, Section, Section]]]:
        for a, b, c in product(range(k), repeat=3):
            yield (lab[a], lab[b], lab[c]), (frames[a], frames[b], frames[c])
        for i, (s1, s2, s3, _) in enumerate(rand):
            yield (f"random sample {i}",), (s1, s2, s3)

    def pairs() -> Iterator[tuple[tuple[str, ...], tuple[Section, Section]]]:
        for a, b in product(range(k), repeat=2):
            yield (lab[a], lab[b]), (frames[a], frames[b])
        for i, (s1, s2, _, _) in enumerate(rand):
            yield (f"random sample {i}",), (s1, s2)

    def c1():
        for where, (s1, s2, s3) in triples():
            lhs = br(s1, br(s2, s3))
            rhs = vadd(br(br(s1, s2), s3), br(s2, br(s1, s3)))
            yield where, vsub(lhs, rhs)

    def c2():
        for where, (s1, s2) in pairs():
            yield where, vsub(E.rho(br(s1, s2)), lie_bracket(E.rho(s1), E.rho(s2)))

    def c3():
        fs = [E.chart.var(i) for i in range(E.chart.dim)] + [f for *_, f in rand]
        for where, (s1, s2) in pairs():
            r1 = E.rho(s1)
            base = br(s1, s2)
            for f in fs:
                lhs = br(s1, vscale(f, s2))
                rhs = vadd(vscale(f, base), vscale(apply_vector(r1, f), s2))
                yield where + (f"f={f}",), vsub(lhs, rhs)

    def c4():
        for where, (s1, s2) in pairs():
            sym = vadd(br(s1, s2), br(s2, s1))
            yield where, vsub(sym, E.rho_dual(differential(E.pair(s1, s2))))

    def c5():
        for where, (s1, s2, s3) in triples():
            lhs = apply_vector(E.rho(s1), E.pair(s2, s3))
            rhs = E.pair(br(s1, s2), s3) + E.pair(s2, br(s1, s3))
            yield where, lhs - rhs

    report = CheckReport("courant_axioms", seed=seed)
    report.add(run_entry("C1", c1(), fmt, "Jacobi identity in Leibniz form"))
    report.add(run_entry("C2", c2(), format_vector, "anchor preserves brackets"))
    report.add(run_entry("C3", c3(), fmt, "Leibniz rule in the second slot"))
    report.add(run_entry("C4", c4(), fmt, "symmetric part is rho^* d<.,.>"))
    report.add(run_entry("C5", c5(), str, "pairing invariance"))
    return report
