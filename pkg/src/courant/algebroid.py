"""Pre-Lie algebroids on a trivialized bundle and their Koszul differential."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from .cartan import Alternating, _format_terms, apply_vector, format_vector, lie_bracket
from .deriv import MultiSection
from .field import Chart, RatFunc
from .linalg import Matrix, Vector, vadd, vsub
from .report import CheckReport, run_entry
from .sampling import Sampler


@dataclass(frozen=True, eq=False)
class PreLieAlgebroidData:
    """Anchor and skew bracket on a rank-m trivial bundle.

    ``anchor`` is n x m (column a is rho(e_a)); ``structure[a][b]`` holds the
    components of [e_a, e_b].  On arbitrary sections the bracket obeys
    [a, f b] = f [a, b] + (L_{rho(a)} f) b.
    """

    chart: Chart
    anchor: Matrix
    structure: tuple
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        n, m = self.anchor.shape
        if n != self.chart.dim:
            raise ValueError("anchor must have one row per coordinate")
        st = tuple(tuple(tuple(v) for v in row) for row in self.structure)
        if len(st) != m or any(len(row) != m for row in st) or any(len(v) != m for row in st for v in row):
            raise ValueError(f"structure must be an {m} x {m} array of length-{m} vectors")
        for a in range(m):
            for b in range(a, m):
                if any(not (x + y).is_zero() for x, y in zip(st[a][b], st[b][a])):
                    raise ValueError(f"bracket is not skew on frames ({a + 1}, {b + 1})")
        object.__setattr__(self, "structure", st)
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(f"e{a + 1}" for a in range(m)))

    @property
    def rank(self) -> int:
        return self.anchor.shape[1]

    @classmethod
    def zero(cls, chart: Chart, m: int) -> "PreLieAlgebroidData":
        z = (chart.zero,) * m
        return cls(chart, Matrix.zeros(chart, chart.dim, m), tuple(tuple(z for _ in range(m)) for _ in range(m)))

    def rho(self, s: Sequence[RatFunc]) -> Vector:
        return self.anchor.apply(s)

    def frame(self, a: int) -> Vector:
        c = self.chart
        return tuple(c.one if b == a else c.zero for b in range(self.rank))

    def frames(self) -> list[Vector]:
        return [self.frame(a) for a in range(self.rank)]

    def bracket(self, s1: Sequence[RatFunc], s2: Sequence[RatFunc]) -> Vector:
        m = self.rank
        out = [self.chart.zero] * m
        for a in range(m):
            if s1[a].is_zero():
                continue
            for b in range(m):
                if s2[b].is_zero():
                    continue
                f = s1[a] * s2[b]
                v = self.structure[a][b]
                for d in range(m):
                    if v[d].num:
                        out[d] = out[d] + f * v[d]
        r1, r2 = self.rho(s1), self.rho(s2)
        for d in range(m):
            out[d] = out[d] + apply_vector(r1, s2[d]) - apply_vector(r2, s1[d])
        return tuple(out)

    def format_section(self, s: Sequence[RatFunc]) -> str:
        return _format_terms(zip(s, self.labels))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PreLieAlgebroidData)
            and self.chart == other.chart
            and self.anchor == other.anchor
            and self.structure == other.structure
        )

    __hash__ = None


def tangent_algebroid(chart: Chart) -> PreLieAlgebroidData:
    """TM with the identity anchor and coordinate frame (all frame brackets vanish)."""
    n = chart.dim
    z = (chart.zero,) * n
    labels = tuple(f"d/d{v}" for v in chart.var_names)
    return PreLieAlgebroidData(chart, Matrix.identity(chart, n), tuple(tuple(z for _ in range(n)) for _ in range(n)), labels)


def koszul_eval(A: PreLieAlgebroidData, mu: Alternating, sections: Sequence[Sequence[RatFunc]]) -> RatFunc:
    """(d_A mu)(s_0, ..., s_p) on arbitrary sections by the Koszul formula."""
    p = mu.degree
    if len(sections) != p + 1:
        raise ValueError(f"expected {p + 1} sections")
    out = A.chart.zero
    for i, s in enumerate(sections):
        rest = [t for j, t in enumerate(sections) if j != i]
        term = apply_vector(A.rho(s), mu.evaluate(rest))
        out = out + term if i % 2 == 0 else out - term
    for i in range(p + 1):
        for j in range(i + 1, p + 1):
            rest = [t for k, t in enumerate(sections) if k not in (i, j)]
            term = mu.evaluate([A.bracket(sections[i], sections[j])] + rest)
            out = out + term if (i + j) % 2 == 0 else out - term
    return out


def prelie_differential(A: PreLieAlgebroidData, mu: Alternating) -> MultiSection:
    """d_A mu as an alternating (p+1)-form on A."""
    m = A.rank
    if mu.size != m:
        raise ValueError("form does not live on this bundle")
    frames = A.frames()
    p = mu.degree + 1
    coeffs = {I: koszul_eval(A, mu, [frames[i] for i in I]) for I in combinations(range(m), p)}
    return MultiSection(A.chart, m, p, coeffs)


def jacobiator(A: PreLieAlgebroidData, a, b, c) -> Vector:
    return vadd(
        vadd(A.bracket(a, A.bracket(b, c)), A.bracket(b, A.bracket(c, a))),
        A.bracket(c, A.bracket(a, b)),
    )


def check_lie(A: PreLieAlgebroidData, seed: int = 0, samples: int = 1) -> CheckReport:
    """Is the pre-Lie algebroid a Lie algebroid: anchor morphism and Jacobi."""
    report = CheckReport("lie algebroid", seed=seed)
    chart = A.chart
    frames = A.frames()
    m = A.rank
    sampler = Sampler(chart, seed)
    rand = [sampler.vector(m) for _ in range(samples)]
    fmt = A.format_section

    def anchor_cases():
        for a in range(m):
            for b in range(a + 1, m):
                yield (A.labels[a], A.labels[b]), vsub(
                    A.rho(A.bracket(frames[a], frames[b])), lie_bracket(A.rho(frames[a]), A.rho(frames[b]))
                )

    def jacobi_cases():
        for a, b, c in combinations(range(m), 3):
            yield (A.labels[a], A.labels[b], A.labels[c]), jacobiator(A, frames[a], frames[b], frames[c])
        if m >= 1:
            for s in rand:
                for a in range(m):
                    for b in range(m):
                        yield ("random", A.labels[a], A.labels[b]), jacobiator(A, s, frames[a], frames[b])

    report.add(run_entry("anchor preserves brackets", anchor_cases(), format_vector))
    report.add(run_entry("Jacobi", jacobi_cases(), fmt))
    return report


@dataclass(frozen=True, eq=False)
class ProtoBialgebroidData:
    """Pre-Lie algebroids A and A* in duality with 3-forms phi on A and chi on A*."""

    A: PreLieAlgebroidData
    Astar: PreLieAlgebroidData
    phi: Alternating
    chi: Alternating

    def __post_init__(self):
        m = self.A.rank
        if self.Astar.rank != m:
            raise ValueError("A and A* must have the same rank")
        for name, t in (("phi", self.phi), ("chi", self.chi)):
            if t.size != m or t.degree != 3:
                raise ValueError(f"{name} must be a 3-form on a rank-{m} bundle")

    @property
    def chart(self) -> Chart:
        return self.A.chart

    @property
    def rank(self) -> int:
        return self.A.rank

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ProtoBialgebroidData)
            and self.A == other.A
            and self.Astar == other.Astar
            and self.phi == other.phi
            and self.chi == other.chi
        )

    __hash__ = None

