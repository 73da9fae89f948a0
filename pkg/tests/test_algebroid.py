from __future__ import annotations

from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from courant.algebroid import PreLieAlgebroidData, ProtoBialgebroidData, check_lie, koszul_eval, prelie_differential, tangent_algebroid
from courant.bundle import make_twisted_TM
from courant.cartan import KForm, exterior_d
from courant.compat import bivector_graph, tangent_frame
from courant.deriv import MultiSection
from courant.field import Chart
from courant.linalg import Matrix
from courant.sampling import Sampler
from courant.split import extract_proto

C2 = Chart(["x", "y"])
C3 = Chart(["x", "y", "z"])
seeds = st.integers(0, 10**6)


def random_multisection(s: Sampler, m: int, p: int) -> MultiSection:
    return MultiSection(s.chart, m, p, {I: s.poly() for I in combinations(range(m), p)})


def cotangent_algebroid(pi: Matrix) -> PreLieAlgebroidData:
    chart = pi.chart
    return extract_proto(make_twisted_TM(chart), tangent_frame(chart), bivector_graph(pi)).Astar


def test_skewness_is_validated():
    z, o = C2.zero, C2.one
    with pytest.raises(ValueError):
        PreLieAlgebroidData(C2, Matrix.zeros(C2, 2), (((z, z), (o, z)), ((o, z), (z, z))))


def test_tangent_algebroid_is_lie():
    assert check_lie(tangent_algebroid(C3)).passed


@given(seeds, st.integers(0, 2))
def test_tangent_koszul_differential_is_exterior_d(seed, p):
    s = Sampler(C3, seed)
    w = KForm(C3, p, {I: s.poly() for I in combinations(range(3), p)})
    mu = MultiSection(C3, 3, p, w.coeffs)
    assert prelie_differential(tangent_algebroid(C3), mu).coeffs == exterior_d(w).coeffs


@given(seeds)
def test_koszul_formula_is_tensorial(seed):
    s = Sampler(C2, seed)
    A = cotangent_algebroid(Matrix.parse(C2, [[0, "x"], ["-x", 0]]))
    mu = random_multisection(s, 2, 1)
    a, b, f = s.vector(2), s.vector(2), s.poly()
    fa = tuple(f * c for c in a)
    assert koszul_eval(A, mu, [fa, b]) == f * koszul_eval(A, mu, [a, b])


@given(seeds, st.integers(0, 1))
def test_d_squared_vanishes_on_a_lie_algebroid(seed, p):
    s = Sampler(C3, seed)
    A = cotangent_algebroid(Matrix.parse(C3, [[0, "z", 0], ["-z", 0, 0], [0, 0, 0]]))
    assert check_lie(A).passed
    mu = random_multisection(s, 3, p)
    assert prelie_differential(A, prelie_differential(A, mu)).is_zero()


def test_d_squared_detects_non_lie_bracket():
    # the Jacobiator of this bivector is 3yz, so its cotangent bracket is not Lie
    A = cotangent_algebroid(Matrix.parse(C3, [[0, "z", "x*y"], ["-z", 0, "y^2+1"], ["-x*y", "-y^2-1", 0]]))
    assert not check_lie(A).passed
    f = MultiSection(C3, 3, 0, {(): C3.parse("y")})
    assert not prelie_differential(A, prelie_differential(A, f)).is_zero()


def test_bracket_leibniz_rule():
    A = cotangent_algebroid(Matrix.parse(C2, [[0, "x"], ["-x", 0]]))
    a, b, f = (C2.one, C2.zero), (C2.zero, C2.one), C2.parse("x*y")
    fb = tuple(f * c for c in b)
    lhs = A.bracket(a, fb)
    rho_a_f = sum((r * f.diff(i) for i, r in enumerate(A.rho(a))), C2.zero)
    assert lhs == tuple(f * c + rho_a_f * d for c, d in zip(A.bracket(a, b), b))


def test_proto_validates_ranks():
    A = tangent_algebroid(C2)
    with pytest.raises(ValueError):
        ProtoBialgebroidData(A, PreLieAlgebroidData.zero(C2, 3), MultiSection(C2, 2, 3), MultiSection(C2, 2, 3))
