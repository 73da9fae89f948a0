from __future__ import annotations

from itertools import combinations

from hypothesis import given, strategies as st

from courant.cartan import (
    KForm,
    Multivector,
    apply_vector,
    exterior_d,
    interior_product,
    levi_civita,
    lie_bracket,
    lie_derivative,
    nijenhuis_torsion,
    schouten_square,
    wedge,
)
from courant.field import Chart
from courant.linalg import Matrix, vadd
from courant.sampling import Sampler

C2 = Chart(["x", "y"])
C3 = Chart(["x", "y", "z"])
seeds = st.integers(0, 10**6)


def random_form(s: Sampler, degree: int) -> KForm:
    n = s.chart.dim
    return KForm(s.chart, degree, {I: s.poly() for I in combinations(range(n), degree)})


def random_bivector(s: Sampler) -> Matrix:
    n = s.chart.dim
    rows = [[s.chart.zero] * n for _ in range(n)]
    for i, j in combinations(range(n), 2):
        p = s.poly()
        rows[i][j], rows[j][i] = p, -p
    return Matrix(s.chart, rows)


def test_exterior_d_oracle():
    # independent sympy oracle: d(xy dx + z^2 dy + x dz)
    a = KForm.one_form([C3.parse(t) for t in ("x*y", "z^2", "x")])
    assert exterior_d(a) == KForm(C3, 2, {(0, 1): C3.parse("-x"), (0, 2): C3.one, (1, 2): C3.parse("-2*z")})


def test_form_printing():
    assert str(KForm(C3, 2, {(1, 2): C3.parse("x")})) == "x*dy/\\dz"


def test_nijenhuis_torsion_oracle():
    # independent sympy oracle
    dx, dy = (C2.one, C2.zero), (C2.zero, C2.one)
    r = Matrix.parse(C2, [["y", 0], [0, 0]])
    assert nijenhuis_torsion(r, dx, dy) == (C2.parse("y"), C2.zero)
    r = Matrix.parse(C2, [["x*y", "y^2"], ["1+x", "x"]])
    assert nijenhuis_torsion(r, dx, dy) == (
        C2.parse("x^2*y - x^2 - y^3 - y^2 + 2*y*(x + 1)"),
        C2.parse("x^2 + x*y - y^2"),
    )


def test_levi_civita_oracle():
    # independent sympy oracle
    G = levi_civita(Matrix.parse(C2, [["1 + x^2", 0], [0, 1]]))
    assert G[0, 0, 0] == C2.parse("x/(x^2 + 1)")
    assert all(G[k, i, j].is_zero() for k in range(2) for i in range(2) for j in range(2) if (k, i, j) != (0, 0, 0))
    G = levi_civita(Matrix.parse(C2, [[1, "x"], ["x", 2]]))
    assert G[0, 0, 0] == C2.parse("x/(x^2 - 2)")
    assert G[1, 0, 0] == C2.parse("-1/(x^2 - 2)")


def test_schouten_square_oracle():
    # independent sympy oracle: twice the Jacobiator of the coordinate functions
    P = Matrix.parse(C3, [[0, "z", "x*y"], ["-z", 0, "y^2+1"], ["-x*y", "-y^2-1", 0]])
    assert schouten_square(P) == Multivector(C3, 3, {(0, 1, 2): C3.parse("6*y*z")})


@given(seeds, st.integers(0, 2))
def test_d_squared_is_zero(seed, degree):
    w = random_form(Sampler(C3, seed), degree)
    assert exterior_d(exterior_d(w)).is_zero()


@given(seeds, st.integers(1, 2))
def test_cartan_magic_formula(seed, degree):
    s = Sampler(C3, seed)
    X, w = s.vector_field(), random_form(s, degree)
    assert lie_derivative(X, w) == exterior_d(interior_product(X, w)) + interior_product(X, exterior_d(w))


@given(seeds)
def test_d_is_a_graded_derivation(seed):
    s = Sampler(C3, seed)
    a, b = random_form(s, 1), random_form(s, 1)
    assert exterior_d(wedge(a, b)) == wedge(exterior_d(a), b) - wedge(a, exterior_d(b))


@given(seeds)
def test_lie_bracket_jacobi(seed):
    s = Sampler(C2, seed)
    X, Y, Z = s.vector_field(), s.vector_field(), s.vector_field()
    j = vadd(vadd(lie_bracket(X, lie_bracket(Y, Z)), lie_bracket(Y, lie_bracket(Z, X))), lie_bracket(Z, lie_bracket(X, Y)))
    assert all(c.is_zero() for c in j)


@given(seeds)
def test_schouten_square_is_twice_the_jacobiator(seed):
    s = Sampler(C3, seed)
    pi = random_bivector(s)
    f, g, h = s.poly(), s.poly(), s.poly()

    def grad(u):
        return tuple(u.diff(i) for i in range(3))

    def pb(u, v):
        return sum((a * b for a, b in zip(grad(u), pi.apply(grad(v)))), C3.zero)

    jac = pb(f, pb(g, h)) + pb(g, pb(h, f)) + pb(h, pb(f, g))
    sq = schouten_square(pi)
    assert sq.evaluate([grad(f), grad(g), grad(h)]) == jac * 2


@given(seeds)
def test_first_bianchi_identity(seed):
    s = Sampler(C2, seed, degree=1)
    a, b = s.poly(), s.poly()
    g = Matrix(C2, [[a * a + 1, C2.zero], [C2.zero, b * b + 1]])
    R = levi_civita(g).riemann()
    for l in range(2):
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    assert (R[l][k][i][j] + R[l][i][j][k] + R[l][j][k][i]).is_zero()


@given(seeds)
def test_levi_civita_is_torsion_free_and_metric(seed):
    s = Sampler(C2, seed, degree=1)
    a = s.poly()
    g = Matrix(C2, [[a * a + 1, C2.parse("x")], [C2.parse("x"), C2.const(5)]])
    G = levi_civita(g)
    assert G.is_symmetric()
    X, Y, Z = s.vector_field(), s.vector_field(), s.vector_field()

    def inner(u, v):
        return sum((u[i] * g[i, j] * v[j] for i in range(2) for j in range(2)), C2.zero)

    lhs = apply_vector(X, inner(Y, Z))
    rhs = inner(G.covariant_derivative(X, Y), Z) + inner(Y, G.covariant_derivative(X, Z))
    assert lhs == rhs
