from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from courant.bundle import make_twisted_TM, tm_labels
from courant.cartan import apply_vector, coordinate_field
from courant.compat import cotangent_frame, tangent_frame
from courant.deriv import (
    MultiSection,
    NonInvariantError,
    OneDerivation,
    apply_D,
    check_nijenhuis,
    check_self_dual,
    dual_eval,
    dualize,
    invariance_report,
    make_lift,
    make_metric_derivation,
    restrict_to_invariant,
)
from courant.field import Chart
from courant.linalg import Matrix, vadd, vsub
from courant.sampling import Sampler

C2 = Chart(["x", "y"])
seeds = st.integers(0, 10**6)
R_ROT = Matrix.parse(C2, [[0, -1], [1, 0]])
G_STD = make_twisted_TM(C2).pairing


def random_derivation(seed: int, k: int = 2) -> OneDerivation:
    s = Sampler(C2, seed, degree=1)
    return OneDerivation(C2, s.matrix(2, 2), s.matrix(k, k), tuple(s.matrix(k, k) for _ in range(2)))


def test_metric_derivation_values():
    # g_flat(nabla_{d/dx} d/dx) = (1+x^2) * x/(1+x^2) dx from the Christoffel oracle
    D = make_metric_derivation(Matrix.parse(C2, [["1 + x^2", 0], [0, 1]]))
    dx = coordinate_field(C2, 0)
    assert apply_D(D, dx, (C2.one, C2.zero, C2.zero, C2.zero)) == (C2.zero, C2.zero, C2.parse("x"), C2.zero)
    assert D.base.is_zero()
    assert D.fiber == Matrix.parse(C2, [[0, 0, 0, 0], [0, 0, 0, 0], ["1 + x^2", 0, 0, 0], [0, 1, 0, 0]])


def test_tangent_lift_is_lie_derivative_of_r():
    # D_X Y = [Y, rX] - r[Y, X]
    r = Matrix.parse(C2, [["y", 0], [0, 0]])
    D = make_lift(r, "tangent")
    X, Y = (C2.parse("x"), C2.one), (C2.zero, C2.parse("x*y"))
    from courant.compat import D_r

    assert apply_D(D, X, Y) == D_r(r, X, Y)


@given(seeds)
def test_leibniz_rule(seed):
    D = random_derivation(seed)
    s = Sampler(C2, seed + 1)
    X, sec, f = s.vector_field(), s.vector(2), s.poly()
    lhs = apply_D(D, X, tuple(f * c for c in sec))
    rhs = vsub(
        vadd(tuple(f * c for c in apply_D(D, X, sec)), tuple(apply_vector(X, f) * c for c in D.fiber.apply(sec))),
        tuple(apply_vector(D.base.apply(X), f) * c for c in sec),
    )
    assert lhs == rhs


@given(seeds)
def test_dualize_is_an_involution(seed):
    D = random_derivation(seed, 4)
    assert dualize(dualize(D, G_STD), G_STD) == D


@given(seeds)
def test_generalized_lift_is_self_dual(seed):
    r = Sampler(C2, seed).matrix(2, 2)
    assert check_self_dual(make_lift(r, "generalized"), G_STD).passed


def test_metric_derivations_are_self_dual():
    for g in ("1", "1 + x^2"):
        gm = Matrix.parse(C2, [[g, 0], [0, 1]])
        assert check_self_dual(make_metric_derivation(gm), G_STD).passed
        assert check_self_dual(make_metric_derivation(gm, R_ROT), G_STD).passed


def test_non_self_dual_witness():
    D = make_lift(R_ROT, "tangent")
    D = OneDerivation(C2, D.base, Matrix.block(C2, [[D.fiber, Matrix.zeros(C2, 2)], [Matrix.zeros(C2, 2), D.fiber]]),
                      tuple(Matrix.zeros(C2, 4) for _ in range(2)))
    e = check_self_dual(D, G_STD)
    assert not e.passed and e.witness.where == ("fiber of D* - D",)


@given(seeds)
def test_sum_of_derivations_acts_additively(seed):
    D1, D2 = random_derivation(seed), random_derivation(seed + 7)
    s = Sampler(C2, seed)
    X, sec = s.vector_field(), s.vector(2)
    assert apply_D(D1 + D2, X, sec) == vadd(apply_D(D1, X, sec), apply_D(D2, X, sec))


@pytest.mark.parametrize(
    "r, nijenhuis",
    [("1,0;0,1", True), ("0,-1;1,0", True), ("y,0;0,0", False), ("x,0;0,y", True), ("x*y,y^2;1+x,x", False)],
)
def test_nijenhuis_verdict_matches_torsion(r, nijenhuis):
    m = Matrix.parse(C2, [row.split(",") for row in r.split(";")])
    rep = check_nijenhuis(make_lift(m, "generalized"), labels=tm_labels(C2))
    assert rep.passed == nijenhuis
    assert rep.entry("N_r = 0").passed == nijenhuis


def test_nonnijenhuis_witness():
    rep = check_nijenhuis(make_lift(Matrix.parse(C2, [["y", 0], [0, 0]]), "generalized"), labels=tm_labels(C2))
    e = rep.entry("N_r = 0")
    assert e.witness.expr == "y*d/dx"
    assert e.witness.where == ("d/dx", "d/dy")


def test_dolbeault_modes():
    D = make_metric_derivation(Matrix.identity(C2, 2), R_ROT)
    assert check_nijenhuis(D, "dolbeault").passed
    bad = check_nijenhuis(make_metric_derivation(Matrix.parse(C2, [[1, 0], [0, 2]]), R_ROT), "almost_complex")
    assert not bad.passed and bad.entry("l^2 = -id").witness is not None
    with pytest.raises(ValueError):
        check_nijenhuis(D, "complex")


def test_restriction_to_tangent_bundle():
    D = make_lift(R_ROT, "generalized")
    assert restrict_to_invariant(D, tangent_frame(C2)) == make_lift(R_ROT, "tangent")
    assert restrict_to_invariant(D, cotangent_frame(C2)) == make_lift(R_ROT, "cotangent")


def test_non_invariant_subbundle_reports_both_conditions():
    D = make_metric_derivation(Matrix.parse(C2, [["1 + x^2", 0], [0, 1]]))
    F = Matrix.parse(C2, [[1], [0], [0], [0]])
    rep, restricted = invariance_report(D, F, tm_labels(C2))
    assert restricted is None
    assert rep.entry("l(F) in F").witness.expr == "(x^2 + 1)*dx"
    assert rep.entry("D_X F in F").witness.expr == "x*dx"
    with pytest.raises(NonInvariantError) as info:
        restrict_to_invariant(D, F, tm_labels(C2))
    assert info.value.witness.expr == "(x^2 + 1)*dx"


@given(seeds)
def test_dual_eval_degree_one_matches_dualize(seed):
    # on 1-forms, D*_X(mu)(s) is the pairing of the dual derivation with mu
    D = random_derivation(seed)
    s = Sampler(C2, seed + 3)
    X, sec, mu_c = s.vector_field(), s.vector(2), s.vector(2)
    mu = MultiSection(C2, 2, 1, {(a,): mu_c[a] for a in range(2)})
    Ds = dualize(D, Matrix.identity(C2, 2))
    expected = sum((a * b for a, b in zip(apply_D(Ds, X, mu_c), sec)), C2.zero)
    assert dual_eval(D, X, mu, [sec]) == expected


def test_dual_eval_degree_zero():
    D = make_lift(R_ROT, "tangent")
    f = MultiSection(C2, 2, 0, {(): C2.parse("x^2")})
    # -(r d/dx)(x^2) = -(d/dy)(x^2) = 0 and -(r d/dy)(x^2) = d/dx(x^2) = 2x
    assert dual_eval(D, coordinate_field(C2, 0), f, []).is_zero()
    assert dual_eval(D, coordinate_field(C2, 1), f, []) == C2.parse("2*x")


