"""One test per acceptance criterion; each prints a PASS/FAIL line in the terminal summary."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest
import sympy as sp

from courant.algebroid import PreLieAlgebroidData, tangent_algebroid
from courant.bundle import CourantData, check_courant_axioms, make_twisted_TM, tm_labels
from courant.cartan import KForm
from courant.compat import (
    bfield_transform,
    bivector_graph,
    check_CN,
    check_dual_IM,
    check_H_r_compatible,
    check_IM,
    cotangent_frame,
    form_graph,
    kahler_form,
    lagrangian_invariance,
    tangent_frame,
)
from courant.deriv import OneDerivation, check_nijenhuis, invariance_report, make_lift, make_metric_derivation
from courant.field import Chart
from courant.linalg import Matrix
from courant.sampling import Sampler
from courant.scenario import load_scenario, run_scenario, shipped_scenarios
from courant.split import check_manin, extract_proto, induced_bivector_identity

C1 = Chart(["x"])
C2 = Chart(["x", "y"])
C3 = Chart(["x", "y", "z"])
E2 = make_twisted_TM(C2)
ID2 = Matrix.identity(C2, 2)
R_ROT = Matrix.parse(C2, [[0, -1], [1, 0]])
R_Y = Matrix.parse(C2, [["y", 0], [0, 0]])
VOLUME = KForm(C3, 3, {(0, 1, 2): 1})
LIMIT = 60.0


@contextmanager
def budget(seconds: float = LIMIT):
    t0 = time.perf_counter()
    yield
    elapsed = time.perf_counter() - t0
    assert elapsed < seconds, f"took {elapsed:.1f} s"


def sympy_torsion_vanishes(r: Matrix) -> bool:
    """N_r == 0 computed with plain sympy expressions, independent of the library."""
    xs = sp.symbols(r.chart.var_names)
    n = len(xs)
    R = sp.Matrix(n, n, lambda i, j: sp.sympify(str(r[i, j]).replace("^", "**"), dict(zip(r.chart.var_names, xs))))

    def lie(X, Y):
        return sp.Matrix([sum(X[j] * sp.diff(Y[i], xs[j]) - Y[j] * sp.diff(X[i], xs[j]) for j in range(n)) for i in range(n)])

    for a in range(n):
        for b in range(a + 1, n):
            X, Y = sp.eye(n)[:, a], sp.eye(n)[:, b]
            N = lie(R * X, R * Y) - R * (lie(R * X, Y) + lie(X, R * Y) - R * lie(X, Y))
            if any(sp.simplify(c) != 0 for c in N):
                return False
    return True


def sl2_bundle() -> CourantData:
    z, o = C1.zero, C1.one
    st = [[(z, z, z)] * 3 for _ in range(3)]
    st[0][1], st[1][0] = (z, z, o), (z, z, -o)
    st[2][0], st[0][2] = (o * 2, z, z), (-o * 2, z, z)
    st[2][1], st[1][2] = (z, -o * 2, z), (z, o * 2, z)
    return CourantData(C1, Matrix.parse(C1, [[0, 1, 0], [1, 0, 0], [0, 0, 2]]), Matrix.zeros(C1, 1, 3), tuple(tuple(r) for r in st))


@pytest.mark.criterion("1: Courant axioms for twisted TM on R^3 (c = 0, 1) and the sl2 bundle")
def test_criterion_01_courant_axioms():
    with budget():
        for c in (0, 1):
            H = KForm(C3, 3, {(0, 1, 2): c})
            rep = check_courant_axioms(make_twisted_TM(C3, H))
            assert rep.passed, rep.to_dict()
        assert check_courant_axioms(sl2_bundle()).passed


@pytest.mark.criterion("2: CN passes for lifts on standard TR^2; Nijenhuis verdict equals N_r == 0")
def test_criterion_02_lifts_and_nijenhuis():
    with budget():
        rs = [ID2, R_ROT, R_Y] + [Sampler(C2, seed).matrix(2, 2) for seed in range(5)]
        verdicts = []
        for r in rs:
            D = make_lift(r, "generalized")
            assert check_CN(E2, D).passed
            nij = check_nijenhuis(D, labels=tm_labels(C2)).passed
            assert nij == sympy_torsion_vanishes(r)
            verdicts.append(nij)
        assert verdicts[:3] == [True, True, False]
        assert not all(verdicts[3:]), "random fixtures should include non-Nijenhuis operators"


@pytest.mark.criterion("3: twisted CN verdict equals H_r compatibility on R^3")
def test_criterion_03_twisted_compatibility():
    with budget():
        E = make_twisted_TM(C3, VOLUME)
        cases = {
            "id": (Matrix.identity(C3, 3), True),
            "3 id": (Matrix.identity(C3, 3).scale(C3.const(3)), True),
            "diag(1,1,0)": (Matrix.parse(C3, [[1, 0, 0], [0, 1, 0], [0, 0, 0]]), False),
        }
        for name, (r, expected) in cases.items():
            cn = check_CN(E, make_lift(r, "generalized")).passed
            hr = check_H_r_compatible(VOLUME, r).passed
            assert cn == hr == expected, name


@pytest.mark.criterion("4: metric 1-derivations are Courant")
def test_criterion_04_metric_derivations():
    with budget():
        for g in (ID2, Matrix.parse(C2, [["1 + x^2", 0], [0, 1]])):
            assert check_CN(E2, make_metric_derivation(g)).passed
        E_H = make_twisted_TM(C2, KForm(C2, 3))
        assert check_CN(E_H, make_metric_derivation(ID2, R_ROT)).passed


@pytest.mark.criterion("5: pseudo-Kahler Dolbeault passes; non-Hermitian metric fails with a witness")
def test_criterion_05_pseudo_kahler():
    with budget():
        assert check_nijenhuis(make_metric_derivation(ID2, R_ROT), "dolbeault").passed
        bad = check_nijenhuis(make_metric_derivation(Matrix.parse(C2, [[1, 0], [0, 2]]), R_ROT), "dolbeault")
        assert not bad.passed
        failing = [e for e in bad.failures() if e.id in ("l^2 = -id", "D_rX + l D_X = 0")]
        assert failing and all(e.witness is not None for e in failing)


@pytest.mark.criterion("6: gauge conjugation by half the Kahler form; verdicts are gauge invariant")
def test_criterion_06_gauge():
    with budget():
        B = kahler_form(ID2, R_ROT).scale(C2.const(Fraction(1, 2)))
        assert bfield_transform(B, make_metric_derivation(ID2, R_ROT)) == make_lift(R_ROT, "generalized")
        for seed in range(3):
            s = Sampler(C2, seed)
            B = KForm(C2, 2, {(0, 1): s.nonzero_poly()})
            for D in (make_metric_derivation(ID2, R_ROT), make_lift(R_Y, "generalized"), make_lift(s.matrix(2, 2), "generalized")):
                T = bfield_transform(B, D)
                assert check_CN(E2, T).passed == check_CN(E2, D).passed
                assert check_nijenhuis(T).passed == check_nijenhuis(D).passed


@pytest.mark.criterion("7: (S_L, C_L) verdict equals direct invariance; constant 2-form graphs fail S_L = 0")
def test_criterion_07_lagrangian():
    with budget():
        fixtures = [
            bivector_graph(Matrix.zeros(C2, 2)),
            bivector_graph(Matrix.parse(C2, [[0, 2], [-2, 0]])),
            form_graph(KForm(C2, 2, {(0, 1): 3})),
            tangent_frame(C2),
            cotangent_frame(C2),
            Matrix.parse(C2, [[1, 0], [0, 0], [0, 0], [0, 1]]),
        ]
        derivations = [make_metric_derivation(ID2), make_lift(R_ROT, "generalized"), make_lift(R_Y, "generalized")]
        for D in derivations:
            for L in fixtures:
                rep, _ = lagrangian_invariance(E2, D, L)
                concomitant = rep.entry("S_L = 0").passed and rep.entry("C_L = 0").passed
                direct, _ = invariance_report(D, L)
                assert concomitant == direct.passed
        Dg = make_metric_derivation(ID2)
        for c in (1, -1, 2, Fraction(1, 3)):
            rep, _ = lagrangian_invariance(E2, Dg, form_graph(KForm(C2, 2, {(0, 1): C2.const(c)})))
            assert not rep.entry("S_L = 0").passed


@pytest.mark.criterion("8: dual IM agrees with IM for m = 0, 1, 2")
def test_criterion_08_dual_im():
    with budget():
        TM = tangent_algebroid(C2)
        for r in (ID2, R_ROT, R_Y):
            D = make_lift(r, "tangent")
            im, du = check_IM(TM, D), check_dual_IM(TM, D, degrees=(0, 1, 2))
            assert im.passed and du.passed and du.entry("agrees with IM").passed
        A = PreLieAlgebroidData.zero(C2, 2)
        D = OneDerivation(C2, Matrix.zeros(C2, 2), Matrix.parse(C2, [[1, 0], [0, 2]]), (Matrix.zeros(C2, 2),) * 2)
        du = check_dual_IM(A, D, degrees=(0, 1, 2))
        assert du.entry("agrees with IM").passed
        assert du.passed == check_IM(A, D).passed


@pytest.mark.criterion("9: check_manin LEFT = RIGHT, including the Nijenhuis clause")
def test_criterion_09_manin():
    with budget():
        for r in (ID2, R_ROT, R_Y):
            rep = check_manin(E2, tangent_frame(C2), cotangent_frame(C2), make_lift(r, "generalized"))
            assert rep.passed and rep.info == {"left": "pass", "right": "pass"}
        E = make_twisted_TM(C3, VOLUME)
        rep = check_manin(E, tangent_frame(C3), cotangent_frame(C3), make_lift(Matrix.identity(C3, 3), "generalized"))
        assert rep.passed and rep.info == {"left": "pass", "right": "pass"}
        rep = check_manin(E, tangent_frame(C3), cotangent_frame(C3), make_lift(Matrix.parse(C3, [[1, 0, 0], [0, 1, 0], [0, 0, 0]]), "generalized"))
        assert rep.passed and rep.info == {"left": "fail", "right": "fail"}


@pytest.mark.criterion("10: (1/2)[pi,pi] = rho(chi) + rho_*(phi) on three splittings")
def test_criterion_10_bivector_identity():
    with budget():
        standard = extract_proto(make_twisted_TM(C3), tangent_frame(C3), cotangent_frame(C3))
        pi, rep = induced_bivector_identity(standard)
        assert pi.is_zero() and rep.passed
        poisson = Matrix.parse(C3, [[0, 1, 0], [-1, 0, 2], [0, -2, 0]])
        pi, rep = induced_bivector_identity(extract_proto(make_twisted_TM(C3), tangent_frame(C3), bivector_graph(poisson)))
        assert pi == poisson and rep.passed
        twisted = extract_proto(make_twisted_TM(C3, VOLUME), tangent_frame(C3), cotangent_frame(C3))
        assert twisted.chi.is_zero() and twisted.Astar.anchor.is_zero()
        assert induced_bivector_identity(twisted)[1].passed


@pytest.mark.criterion("11: shipped scenarios reproduce bit-identical JSON within 5 minutes")
def test_criterion_11_determinism():
    with budget(300.0):
        paths = shipped_scenarios()
        assert len(paths) >= 12
        for p in paths:
            sc = load_scenario(p)
            first = run_scenario(sc).to_json()
            second = run_scenario(load_scenario(p)).to_json()
            assert first == second, p.stem
            assert json.loads(first)["status"] == sc.expected, p.stem
