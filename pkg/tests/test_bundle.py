from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from courant.algebroid import tangent_algebroid
from courant.bundle import CourantData, NonClosedFormError, check_courant_axioms, courant_bracket, make_double, make_twisted_TM
from courant.cartan import KForm
from courant.compat import cotangent_frame, tangent_frame
from courant.field import Chart
from courant.linalg import Matrix
from courant.split import extract_proto

C2 = Chart(["x", "y"])
C3 = Chart(["x", "y", "z"])
C1 = Chart(["x"])


def sl2_bundle() -> CourantData:
    z, o = C1.zero, C1.one
    st_ = [[(z, z, z)] * 3 for _ in range(3)]
    # frame (e, f, h): [e, f] = h, [h, e] = 2e, [h, f] = -2f
    st_[0][1], st_[1][0] = (z, z, o), (z, z, -o)
    st_[2][0], st_[0][2] = (o * 2, z, z), (-o * 2, z, z)
    st_[2][1], st_[1][2] = (z, -o * 2, z), (z, o * 2, z)
    pairing = Matrix.parse(C1, [[0, 1, 0], [1, 0, 0], [0, 0, 2]])
    return CourantData(C1, pairing, Matrix.zeros(C1, 1, 3), tuple(tuple(r) for r in st_), ("e", "f", "h"))


def section(chart, *entries):
    return tuple(chart.parse(str(e)) for e in entries)


def test_twisted_bracket_of_coordinate_fields():
    # [d/dx, d/dy] = i_{d/dy} i_{d/dx} H = dz for H = dx^dy^dz
    E = make_twisted_TM(C3, KForm(C3, 3, {(0, 1, 2): 1}))
    assert courant_bracket(E, section(C3, 1, 0, 0, 0, 0, 0), section(C3, 0, 1, 0, 0, 0, 0)) == section(C3, 0, 0, 0, 0, 0, 1)


def test_untwisted_bracket_is_dorfman():
    E = make_twisted_TM(C2)
    X = section(C2, "y", 0, 0, 0)
    alpha = section(C2, 0, 0, "x", 0)
    # [X, alpha] = L_X alpha - i_alpha... with alpha = x dx: L_{y d/dx}(x dx) = y dx + x dy
    assert courant_bracket(E, X, alpha) == section(C2, 0, 0, "y", "x")
    # [alpha, X] = -L_X alpha + d<X, alpha> = -(y dx + x dy) + d(xy)
    assert courant_bracket(E, alpha, X) == section(C2, 0, 0, 0, 0)


@pytest.mark.parametrize("H", [None, "1", "x*y + z"])
def test_twisted_tm_axioms(H):
    form = None if H is None else KForm(C3, 3, {(0, 1, 2): C3.parse(H)})
    assert check_courant_axioms(make_twisted_TM(C3, form)).passed


def test_sl2_axioms():
    rep = check_courant_axioms(sl2_bundle())
    assert rep.passed, rep.to_dict()


def test_broken_pairing_fails_with_witness():
    E = sl2_bundle()
    bad = CourantData(C1, Matrix.parse(C1, [[0, 1, 0], [1, 0, 0], [0, 0, 3]]), E.anchor, E.structure, E.labels)
    rep = check_courant_axioms(bad)
    assert not rep.passed
    assert any(e.witness is not None for e in rep.failures())


def test_non_closed_twist_is_rejected():
    C4 = Chart(["x", "y", "z", "w"])
    with pytest.raises(NonClosedFormError):
        make_twisted_TM(C4, KForm(C4, 3, {(0, 1, 2): C4.parse("w")}))


def test_equality_ignores_labels():
    E = sl2_bundle()
    assert CourantData(C1, E.pairing, E.anchor, E.structure, ("a", "b", "c")) == E


@given(st.sampled_from(["1", "x", "y*z", "x^2 + z"]))
def test_double_of_extracted_split_round_trips(h):
    E = make_twisted_TM(C3, KForm(C3, 3, {(0, 1, 2): C3.parse(h)}))
    proto = extract_proto(E, tangent_frame(C3), cotangent_frame(C3))
    assert make_double(proto) == E


def test_standard_split_has_tangent_half():
    proto = extract_proto(make_twisted_TM(C2), tangent_frame(C2), cotangent_frame(C2))
    assert proto.A == tangent_algebroid(C2)
    assert proto.phi.is_zero() and proto.chi.is_zero()
