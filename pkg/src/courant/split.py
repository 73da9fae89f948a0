"""Lagrangian splittings E = A + A* of Courant algebroids."""

from __future__ import annotations

from dataclasses import dataclass

from .algebroid import PreLieAlgebroidData, ProtoBialgebroidData, check_lie, prelie_differential
from .bundle import CourantData, courant_bracket
from .cartan import Bivector, coordinate_field, pushforward, schouten_square
from .compat import bivector_graph_PN, check_CN, check_IM, check_lagrangian
from .deriv import (
    MultiSection,
    OneDerivation,
    check_nijenhuis,
    check_self_dual,
    dualize,
    extended_dual_apply,
    restrict_to_invariant,
)
from .field import DivisionByZeroError
from .linalg import Matrix
from .report import CheckReport, Entry, Witness, bool_entry

__all__ = [
    "SplitFrames",
    "split_frames",
    "extract_proto",
    "prelie_differential",
    "induced_bivector",
    "induced_bivector_identity",
    "check_manin",
]


class NonTransverseError(ValueError):
    pass


@dataclass(frozen=True)
class SplitFrames:
    """A-frame, the pairing-dual B-frame, and the inverse of the joint frame."""

    A: Matrix
    Bdual: Matrix
    inverse: Matrix

    @property
    def rank(self) -> int:
        return self.A.shape[1]

    def coordinates(self, s) -> tuple:
        return self.inverse.apply(s)


def split_frames(E: CourantData, A: Matrix, B: Matrix) -> SplitFrames:
    check_lagrangian(E, A)
    check_lagrangian(E, B)
    P = A.T @ E.pairing @ B
    try:
        Pinv = P.inverse()
    except DivisionByZeroError:
        raise NonTransverseError("the two lagrangian frames are not transverse") from None
    Bd = B @ Pinv
    F = Matrix.block(E.chart, [[A, Bd]])
    return SplitFrames(A, Bd, F.inverse())


def _half_data(E: CourantData, sf: SplitFrames, cols, own: slice, other: slice, labels):
    """Anchor, frame brackets and the cross 3-form for one half of the split."""
    chart = E.chart
    m = sf.rank
    anchor = E.anchor @ Matrix.from_columns(chart, cols)
    structure = [[None] * m for _ in range(m)]
    cross = {}
    for a in range(m):
        for b in range(m):
            coords = sf.coordinates(courant_bracket(E, cols[a], cols[b]))
            structure[a][b] = tuple(coords[own])
            if a < b:
                for c, v in enumerate(coords[other]):
                    if c > b:
                        cross[(a, b, c)] = v
    data = PreLieAlgebroidData(chart, anchor, tuple(tuple(r) for r in structure), labels)
    return data, MultiSection(chart, m, 3, cross)


def extract_proto(E: CourantData, A: Matrix, B: Matrix) -> ProtoBialgebroidData:
    """Project the Courant structure onto a lagrangian splitting.

    B is replaced by its frame dual to A under the pairing, so A* carries
    the dual frame and the projections are index slices.
    """
    sf = split_frames(E, A, B)
    m = sf.rank
    a_lab = tuple(f"a{i + 1}" for i in range(m))
    b_lab = tuple(f"b{i + 1}" for i in range(m))
    Adata, phi = _half_data(E, sf, sf.A.columns(), slice(0, m), slice(m, 2 * m), a_lab)
    Bdata, chi = _half_data(E, sf, sf.Bdual.columns(), slice(m, 2 * m), slice(0, m), b_lab)
    return ProtoBialgebroidData(Adata, Bdata, phi, chi)


def induced_bivector(proto: ProtoBialgebroidData) -> Matrix:
    """pi with pi_sharp = rho_* o rho^*, i.e. pi^{ij} = sum_a rho^i_a rho_*^j_a."""
    return proto.A.anchor @ proto.Astar.anchor.T


def induced_bivector_identity(proto: ProtoBialgebroidData) -> tuple[Matrix, CheckReport]:
    """pi from the split and the identity (1/2)[pi, pi] = rho(chi) + rho_*(phi)."""
    pi = induced_bivector(proto)
    report = CheckReport("induced_bivector")
    anti = pi + pi.T
    report.add(bool_entry("pi antisymmetric", anti.is_zero(), Witness(str(anti))))
    if not anti.is_zero():
        report.add(Entry("(1/2)[pi,pi] = rho(chi) + rho_*(phi)", "skip", None, "pi is not a bivector"))
        return pi, report
    half = schouten_square(Bivector.of(pi)).scale(pi.chart.const(1) / 2)
    rhs = pushforward(proto.A.anchor, proto.chi) + pushforward(proto.Astar.anchor, proto.phi)
    res = half - rhs
    report.add(bool_entry("(1/2)[pi,pi] = rho(chi) + rho_*(phi)", res.is_zero(), Witness(str(res))))
    for name, data in (("A", proto.A), ("A*", proto.Astar)):
        report.extend(check_lie(data).entries, prefix=f"{name} ", informational=True)
    return pi, report


def _three_form_conditions(report: CheckReport, name: str, D: OneDerivation, t: MultiSection) -> None:
    chart = D.chart
    first = extended_dual_apply(D, coordinate_field(chart, 0), t) if chart.dim else None
    report.add(bool_entry(f"{name} in Gamma_l", first is None or first.in_gamma_l, first and first.gamma_l_witness))
    bad = None
    for i in range(chart.dim):
        res = extended_dual_apply(D, coordinate_field(chart, i), t)
        if not res.value.is_zero():
            bad = Witness(str(res.value), (f"d/d{chart.var_names[i]}",))
            break
    report.add(bool_entry(f"D*({name}) = 0", bad is None, bad))


def check_manin(
    E: CourantData,
    A: Matrix,
    B: Matrix,
    DD: OneDerivation,
    bivector: bool = False,
    seed: int = 0,
) -> CheckReport:
    """Courant compatibility of DD against its split form on (A, A*).

    LEFT is the CN verdict for DD on E; RIGHT collects the IM equations for
    the restrictions to A and A* together with the conditions on phi and chi.
    """
    sd = check_self_dual(DD, E.pairing)
    if not sd.passed:
        raise ValueError(f"derivation is not symmetric: {sd.witness.expr if sd.witness else ''}")
    sf = split_frames(E, A, B)
    DA = restrict_to_invariant(DD, sf.A, E.labels)
    DB = restrict_to_invariant(DD, sf.Bdual, E.labels)
    proto = extract_proto(E, A, B)
    m = sf.rank
    ident = Matrix.identity(E.chart, m)

    report = CheckReport("manin", seed=seed)
    left = check_CN(E, DD, seed=seed)
    right = CheckReport("right")
    right.extend(check_IM(proto.A, DA, seed=seed).entries, prefix="A: ")
    right.extend(check_IM(proto.Astar, DB, seed=seed).entries, prefix="A*: ")
    _three_form_conditions(right, "phi", DA, proto.phi)
    _three_form_conditions(right, "chi", DB, proto.chi)

    report.add(
        bool_entry(
            "CN verdict = split verdict",
            left.passed == right.passed,
            Witness(f"left={left.status}, right={right.status}"),
        )
    )
    report.extend(left.entries, prefix="LEFT ", informational=True)
    report.extend(right.entries, prefix="RIGHT ", informational=True)
    dual_ok = dualize(DA, ident) == DB
    report.add(
        bool_entry(
            "restriction to A* is dual to restriction to A",
            dual_ok,
            Witness("restrictions are not dual"),
            informational=True,
        )
    )

    for mode in ("nijenhuis", "dolbeault"):
        big = check_nijenhuis(DD, mode, seed=seed, labels=E.labels)
        small = check_nijenhuis(DA, mode, seed=seed, labels=proto.A.labels)
        report.add(
            bool_entry(
                f"{mode}: E-verdict = A-verdict",
                big.passed == small.passed,
                Witness(f"E={big.status}, A={small.status}"),
            )
        )

    if bivector:
        pi = induced_bivector(proto)
        pn = bivector_graph_PN(pi, DD.base)
        for e in pn.entries[:2]:
            report.add(Entry("pi-r: " + e.id, e.status, e.witness, e.detail, informational=not left.passed))
    report.info["left"] = left.status
    report.info["right"] = right.status
    return report
