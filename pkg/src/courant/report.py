"""Structured check results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional

from .cartan import Alternating
from .field import RatFunc
from .linalg import Matrix

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass(frozen=True)
class Witness:
    """A nonzero value found while evaluating an identity, and where it was found."""

    expr: str
    where: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"expr": self.expr, "where": list(self.where)}


@dataclass(frozen=True)
class Entry:
    id: str
    status: str
    witness: Optional[Witness] = None
    detail: str = ""
    informational: bool = False

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"id": self.id, "status": self.status}
        if self.detail:
            d["detail"] = self.detail
        if self.informational:
            d["informational"] = True
        d["witness"] = self.witness.to_dict() if self.witness else None
        return d


@dataclass
class CheckReport:
    """Ordered entries; the overall status is the conjunction of the counted entries."""

    name: str
    entries: list[Entry] = field(default_factory=list)
    seed: Optional[int] = None
    info: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return FAIL if any(e.status == FAIL and not e.informational for e in self.entries) else PASS

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def add(self, entry: Entry) -> Entry:
        self.entries.append(entry)
        return entry

    def extend(self, entries: Iterable[Entry], prefix: str = "", informational: Optional[bool] = None) -> None:
        for e in entries:
            self.entries.append(
                Entry(
                    prefix + e.id,
                    e.status,
                    e.witness,
                    e.detail,
                    e.informational if informational is None else informational,
                )
            )

    def entry(self, id: str) -> Entry:
        for e in self.entries:
            if e.id == id:
                return e
        raise KeyError(id)

    def failures(self) -> list[Entry]:
        return [e for e in self.entries if e.status == FAIL and not e.informational]

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"name": self.name, "status": self.status, "seed": self.seed}
        if self.info:
            d["info"] = self.info
        d["entries"] = [e.to_dict() for e in self.entries]
        return d


def value_is_zero(value) -> bool:
    if isinstance(value, RatFunc):
        return value.is_zero()
    if isinstance(value, (Matrix, Alternating)):
        return value.is_zero()
    if isinstance(value, (tuple, list)):
        return all(value_is_zero(v) for v in value)
    if isinstance(value, dict):
        return all(value_is_zero(v) for v in value.values())
    raise TypeError(f"cannot zero-test {type(value).__name__}")


def format_value(value) -> str:
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    return str(value)


Case = tuple[tuple[str, ...], Any]


def run_entry(
    id: str,
    cases: Iterable[Case],
    fmt: Callable[[Any], str] = format_value,
    detail: str = "",
) -> Entry:
    """Evaluate identity residuals until the first nonzero one.

    ``cases`` yields ``(where, residual)`` pairs; the entry passes when every
    residual is exactly zero.
    """
    for where, value in cases:
        if not value_is_zero(value):
            return Entry(id, FAIL, Witness(fmt(value), tuple(where)), detail)
    return Entry(id, PASS, None, detail)


def bool_entry(id: str, ok: bool, witness: Optional[Witness] = None, detail: str = "", informational: bool = False) -> Entry:
    return Entry(id, PASS if ok else FAIL, None if ok else witness, detail, informational)


def skipped(id: str, detail: str = "") -> Entry:
    return Entry(id, SKIP, None, detail)
