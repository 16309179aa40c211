"""Check records shared by the pipelines and the report writer."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass
class Check:
    name: str
    status: Status
    witness: Any = None
    counts: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def as_dict(self) -> dict:
        out = {"name": self.name, "status": self.status.value, "counts": plain(self.counts)}
        if self.witness is not None:
            out["witness"] = plain(self.witness)
        if self.detail:
            out["detail"] = plain(self.detail)
        return out


def check(name: str, ok: bool, witness=None, reason: str | None = None, **counts) -> Check:
    """PASS/FAIL record; a failure without a witness gets ``reason`` instead."""
    status = Status.PASS if ok else Status.FAIL
    if not ok and witness is None:
        witness = reason or "no witness available"
    return Check(name, status, None if ok else witness, counts)


def plain(obj: Any) -> Any:
    """Convert results to JSON-ready values (tuples to lists, fractions to strings)."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [plain(x) for x in obj]
        if isinstance(obj, (set, frozenset)):
            items.sort(key=repr)
        return items
    return obj


def overall(checks: list[Check]) -> Status:
    if any(c.status is Status.FAIL for c in checks):
        return Status.FAIL
    if any(c.status is Status.INCONCLUSIVE for c in checks):
        return Status.INCONCLUSIVE
    return Status.PASS
