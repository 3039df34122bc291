"""Structured pass/fail records emitted by every check."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Iterator

REPORT_FIELDS = ("check", "params", "pass", "witness", "runtime_ms")


@dataclass
class Report:
    """Outcome of one verification.

    ``witness`` holds whatever data lets a reader confirm the verdict
    (residues, prime lists, the first mismatching coefficient, ...). A
    failed report always carries a nonempty witness.
    """

    check: str
    params: dict[str, Any]
    passed: bool
    witness: dict[str, Any] = field(default_factory=dict)
    runtime_ms: float = 0.0

    def __post_init__(self) -> None:
        if not self.passed and not self.witness:
            raise ValueError(f"failed check {self.check!r} needs a witness")

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "params": self.params,
            "pass": self.passed,
            "witness": self.witness,
            "runtime_ms": round(self.runtime_ms, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Report":
        if set(d) != set(REPORT_FIELDS):
            raise ValueError(f"report fields {sorted(d)} != {sorted(REPORT_FIELDS)}")
        return cls(d["check"], d["params"], d["pass"], d["witness"], d["runtime_ms"])


def _jsonable(obj: Any) -> Any:
    # numpy scalars and tuples of them end up in witnesses
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


@contextmanager
def stopwatch() -> Iterator[dict[str, float]]:
    """Yield a dict whose ``ms`` entry is filled in on exit."""
    out = {"ms": 0.0}
    t0 = time.perf_counter()
    try:
        yield out
    finally:
        out["ms"] = (time.perf_counter() - t0) * 1e3
