"""Check reports: per-check counts, witnesses, and JSON/human renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


@dataclass
class Check:
    name: str
    count: int = 0
    violations: int = 0
    witnesses: list = field(default_factory=list)
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def fail(self, witness: Any, max_witnesses: int = 20) -> None:
        self.violations += 1
        if len(self.witnesses) < max_witnesses:
            self.witnesses.append(witness)

    def expect(self, condition: bool, witness: Any = None, max_witnesses: int = 20) -> bool:
        self.count += 1
        if not condition:
            self.fail(witness, max_witnesses)
        return condition


@dataclass
class Report:
    title: str
    params: dict = field(default_factory=dict)
    checks: dict[str, Check] = field(default_factory=dict)
    elapsed: float = 0.0

    def check(self, name: str) -> Check:
        if name not in self.checks:
            self.checks[name] = Check(name)
        return self.checks[name]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks.values())

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.checks.values())

    def merge(self, other: "Report", prefix: str = "") -> "Report":
        for name, c in other.checks.items():
            mine = self.check(prefix + name)
            mine.count += c.count
            mine.violations += c.violations
            mine.witnesses.extend(c.witnesses[: max(0, 20 - len(mine.witnesses))])
            if c.note and not mine.note:
                mine.note = c.note
        self.elapsed += other.elapsed
        return self

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "params": _jsonable(self.params),
            "ok": self.ok,
            "violations": self.violations,
            "elapsed_seconds": round(self.elapsed, 3),
            "checks": {
                name: {"ok": c.ok, "count": c.count, "violations": c.violations,
                       "note": c.note, "witnesses": _jsonable(c.witnesses)}
                for name, c in self.checks.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def to_human(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.ok else 'FAIL'} "
                 f"({self.violations} violations, {self.elapsed:.2f}s)"]
        for name, c in self.checks.items():
            status = "ok  " if c.ok else "FAIL"
            extra = f"  [{c.note}]" if c.note else ""
            lines.append(f"  {status} {name}: {c.count} checked, {c.violations} violations{extra}")
            for w in c.witnesses[:3]:
                lines.append(f"       witness: {_jsonable(w)}")
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.to_human()
