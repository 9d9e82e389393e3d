"""Pass/fail records shared by the audits and the command line."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    count: int | None = None

    def to_json(self) -> dict[str, Any]:
        out = {"name": self.name, "passed": self.passed, "detail": self.detail}
        if self.count is not None:
            out["count"] = self.count
        return out


@dataclass
class AuditReport:
    title: str
    checks: list[Check] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "", count: int | None = None) -> Check:
        c = Check(name, bool(passed), detail, count)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and not self.violations

    def merge(self, other: AuditReport) -> AuditReport:
        return AuditReport(self.title, self.checks + other.checks, self.violations + other.violations)

    def to_json(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "violations": list(self.violations),
        }

    def lines(self) -> list[str]:
        out = [f"{self.title}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            extra = f" [{c.count}]" if c.count is not None else ""
            out.append(f"  {'ok  ' if c.passed else 'FAIL'} {c.name}{extra}" + (f": {c.detail}" if c.detail else ""))
        out.extend(f"  violation: {v}" for v in self.violations[:20])
        return out
