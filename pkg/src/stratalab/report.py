"""Check results, suite reports and their deterministic serialization."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Iterator

STATUSES = ("pass", "fail", "skipped")


@dataclass
class CheckResult:
    name: str
    status: str
    expected: Any = None
    actual: Any = None
    witness: Any = None
    elapsed_ms: float | None = None

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == "fail" and self.witness is None:
            raise ValueError(f"failing check {self.name!r} carries no witness")

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "expected": self.expected,
            "actual": self.actual,
            "witness": self.witness,
            "elapsed_ms": self.elapsed_ms,
        }

    @classmethod
    def from_dict(cls, data: dict) -> CheckResult:
        return cls(**{k: data.get(k) for k in ("name", "status", "expected", "actual", "witness", "elapsed_ms")})


def compare(name: str, expected: Any, actual: Any, witness: Any = None) -> CheckResult:
    """Pass iff expected == actual; a failure without a witness records the mismatch itself."""
    if expected == actual:
        return CheckResult(name, "pass", expected, actual, witness)
    if witness is None:
        witness = {"expected": expected, "actual": actual}
    return CheckResult(name, "fail", expected, actual, witness)


def no_failures(name: str, failures: list, total: int, limit: int = 5) -> CheckResult:
    """A check over ``total`` cases that passes iff ``failures`` is empty."""
    if not failures:
        return CheckResult(name, "pass", 0, 0, {"cases": total})
    return CheckResult(name, "fail", 0, len(failures), {"cases": total, "first": failures[:limit]})


@dataclass
class Report:
    suite: str
    params: dict = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    record_timings: bool = False

    def add(self, result: CheckResult) -> CheckResult:
        self.checks.append(result)
        return result

    def extend(self, results: list[CheckResult]) -> None:
        for r in results:
            self.add(r)

    @contextmanager
    def timed(self) -> Iterator[list[CheckResult]]:
        """Collect checks produced inside the block and stamp their elapsed time."""
        start = time.perf_counter()
        bucket: list[CheckResult] = []
        yield bucket
        ms = round((time.perf_counter() - start) * 1000.0, 3)
        for r in bucket:
            r.elapsed_ms = ms if self.record_timings else None
            self.add(r)

    @property
    def totals(self) -> dict:
        out = {s: 0 for s in STATUSES}
        for c in self.checks:
            out[c.status] += 1
        out["total"] = len(self.checks)
        return out

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "params": self.params,
            "checks": [c.to_dict() for c in self.checks],
            "tables": self.tables,
            "totals": self.totals,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Report:
        return cls(
            data["suite"],
            data.get("params", {}),
            [CheckResult.from_dict(c) for c in data.get("checks", [])],
            data.get("tables", {}),
        )

    def merge(self, other: Report) -> None:
        for c in other.checks:
            self.add(CheckResult(f"{other.suite}/{c.name}", c.status, c.expected, c.actual, c.witness, c.elapsed_ms))
        for k, v in other.tables.items():
            self.tables[f"{other.suite}/{k}"] = v


def emit_report(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        text = json.dumps(report.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    elif fmt == "text":
        text = _text_digest(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return text.encode("utf-8")


def _short(value: Any, width: int = 60) -> str:
    s = json.dumps(value, sort_keys=True, ensure_ascii=False)
    return s if len(s) <= width else s[: width - 3] + "..."


def _text_digest(report: Report) -> str:
    lines = [f"suite: {report.suite}"]
    for k in sorted(report.params):
        lines.append(f"  {k} = {report.params[k]}")
    for c in report.checks:
        line = f"[{c.status.upper():4}] {c.name}: expected {_short(c.expected)} actual {_short(c.actual)}"
        if c.elapsed_ms is not None:
            line += f" ({c.elapsed_ms} ms)"
        lines.append(line)
        if c.status == "fail":
            lines.append(f"       witness: {_short(c.witness, 200)}")
    for name in sorted(report.tables):
        lines.append(f"table {name}:")
        for row in report.tables[name]:
            lines.append("  " + " | ".join(_short(x, 30) for x in row))
    t = report.totals
    lines.append(f"totals: {t['pass']} pass, {t['fail']} fail, {t['skipped']} skipped, {t['total']} total")
    return "\n".join(lines) + "\n"
