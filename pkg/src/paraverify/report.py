"""Verification configuration, per-check results and report assembly."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

BASE_TOL = 1e-8


@dataclass(frozen=True)
class VerifyConfig:
    """Sampling and tolerance settings for a verification run."""

    samples: int = 100
    tol: float = BASE_TOL
    seed: int = 42

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("need at least 1 sample")
        if self.tol <= 0.0:
            raise ValueError("tolerance must be positive")

    def scaled(self, default: float) -> float:
        """A check-specific tolerance, rescaled when the base tol is changed."""
        return default * (self.tol / BASE_TOL)


@dataclass
class CheckResult:
    """One named residual check.

    ``mode`` is "below" for ordinary residual checks (pass iff residual < tol),
    "above" for discrimination checks (pass iff residual > tol), and "info"
    for purely informational rows that never affect the overall verdict.
    """

    check: str
    statement: str
    residual: float
    tol: float
    samples: int
    mode: str = "below"
    note: str = ""

    @property
    def passed(self) -> bool:
        if self.mode == "info":
            return True
        if self.mode == "above":
            return self.residual > self.tol
        return self.residual < self.tol

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "statement": self.statement,
            "residual": self.residual,
            "tol": self.tol,
            "samples": self.samples,
            "mode": self.mode,
            "note": self.note,
            "passed": self.passed,
        }


@dataclass
class VerificationReport:
    scenario: str
    config: dict = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    def note(self, text: str) -> None:
        self.notes.append(text)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def find(self, check_id: str) -> CheckResult:
        for c in self.checks:
            if c.check == check_id:
                return c
        raise KeyError(f"no check named {check_id!r}")

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "config": self.config,
            "checks": [c.as_dict() for c in self.checks],
            "verdicts": self.verdicts,
            "notes": self.notes,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"scenario: {self.scenario}"]
        for key in sorted(self.verdicts):
            lines.append(f"verdict:  {key} = {self.verdicts[key]}")
        width = max((len(c.check) for c in self.checks), default=0)
        for c in self.checks:
            mark = {"below": "<", "above": ">"}.get(c.mode, " ")
            status = "pass" if c.passed else "FAIL"
            if c.mode == "info":
                status = "info"
            lines.append(
                f"  [{status}] {c.check.ljust(width)}  residual {c.residual:.3e} "
                f"{mark} {c.tol:.1e}  (n={c.samples})"
            )
            if c.note:
                lines.append(f"          {' ' * width}  {c.note}")
        for n in self.notes:
            lines.append(f"note: {n}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def thread_count() -> int:
    """Worker cap from PARAVERIFY_THREADS (defaults to 1 = sequential)."""
    raw = os.environ.get("PARAVERIFY_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def map_samples(fn, items):
    """Apply a pure function over sample points, optionally on a thread pool.

    Results always come back in input order, so reports do not depend on the
    worker count.
    """
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
