"""Check records and machine/human-readable verification reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
DOCUMENTED = "discrepancy-documented"


@dataclass
class CheckRecord:
    """Outcome of a single exact check."""

    id: str
    paper_eq: str
    status: str
    mode: int | None = None
    engine_value: str = ""
    expected_value: str = ""
    seconds: float = 0.0

    def to_dict(self):
        return {
            "id": self.id,
            "paper_eq": self.paper_eq,
            "status": self.status,
            "mode": self.mode,
            "engine_value": self.engine_value,
            "expected_value": self.expected_value,
            "seconds": self.seconds,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            id=d["id"],
            paper_eq=d["paper_eq"],
            status=d["status"],
            mode=d["mode"],
            engine_value=d["engine_value"],
            expected_value=d["expected_value"],
            seconds=d["seconds"],
        )


def record(check_id: str, paper_eq: str, ok: bool, mode=None,
           engine="", expected="", documented=False) -> CheckRecord:
    status = DOCUMENTED if documented else (PASS if ok else FAIL)
    return CheckRecord(check_id, paper_eq, status, mode, str(engine), str(expected))


def compare_dists(check_id: str, paper_eq: str, engine, expected) -> CheckRecord:
    """Per-mode comparison of two distributions; on failure records the first bad mode."""
    bad = engine.first_mismatch(expected)
    if bad is None:
        return record(check_id, paper_eq, True,
                      engine=_dist_str(engine), expected=_dist_str(expected))
    return CheckRecord(check_id, paper_eq, FAIL, bad,
                       str(engine.coeff(bad)), str(expected.coeff(bad)))


def _dist_str(D):
    N = D.N
    return "[" + ", ".join(f"{n}: {D.coeff(n)}" for n in range(-N, N + 1)) + "]"


@dataclass
class Report:
    """Full verification report for one configuration."""

    scenario: str
    window: int
    checks: list[CheckRecord] = field(default_factory=list)

    def extend(self, records):
        self.checks.extend(records)

    @property
    def failed(self):
        return [r for r in self.checks if r.status == FAIL]

    @property
    def documented(self):
        return [r for r in self.checks if r.status == DOCUMENTED]

    def ok(self):
        return not self.failed

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "window": self.window,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        rep = cls(d["scenario"], d["window"])
        rep.checks = [CheckRecord.from_dict(c) for c in d["checks"]]
        return rep

    def to_markdown(self) -> str:
        lines = [
            f"# Verification report: {self.scenario} (window N={self.window})",
            "",
            "| id | tag | status | mode | engine | expected | seconds |",
            "|---|---|---|---|---|---|---|",
        ]
        for c in self.checks:
            mode = "" if c.mode is None else str(c.mode)
            eng = c.engine_value.replace("|", "\\|")
            exp = c.expected_value.replace("|", "\\|")
            if len(eng) > 120:
                eng = eng[:117] + "..."
            if len(exp) > 120:
                exp = exp[:117] + "..."
            lines.append(
                f"| {c.id} | {c.paper_eq} | {c.status} | {mode} | {eng} | {exp} | {c.seconds:.3f} |"
            )
        n_fail = len(self.failed)
        n_doc = len(self.documented)
        lines += [
            "",
            f"{len(self.checks)} checks: {len(self.checks) - n_fail - n_doc} passed, "
            f"{n_fail} failed, {n_doc} documented discrepancies.",
            "",
        ]
        return "\n".join(lines)

    def strip_durations(self) -> dict:
        d = self.to_dict()
        for c in d["checks"]:
            c["seconds"] = None
        return d
