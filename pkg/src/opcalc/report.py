"""Shared result record for numerical identity checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one numerical check: measured gap against a threshold."""

    name: str
    passed: bool
    measured_gap: float
    threshold: float
    details: dict = field(default_factory=dict)

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: gap={self.measured_gap:.3e} "
                f"threshold={self.threshold:.3e}")


def from_gap(name: str, gap: float, threshold: float, **details) -> CheckReport:
    return CheckReport(name=name, passed=gap <= threshold, measured_gap=float(gap),
                       threshold=float(threshold), details=dict(details))
