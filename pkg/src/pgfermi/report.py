"""Verification reports: named residual checks with pass/fail flags.

A check's ``residual`` is the max-entry deviation of an identity divided by
``max(1, scale)``, where ``scale`` is the largest entry among the terms that
were combined.  For unit-scale operators this is the plain absolute
deviation; for badly scaled parameter draws it measures the deviation at
the working precision of the terms.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .numerics import max_abs


def scale_of(*terms) -> float:
    return max((max_abs(t) for t in terms), default=0.0)


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    threshold: float
    anchor: str = ""
    scale: float = 1.0
    passed: bool | None = None

    @property
    def ok(self) -> bool:
        if self.passed is not None:
            return self.passed
        return self.residual <= self.threshold

    @property
    def raw(self) -> float:
        return self.residual * max(1.0, self.scale)

    def to_json(self) -> dict:
        return {"name": self.name, "residual": self.residual, "raw": self.raw,
                "scale": self.scale, "threshold": self.threshold,
                "pass": self.ok, "paper_anchor": self.anchor}


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def add(self, name: str, deviation: float, threshold: float, anchor: str = "",
            scale: float = 1.0, passed: bool | None = None) -> Check:
        """Record ``deviation`` (raw max-entry norm) against ``threshold``."""
        scale = float(scale)
        chk = Check(name, float(deviation) / max(1.0, scale), float(threshold),
                    anchor, scale, passed)
        self.checks.append(chk)
        return chk

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.residual, c.threshold,
                                     c.anchor, c.scale, c.passed))
        self.notes.update(other.notes)

    @property
    def overall(self) -> bool:
        return all(c.ok for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def to_json(self) -> dict:
        return {"checks": [c.to_json() for c in self.checks],
                "overall": self.overall, "notes": self.notes}

    def to_table(self) -> str:
        width = max([len(c.name) for c in self.checks] + [5])
        lines = [f"{'check':<{width}}  {'residual':>10}  {'threshold':>10}  result"]
        for c in self.checks:
            lines.append(f"{c.name:<{width}}  {c.residual:>10.3e}  "
                         f"{c.threshold:>10.3e}  {'PASS' if c.ok else 'FAIL'}")
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)
