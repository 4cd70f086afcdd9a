"""Pass/fail verdicts shared by the checkers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


def _plain(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


@dataclass
class Verdict:
    check: str
    params: dict[str, Any]
    passed: bool
    first_violation: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    @staticmethod
    def violation(m, h, lhs, rhs, j: int | None = None) -> dict[str, Any]:
        out: dict[str, Any] = {} if j is None else {"j": j}
        out.update({"m": str(m), "h": str(h), "lhs": str(lhs), "rhs": str(rhs)})
        return out

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"check": self.check, "params": _plain(self.params), "pass": self.passed}
        if self.first_violation is not None:
            out["first_violation"] = _plain(self.first_violation)
        if self.details:
            out["details"] = _plain(self.details)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = ""
        if self.first_violation:
            fv = self.first_violation
            extra = " at " + ", ".join(f"{k}={fv[k]}" for k in ("j", "m", "h", "lhs", "rhs") if k in fv)
        elif "reason" in self.details:
            extra = f" ({self.details['reason']})"
        params = " ".join(f"{k}={_plain(v)}" for k, v in self.params.items())
        return f"{status} {self.check} {params}{extra}"


def all_pass(verdicts) -> Verdict | None:
    """First failing verdict, or None."""
    for v in verdicts:
        if not v.passed:
            return v
    return None
