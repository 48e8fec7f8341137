"""The common pass/fail record returned by every check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a single inequality or identity check.

    ``margin`` is ``lhs - rhs``; a check passes when ``margin >= -tol``.
    ``equality`` can only be set on a passing check.
    """

    name: str
    lhs: float
    rhs: float
    margin: float
    tol: float
    passed: bool
    equality: bool
    context: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        name: str,
        lhs: float,
        rhs: float,
        tol: float,
        equality_tol: float | None = None,
        relative: bool = False,
        context: dict[str, Any] | None = None,
    ) -> "CheckReport":
        """Assemble a report from its two sides.

        With ``relative=True`` the equality flag compares ``|margin|/|rhs|``
        against ``equality_tol``; otherwise the absolute margin is used.
        """
        lhs = float(lhs)
        rhs = float(rhs)
        margin = lhs - rhs
        passed = bool(margin >= -tol) and not math.isnan(margin)
        equality = False
        ctx = dict(context or {})
        if equality_tol is not None and passed:
            scale = abs(rhs) if relative and rhs != 0.0 else 1.0
            if relative:
                ctx.setdefault("relative_margin", margin / scale)
            equality = abs(margin) / scale < equality_tol
        return cls(name, lhs, rhs, margin, float(tol), passed, bool(equality), ctx)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tol": self.tol,
            "passed": self.passed,
            "equality": self.equality,
            "context": self.context,
        }
