"""Verdict reports: hypothesis and conclusion checklists with a derived status."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

HOLDS = "HOLDS"
FAILS = "FAILS"
HYPOTHESES_UNMET = "HYPOTHESES_UNMET"
UNDETERMINED = "UNDETERMINED"
NOT_APPLICABLE = "NOT_APPLICABLE"

STATUSES = (HOLDS, FAILS, HYPOTHESES_UNMET, UNDETERMINED, NOT_APPLICABLE)

EXIT_CODES = {
    HOLDS: 0,
    FAILS: 1,
    HYPOTHESES_UNMET: 2,
    UNDETERMINED: 2,
    NOT_APPLICABLE: 2,
}


def jsonable(obj):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isfinite(f):
            return f
        return "nan" if math.isnan(f) else ("inf" if f > 0 else "-inf")
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


@dataclass
class Item:
    """One checked statement.  ``passed`` is None when it could not be decided."""

    name: str
    passed: bool | None
    value: Any = None
    required: str = ""
    margin: float | None = None
    witness: Any = None
    note: str = ""

    def to_dict(self) -> dict:
        d = {"name": self.name, "passed": self.passed, "value": self.value,
             "required": self.required, "margin": self.margin, "witness": self.witness}
        if self.note:
            d["note"] = self.note
        return jsonable(d)


@dataclass
class VerdictReport:
    checker: str
    hypotheses: list[Item] = field(default_factory=list)
    conclusions: list[Item] = field(default_factory=list)
    measured: dict = field(default_factory=dict)
    trace: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    forced_status: str | None = None

    @property
    def status(self) -> str:
        if self.forced_status is not None:
            return self.forced_status
        if any(h.passed is False for h in self.hypotheses):
            return HYPOTHESES_UNMET
        if any(h.passed is None for h in self.hypotheses):
            return UNDETERMINED
        if any(c.passed is False for c in self.conclusions):
            return FAILS
        if any(c.passed is None for c in self.conclusions) or not self.conclusions:
            return UNDETERMINED
        return HOLDS

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def hypothesis(self, name: str) -> Item:
        return _find(self.hypotheses, name)

    def conclusion(self, name: str) -> Item:
        return _find(self.conclusions, name)

    def to_dict(self) -> dict:
        return jsonable({
            "checker": self.checker,
            "status": self.status,
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "conclusions": [c.to_dict() for c in self.conclusions],
            "measured": self.measured,
            "trace": self.trace,
            "notes": list(self.notes),
        })


def _find(items, name):
    for it in items:
        if it.name == name:
            return it
    raise KeyError(name)
