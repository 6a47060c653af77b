"""Condition verdicts and deterministic JSON encoding."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

SCHEMA = "hasse-forge/1"

PASS = "pass"
FAIL = "fail"
UNDECIDED = "undecided"
NOT_APPLICABLE = "not-applicable"
STATUSES = (PASS, FAIL, UNDECIDED, NOT_APPLICABLE)


def jsonify(obj):
    """Recursively convert to JSON-ready data; integers become decimal strings."""
    if hasattr(obj, "to_json"):
        return jsonify(obj.to_json())
    if isinstance(obj, bool) or obj is None or isinstance(obj, float):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, str):
        return obj
    if isinstance(obj, dict):
        return {str(k): jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [jsonify(v) for v in obj]
        return sorted(items, key=str) if isinstance(obj, (set, frozenset)) else items
    return str(obj)


def dumps(obj, pretty: bool = True) -> str:
    return json.dumps(jsonify(obj), sort_keys=True, indent=2 if pretty else None,
                      ensure_ascii=False)


@dataclass
class ConditionResult:
    name: str
    status: str
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        return {"status": self.status, "detail": jsonify(self.detail)}


@dataclass
class ConditionReport:
    conditions: dict = field(default_factory=dict)

    def add(self, name: str, status: str, **detail) -> ConditionResult:
        res = ConditionResult(name, status, detail)
        self.conditions[name] = res
        return res

    def __getitem__(self, name: str) -> ConditionResult:
        return self.conditions[name]

    def status(self, name: str) -> str:
        return self.conditions[name].status

    @property
    def overall(self) -> str:
        statuses = [c.status for c in self.conditions.values()]
        if FAIL in statuses:
            return FAIL
        if UNDECIDED in statuses:
            return UNDECIDED
        return PASS

    @property
    def passed(self) -> bool:
        return self.overall == PASS

    def failures(self) -> list[str]:
        return [k for k, c in self.conditions.items() if c.status == FAIL]

    def to_json(self) -> dict:
        return {"overall": self.overall,
                "conditions": {k: c.to_json() for k, c in self.conditions.items()}}
