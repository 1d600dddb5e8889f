"""Check records and reports shared by the verification suites and the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .cyclotomic import Cyclotomic


def serialize_value(v: Any):
    """Exact serialization: fractions as 'a/b' strings, cyclotomics as lists."""
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, Cyclotomic):
        return v.serialize()
    if isinstance(v, (list, tuple)):
        return [serialize_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): serialize_value(x) for k, x in v.items()}
    if v is None or isinstance(v, (bool, int, str)):
        return v
    return repr(v)


@dataclass
class CheckRecord:
    suite: str
    params: dict
    status: str  # "pass" | "fail" | "skipped"
    lhs: Any = None
    rhs: Any = None
    witness: Any = None
    elapsed_ms: int = 0

    def key(self):
        return (self.suite, json.dumps(serialize_value(self.params), sort_keys=True))

    def to_dict(self):
        return {
            "suite": self.suite,
            "params": serialize_value(self.params),
            "status": self.status,
            "lhs": serialize_value(self.lhs),
            "rhs": serialize_value(self.rhs),
            "witness": serialize_value(self.witness),
            "elapsed_ms": self.elapsed_ms,
        }


@dataclass
class Report:
    records: list[CheckRecord] = field(default_factory=list)

    def add(self, record: CheckRecord):
        self.records.append(record)

    def extend(self, records):
        self.records.extend(records)

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.records)

    def summary(self) -> dict:
        return {
            "total": len(self.records),
            "passed": sum(1 for r in self.records if r.status == "pass"),
            "failed": sum(1 for r in self.records if r.status == "fail"),
            "skipped": sum(1 for r in self.records if r.status == "skipped"),
        }

    def to_json(self) -> str:
        # Wall-clock timings are zeroed so re-runs serialize byte-identically.
        records = sorted(self.records, key=CheckRecord.key)
        dicts = []
        for r in records:
            d = r.to_dict()
            d["elapsed_ms"] = 0
            dicts.append(d)
        return json.dumps(
            {"records": dicts, "summary": self.summary()},
            indent=2,
            sort_keys=True,
        )
