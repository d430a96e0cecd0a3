"""Check records and JSON run reports with a stable layout."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    name: str
    holds: bool
    witness: Any = None
    details: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        rec: dict = {"name": self.name, "holds": bool(self.holds)}
        if self.witness is not None:
            rec["witness"] = self.witness
        rec.update(self.details)
        return rec


@dataclass
class Report:
    name: str
    checks: list[Check] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, name: str, holds: bool, witness=None, **details) -> Check:
        c = Check(name, bool(holds), witness, details)
        self.checks.append(c)
        return c

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.checks)

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_records(self) -> list[dict]:
        return [{**c.to_record(), "name": f"{self.name}:{c.name}"} for c in self.checks]


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _plain(obj):
    """Convert numpy scalars, tuples and sets into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_plain(v) for v in obj)
    if hasattr(obj, "item") and callable(obj.item):
        return obj.item()
    if hasattr(obj, "images"):
        return list(obj.images)
    return obj


def run_report(command: list[str], inputs: list[dict], checks: list[dict], elapsed_ms: int | None) -> str:
    """Serialize a run; ``elapsed_ms=None`` writes null so reruns are byte-identical."""
    doc = {
        "command": list(command),
        "inputs": inputs,
        "checks": _plain(checks),
        "elapsed_ms": None if elapsed_ms is None else int(elapsed_ms),
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
