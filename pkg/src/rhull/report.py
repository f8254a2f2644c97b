"""Machine-readable reports (schema ``report_v1``)."""

from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from importlib import resources

from . import __version__

SCHEMA_NAME = "report_v1"


def load_schema() -> dict:
    return json.loads(resources.files("rhull").joinpath("schemas", "report_v1.json").read_text())


def quantity(name, value, units, tolerance=None) -> dict:
    """A numeric result; infinities are stored as ``null``."""
    if isinstance(value, float) and math.isinf(value):
        value = None
    return {"name": name, "value": value, "units": units, "tolerance": tolerance}


@dataclass
class ProbeReport:
    command: str
    parameters: dict
    results: list = field(default_factory=list)
    timing_ms: dict = field(default_factory=dict)
    tool_version: str = __version__

    def add(self, name, verdict, values, expected=None, details=None):
        entry = {"name": name, "verdict": verdict,
                 "expected": expected if expected is not None else verdict,
                 "values": list(values)}
        if details:
            entry["details"] = details
        self.results.append(entry)
        return entry

    @contextmanager
    def stage(self, name):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timing_ms[name] = round((time.perf_counter() - t0) * 1000, 3)

    @property
    def passed(self) -> bool:
        return all(r["verdict"] == r["expected"] for r in self.results)

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "schema": SCHEMA_NAME,
            "tool_version": self.tool_version,
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "exit_code": 0 if self.passed else 1,
        }
        if timing:
            d["timing_ms"] = self.timing_ms
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ProbeReport":
        return cls(d["command"], d["parameters"], list(d["results"]),
                   dict(d.get("timing_ms", {})), d["tool_version"])
