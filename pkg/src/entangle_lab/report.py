"""Run reports: named results, residuals and pass flags, serialized deterministically."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = ["Report", "digest", "jsonable"]


def jsonable(obj: Any) -> Any:
    """Plain JSON types; complex numbers become ``{"re", "im"}``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def digest(*parts: bytes | str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode() if isinstance(p, str) else p)
        h.update(b"\0")
    return h.hexdigest()[:16]


@dataclass
class Report:
    command: str
    inputs_digest: str
    results: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    passed: dict = field(default_factory=dict)
    wall_time: float = 0.0
    table: np.ndarray | None = None

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def to_dict(self) -> dict:
        d = {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "results": jsonable(self.results),
            "residuals": jsonable(self.residuals),
            "passed": jsonable(self.passed),
            "ok": self.ok,
            "wall_time": self.wall_time,
        }
        if self.table is not None:
            d["table"] = jsonable(np.asarray(self.table))
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        table = np.array(d["table"]) if "table" in d else None
        return cls(d["command"], d["inputs_digest"], d["results"], d["residuals"], d["passed"], d["wall_time"], table)

    def to_text(self) -> str:
        lines = [f"command: {self.command}  (inputs {self.inputs_digest})"]
        for k, v in self.results.items():
            lines.append(f"  {k}: {json.dumps(jsonable(v))}")
        for k, v in self.residuals.items():
            lines.append(f"  residual {k}: {float(v):.3e}")
        for k, v in self.passed.items():
            lines.append(f"  {'PASS' if v else 'FAIL'} {k}")
        lines.append(f"  wall time: {self.wall_time:.3f} s")
        return "\n".join(lines)

    def to_csv(self) -> str:
        if self.table is None:
            raise ValueError(f"command {self.command!r} produces no table")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        t = np.asarray(self.table)
        cplx = np.iscomplexobj(t)
        w.writerow(["x", "y", "a", "b"] + (["re", "im"] if cplx else ["p"]))
        for idx in np.ndindex(t.shape):
            v = t[idx]
            w.writerow(list(idx) + ([repr(float(v.real)), repr(float(v.imag))] if cplx else [repr(float(v))]))
        return buf.getvalue()
