"""Machine-checkable certificate reports.

Every inequality check in the package returns a CertificateReport rather
than a bare bool, so that failures carry the worst margin and where it
occurred.  Margins are signed: margin = (bound side) - (checked side),
so a nonnegative margin means the inequality holds and pass means
margin >= -tolerance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class CertificateReport:
    name: str
    passed: bool
    worst_margin: float
    tolerance: float
    location: float | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def to_json_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "name": self.name,
            "pass": bool(self.passed),
            "worst_margin": float(self.worst_margin),
            "tolerance": float(self.tolerance),
            "location_t": None if self.location is None else float(self.location),
        }
        if self.details:
            d["details"] = _plain(self.details)
        return d

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _plain(obj):
    """Coerce numpy scalars and arrays to plain JSON-serializable types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return str(obj)
