"""Verification report records and their JSON form."""

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np


def _plain(value: Any) -> Any:
    """Convert numpy scalars and containers to JSON-native values; NaN and infinities become None."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    return value


@dataclass
class VerificationReport:
    """Outcome of one identity check.

    ``thresholds`` maps a key of ``stats`` to its upper bound; the check passes
    iff every bounded statistic is within its threshold.
    """
    name: str
    params: dict[str, Any]
    stats: dict[str, float]
    thresholds: dict[str, float]
    n: dict[str, int]
    seed: int
    ms: Optional[float] = None
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        missing = set(self.thresholds) - set(self.stats)
        if missing:
            raise KeyError(f"Thresholds without statistics: {sorted(missing)}")
        self.passed = all(
            bool(np.isfinite(self.stats[key])) and abs(self.stats[key]) <= bound
            for key, bound in self.thresholds.items()
        )

    def to_dict(self) -> dict[str, Any]:
        """Serialize with the fixed field names."""
        return {
            "name": self.name,
            "params": _plain(self.params),
            "stats": _plain(self.stats),
            "thresholds": _plain(self.thresholds),
            "pass": self.passed,
            "n": _plain(self.n),
            "seed": int(self.seed),
            "ms": None if self.ms is None else round(float(self.ms), 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), allow_nan=False)
