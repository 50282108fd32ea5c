from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .poly import PolyP, format_rational

PASS, FAIL, ANOMALY = "pass", "fail", "anomaly"


def _jsonable(v: Any):
    if isinstance(v, Fraction):
        return format_rational(v) if v.denominator != 1 else str(v.numerator)
    if isinstance(v, PolyP):
        return str(v)
    if isinstance(v, tuple):
        return ",".join(str(x) for x in v) if v else "e"
    if isinstance(v, (list,)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


@dataclass
class Verdict:
    """Outcome of one check.

    ``residual`` is the string ``"0"`` for an exact check that passed, a
    printed polynomial or rational otherwise, or a float for tolerance checks.
    """

    check: str
    params: dict = field(default_factory=dict)
    status: str = PASS
    residual: Any = "0"
    runtime_ms: int | None = None
    detail: Any = None

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def __bool__(self):
        return self.passed

    def to_record(self, timing: bool = False) -> dict:
        rec = {
            "check": self.check,
            "params": _jsonable(self.params),
            "status": self.status,
            "residual": _jsonable(self.residual),
        }
        if timing:
            rec["runtime_ms"] = self.runtime_ms
        return rec

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_record(timing), sort_keys=True)


def exact_verdict(check: str, params: dict, residual) -> Verdict:
    """Pass iff ``residual`` is exactly zero (any zero-testable object)."""
    zero = (not residual) if not isinstance(residual, (int, Fraction)) else residual == 0
    res = "0" if zero else _residual_str(residual)
    return Verdict(check, params, PASS if zero else FAIL, res)


def tolerance_verdict(check: str, params: dict, err: float, tol: float) -> Verdict:
    return Verdict(check, params, PASS if err <= tol else FAIL, float(err))


def _residual_str(r) -> str:
    if hasattr(r, "terms"):  # HeckeElement
        return f"{len(r.terms)} nonzero terms, e.g. {r!r}"
    if isinstance(r, Fraction):
        return format_rational(r)
    return str(r)


@contextmanager
def timed(verdicts: list):
    """Stamp ``runtime_ms`` on every verdict appended inside the block."""
    start = len(verdicts)
    t0 = time.perf_counter()
    yield
    ms = int(round((time.perf_counter() - t0) * 1000))
    for v in verdicts[start:]:
        v.runtime_ms = ms
