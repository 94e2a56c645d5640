"""Verdict records and the decision rules they use."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

SCHEMA_VERSION = 1

# Decision rules, recorded verbatim in every verdict.
UPPER_3SE = "empirical <= bound + 3*stderr"
EST_MINUS_2SE = "empirical - 2*stderr <= bound"
EXACT_UPPER = "empirical <= bound"
INTERVAL = "lower <= empirical <= bound"
CLOSE_5SE = "|empirical - bound| <= 5*stderr"
REL_CLOSE = "|empirical - bound| <= rtol*|bound|"
LOWER = "empirical >= bound"
INFO = "informational"

PASS, FAIL, INFO_VERDICT = "pass", "fail", "info"


def _clean(x):
    if x is None:
        return None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_clean(v) for v in x]
    return x


@dataclass
class Verdict:
    check: str
    params: dict
    empirical: float
    bound: float | None
    stderr: float | None
    rule: str
    verdict: str
    suite: str = ""
    seed: int | None = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict != FAIL

    def record(self) -> dict:
        """Stable JSON-ready mapping in the verdict-line schema."""
        out = {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "check": self.check,
            "params": _clean(self.params),
            "empirical": _clean(self.empirical),
            "bound": _clean(self.bound),
            "stderr": _clean(self.stderr),
            "rule": self.rule,
            "verdict": self.verdict,
            "seed": self.seed,
        }
        if self.note:
            out["note"] = self.note
        return out


def binomial_stderr(estimate: float, n: int) -> float:
    return math.sqrt(max(estimate * (1.0 - estimate), 0.0) / n)


def upper(check, params, empirical, bound, stderr, slack=3.0, note=""):
    """Empirical quantity must sit below a proven bound, up to ``slack`` SEs."""
    ok = empirical <= bound + slack * stderr
    rule = UPPER_3SE if slack == 3.0 else f"empirical <= bound + {slack:g}*stderr"
    return Verdict(check, params, empirical, bound, stderr, rule, PASS if ok else FAIL, note=note)


def est_minus_2se(check, params, empirical, bound, stderr, note=""):
    ok = empirical - 2.0 * stderr <= bound
    return Verdict(check, params, empirical, bound, stderr, EST_MINUS_2SE, PASS if ok else FAIL, note=note)


def exact_upper(check, params, empirical, bound, note=""):
    ok = empirical <= bound
    return Verdict(check, params, empirical, bound, None, EXACT_UPPER, PASS if ok else FAIL, note=note)


def exact_lower(check, params, empirical, bound, note=""):
    ok = empirical >= bound
    return Verdict(check, params, empirical, bound, None, LOWER, PASS if ok else FAIL, note=note)


def interval(check, params, empirical, lower, bound, note=""):
    ok = lower <= empirical <= bound
    params = dict(params, lower=lower)
    return Verdict(check, params, empirical, bound, None, INTERVAL, PASS if ok else FAIL, note=note)


def close_5se(check, params, empirical, target, stderr, note=""):
    ok = abs(empirical - target) <= 5.0 * stderr
    return Verdict(check, params, empirical, target, stderr, CLOSE_5SE, PASS if ok else FAIL, note=note)


def rel_close(check, params, empirical, target, rtol, note=""):
    ok = abs(empirical - target) <= rtol * abs(target)
    params = dict(params, rtol=rtol)
    return Verdict(check, params, empirical, target, None, REL_CLOSE, PASS if ok else FAIL, note=note)


def info(check, params, empirical, bound=None, stderr=None, note=""):
    return Verdict(check, params, empirical, bound, stderr, INFO, INFO_VERDICT, note=note)


@dataclass
class NormSummary:
    mean: float
    stderr: float
    quantiles: dict[float, float]


@dataclass
class ErrorReport:
    mechanism: dict
    trials: int
    seed: int | None
    summaries: dict[str, NormSummary] = field(default_factory=dict)
    bound_verdicts: list[Verdict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return _clean({
            "mechanism": self.mechanism,
            "trials": self.trials,
            "seed": self.seed,
            "summaries": {k: asdict(v) for k, v in self.summaries.items()},
            "bound_verdicts": [v.record() for v in self.bound_verdicts],
        })
