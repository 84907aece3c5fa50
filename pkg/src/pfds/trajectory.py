"""Continuation along an increasing lambda schedule.

Each solve is warm-started from the rotated configuration of the previous
one. The run stops after the first lambda whose penalty term falls below the
cutoff, since larger values only repeat that solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import mdscore
from .errors import PfdsError, ValidationError
from .mdscore import MdsProblem
from .solver import SolveResult, SolverSettings, solve_penalized

DEFAULT_CUT = 1e-6
AUDIT_TOL = 1e-9


@dataclass(frozen=True)
class LambdaSchedule:
    values: tuple
    spec: str = ""

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValidationError("empty lambda schedule")
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("lambda schedule contains non-finite values")
        if vals[0] < 0:
            raise ValidationError(f"lambda schedule starts below zero: {vals[0]}")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValidationError("lambda schedule must be strictly increasing")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @classmethod
    def linspace(cls, start: float, end: float, count: int) -> "LambdaSchedule":
        """Inclusive equally spaced values, like ``seq(start, end, length = count)``."""
        if count < 1:
            raise ValidationError("linspace needs count >= 1")
        return cls(np.linspace(start, end, int(count)), f"lin:{start:g}:{end:g}:{count}")

    @classmethod
    def geometric(cls, start: float, factor: float, count: int) -> "LambdaSchedule":
        """``0, start, start*factor, ..., start*factor**(count-1)``."""
        if count < 1 or start <= 0 or factor <= 1:
            raise ValidationError("geometric needs start > 0, factor > 1 and count >= 1")
        vals = [0.0] + [start * factor**k for k in range(int(count))]
        return cls(vals, f"geo:{start:g}:{factor:g}:{count}")

    @classmethod
    def explicit(cls, values: Sequence[float]) -> "LambdaSchedule":
        return cls(values, "list:" + ",".join(f"{v:g}" for v in values))

    @classmethod
    def parse(cls, text: str) -> "LambdaSchedule":
        """Parse ``lin:a:b:count``, ``geo:start:factor:count`` or ``list:v1,v2,...``."""
        kind, _, rest = text.partition(":")
        try:
            if kind == "lin":
                a, b, count = rest.split(":")
                sched = cls.linspace(float(a), float(b), int(count))
            elif kind == "geo":
                a, f, count = rest.split(":")
                sched = cls.geometric(float(a), float(f), int(count))
            elif kind == "list":
                sched = cls.explicit([float(v) for v in rest.split(",") if v.strip()])
            else:
                raise ValidationError(f"unknown schedule kind {kind!r}")
        except ValueError as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed lambda schedule {text!r}") from None
        return cls(sched.values, text)

    def extension(self, count: int) -> tuple:
        """``count`` values past the end, continuing the last step (or ratio)."""
        vals = self.values
        if self.spec.startswith("geo:") and len(vals) >= 3:
            ratio = vals[-1] / vals[-2]
            return tuple(vals[-1] * ratio**k for k in range(1, count + 1))
        step = vals[-1] - vals[-2] if len(vals) >= 2 else max(vals[-1], 1.0)
        return tuple(vals[-1] + step * k for k in range(1, count + 1))


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """Completed solves along a schedule.

    ``stop_index`` is the index of the first result with penalty below
    ``cut``, or of the last result when the cutoff was never reached.
    """

    results: tuple
    schedule: LambdaSchedule
    p: int
    cut: float
    stop_index: int
    lambda_plus: float | None = None
    settings: dict = field(default_factory=dict)

    @property
    def final(self) -> SolveResult:
        return self.results[-1]

    @property
    def stopped_early(self) -> bool:
        return self.lambda_plus is not None


class TrajectoryError(PfdsError):
    """A solver error annotated with the schedule position it occurred at."""

    def __init__(self, index: int, lam: float, cause: PfdsError):
        super().__init__(f"lambda index {index} (lambda={lam:g}): {cause}")
        self.index = index
        self.lam = lam
        self.cause = cause
        self.exit_code = cause.exit_code


def format_log_line(itel: int, lam: float, stress: float, penalty: float) -> str:
    return f"itel {itel:4d} lambda {lam:10.6f} stress {stress:8.6f} penalty {penalty:8.6f}"


def log_line(result: SolveResult) -> str:
    return format_log_line(result.itel, result.lam, result.stress, result.penalty)


def run_trajectory(
    problem: MdsProblem,
    schedule: LambdaSchedule,
    p: int = 2,
    cut: float = DEFAULT_CUT,
    *,
    itmax: int = 10000,
    eps: float = 1e-10,
    z0: np.ndarray | None = None,
    callback: Callable[[SolveResult], None] | None = None,
) -> TrajectoryRecord:
    """Solve along ``schedule`` with warm starts, stopping once penalty < ``cut``.

    ``callback`` is called with every result as soon as it is available.
    """
    if not cut > 0:
        raise ValidationError(f"cutoff must be > 0, got {cut}")
    problem.require_positive()
    v = mdscore.build_v(problem)
    vinv = mdscore.v_pseudoinverse(v)
    results = []
    z = z0
    lambda_plus = None
    for index, lam in enumerate(schedule):
        settings = SolverSettings(p=p, lam=lam, itmax=itmax, eps=eps)
        try:
            result = solve_penalized(problem, settings, z, v=v, vinv=vinv)
        except PfdsError as exc:
            raise TrajectoryError(index, lam, exc) from exc
        results.append(result)
        if callback is not None:
            callback(result)
        z = result.z
        if result.penalty < cut:
            lambda_plus = result.lam
            break
    return TrajectoryRecord(
        results=tuple(results),
        schedule=schedule,
        p=p,
        cut=cut,
        stop_index=len(results) - 1,
        lambda_plus=lambda_plus,
        settings={"itmax": itmax, "eps": eps},
    )


def detect_lambda_plus(record: TrajectoryRecord, cut: float | None = None) -> float | None:
    """Smallest recorded lambda with penalty below ``cut`` (default: the run's)."""
    cut = record.cut if cut is None else cut
    for r in record.results:
        if r.penalty < cut:
            return r.lam
    return None


def continue_trajectory(
    problem: MdsProblem, record: TrajectoryRecord, lambdas: Sequence[float]
) -> tuple:
    """Solve at further ``lambdas`` warm-started from the record's last solution.

    Used to check that the penalty stays below the cutoff past the stop.
    """
    v = mdscore.build_v(problem)
    vinv = mdscore.v_pseudoinverse(v)
    z = record.final.z
    out = []
    for lam in lambdas:
        settings = SolverSettings(
            p=record.p, lam=lam, itmax=record.settings.get("itmax", 10000),
            eps=record.settings.get("eps", 1e-10),
        )
        r = solve_penalized(problem, settings, z, v=v, vinv=vinv)
        out.append(r)
        z = r.z
    return tuple(out)


@dataclass(frozen=True)
class Violation:
    index: int  # first member of the consecutive pair (or the single result for "sandwich")
    relation: str
    magnitude: float


@dataclass(frozen=True)
class AuditReport:
    """Checks of the exterior-penalty monotonicity relations between neighbours.

    Relations: ``penalized`` (lambda_k * tau_k + sigma_k non-decreasing),
    ``penalty`` (tau non-increasing), ``stress`` (sigma non-decreasing) and
    ``sandwich`` (sigma_k <= penalized_k for every solve).
    """

    violations: tuple
    pairs_checked: int
    tol: float

    @property
    def ok(self) -> bool:
        return not self.violations


def audit_monotonicity(record: TrajectoryRecord, tol: float = AUDIT_TOL) -> AuditReport:
    results = record.results
    if len(results) < 2:
        return AuditReport((), 0, tol)
    found = []
    for k, r in enumerate(results):
        if r.stress > r.penalized:
            found.append(Violation(k, "sandwich", r.stress - r.penalized))
    for k, (a, b) in enumerate(zip(results, results[1:])):
        if a.penalized - b.penalized > tol:
            found.append(Violation(k, "penalized", a.penalized - b.penalized))
        if b.penalty - a.penalty > tol:
            found.append(Violation(k, "penalty", b.penalty - a.penalty))
        if a.stress - b.stress > tol:
            found.append(Violation(k, "stress", a.stress - b.stress))
    found.sort(key=lambda v: (v.index, v.relation))
    return AuditReport(tuple(found), len(results) - 1, tol)
