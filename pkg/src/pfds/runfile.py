"""JSON-lines trajectory files.

The first line is a metadata object (``"kind": "meta"``) that carries the
problem itself, so a run file is self-describing. Every following line is
one solve (``"kind": "solve"``) with row-major flattened configurations.
Floats are written with ``repr`` precision and read back exactly.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .mdscore import MdsProblem
from .solver import SolveResult
from .trajectory import LambdaSchedule, TrajectoryRecord

FORMAT = "pfds-trajectory"
VERSION = 1


def _flat(a) -> list:
    return [float(v) for v in np.asarray(a, dtype=float).ravel()]


def _frozen(values, shape) -> np.ndarray:
    a = np.array(values, dtype=float).reshape(shape)
    a.setflags(write=False)
    return a


def dump_lines(problem: MdsProblem, record: TrajectoryRecord, dataset: str, normalized: bool) -> list:
    n = problem.n
    meta = {
        "kind": "meta",
        "format": FORMAT,
        "version": VERSION,
        "dataset": dataset,
        "n": n,
        "p": record.p,
        "cut": record.cut,
        "eps": record.settings.get("eps"),
        "itmax": record.settings.get("itmax"),
        "normalized": bool(normalized),
        "schedule": record.schedule.spec,
        "lambdas": list(record.schedule.values),
        "stop_index": record.stop_index,
        "lambda_plus": record.lambda_plus,
        "labels": list(problem.labels),
        "weights": _flat(problem.weights),
        "dissim": _flat(problem.dissim),
    }
    lines = [json.dumps(meta)]
    for i, r in enumerate(record.results):
        lines.append(json.dumps({
            "kind": "solve",
            "index": i,
            "lambda": r.lam,
            "itel": r.itel,
            "stress": r.stress,
            "penalty": r.penalty,
            "converged": r.converged,
            "x": _flat(r.x),
            "z": _flat(r.z),
            "history": [[float(s), float(t)] for s, t in r.history],
        }))
    return lines


def write_run(path, problem: MdsProblem, record: TrajectoryRecord, dataset: str, normalized: bool) -> None:
    Path(path).write_text("\n".join(dump_lines(problem, record, dataset, normalized)) + "\n")


def read_run(path) -> tuple[MdsProblem, TrajectoryRecord, dict]:
    """Load ``(problem, record, meta)`` from a run file."""
    try:
        rows = [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not a JSON-lines run file ({exc})") from None
    if not rows or rows[0].get("kind") != "meta" or rows[0].get("format") != FORMAT:
        raise ValidationError(f"{path}: missing {FORMAT} metadata line")
    meta = rows[0]
    n, p = int(meta["n"]), int(meta["p"])
    problem = MdsProblem(
        _frozen(meta["dissim"], (n, n)), _frozen(meta["weights"], (n, n)), tuple(meta["labels"])
    )
    results = []
    for row in rows[1:]:
        if row.get("kind") != "solve":
            raise ValidationError(f"{path}: unexpected record kind {row.get('kind')!r}")
        results.append(SolveResult(
            x=_frozen(row["x"], (n, p)),
            z=_frozen(row["z"], (n, n)),
            lam=float(row["lambda"]),
            stress=float(row["stress"]),
            penalty=float(row["penalty"]),
            itel=int(row["itel"]),
            converged=bool(row["converged"]),
            history=tuple((float(s), float(t)) for s, t in row["history"]),
        ))
    if not results:
        raise ValidationError(f"{path}: run file has no solves")
    record = TrajectoryRecord(
        results=tuple(results),
        schedule=LambdaSchedule(tuple(meta["lambdas"]), meta["schedule"]),
        p=p,
        cut=float(meta["cut"]),
        stop_index=int(meta["stop_index"]),
        lambda_plus=meta["lambda_plus"],
        settings={"itmax": meta["itmax"], "eps": meta["eps"]},
    )
    return problem, record, meta
