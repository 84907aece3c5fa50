"""Command line interface: ``pfds <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 audit
violation under ``--strict-audits``.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import datasets, mdscore, oracle1d, runfile
from .align import match_configurations
from .diagnostics import cfds_certificate, check_uni, gower_rank, lambda_bound
from .errors import PfdsError, ValidationError
from .plot import plot_1d, plot_2d
from .solver import SolverSettings, solve_penalized
from .trajectory import (
    DEFAULT_CUT,
    LambdaSchedule,
    audit_monotonicity,
    log_line,
    run_trajectory,
)

EXIT_AUDIT = 4


def _add_data_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="CSV dissimilarity matrix")
    src.add_argument("--builtin", help="built-in instance: parties or simplex:N")
    p.add_argument("--weights", help="CSV weight matrix (default: all ones)")
    p.add_argument("--transform", help="dissimilarity transform, e.g. neg_log or subtract:0.1")
    p.add_argument("--symmetrize", action="store_true", help="average asymmetric input")


def _add_norm_args(p: argparse.ArgumentParser, default_on: bool) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--normalize", action="store_true", help="scale so that sum(w*delta^2)/4 = 1")
    g.add_argument("--raw", action="store_true", help="keep dissimilarities as given")
    p.set_defaults(normalize_default=default_on)


def _builtin(name: str):
    kind, _, arg = name.partition(":")
    if kind == "parties" and not arg:
        return datasets.parties()
    if kind == "simplex":
        try:
            return datasets.simplex(int(arg))
        except ValueError:
            raise ValidationError("use simplex:N with an integer N") from None
    raise ValidationError(f"unknown built-in {name!r}; use parties or simplex:N")


def _load_problem(args) -> tuple[mdscore.MdsProblem, str]:
    if args.builtin:
        problem, name = _builtin(args.builtin), f"builtin:{args.builtin}"
        if args.weights:
            w, _ = datasets.read_matrix(args.weights, symmetrize=args.symmetrize)
            problem = mdscore.MdsProblem(problem.dissim, w, problem.labels)
    else:
        problem = datasets.read_problem(args.data, args.weights, symmetrize=args.symmetrize)
        name = args.data
    if args.transform:
        kind, const = datasets.parse_transform(args.transform)
        delta = datasets.apply_transform(problem.dissim, kind, const)
        problem = mdscore.MdsProblem(delta, problem.weights, problem.labels)
        name = f"{name}|{args.transform}"
    return problem, name


def _maybe_normalize(args, problem):
    on = args.normalize or (args.normalize_default and not args.raw)
    return (mdscore.normalize(problem), True) if on else (problem, False)


def _cmd_solve(args) -> int:
    problem, _ = _load_problem(args)
    problem, _ = _maybe_normalize(args, problem)
    settings = SolverSettings(p=args.p, lam=args.lam, itmax=args.itmax, eps=args.eps)
    result = solve_penalized(problem, settings)
    print(log_line(result))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({
                "lambda": result.lam, "itel": result.itel, "stress": result.stress,
                "penalty": result.penalty, "converged": result.converged,
                "labels": list(problem.labels),
                "x": result.x.tolist(), "z": result.z.tolist(),
            }, fh)
            fh.write("\n")
    return 0


def _cmd_trajectory(args) -> int:
    problem, name = _load_problem(args)
    problem, normalized = _maybe_normalize(args, problem)
    schedule = LambdaSchedule.parse(args.lambdas)
    record = run_trajectory(
        problem, schedule, args.p, args.cut, itmax=args.itmax, eps=args.eps,
        callback=lambda r: print(log_line(r), flush=True),
    )
    if args.out:
        runfile.write_run(args.out, problem, record, name, normalized)
    if not all(r.converged for r in record.results):
        print("warning: itmax reached in at least one solve", file=sys.stderr)
    report = audit_monotonicity(record)
    for v in report.violations:
        lam = record.results[v.index].lam
        print(f"audit: {v.relation} relation violated after lambda {lam:g} "
              f"by {v.magnitude:.3e}", file=sys.stderr)
    if args.strict_audits and not report.ok:
        return EXIT_AUDIT
    return 0


def _cmd_oracle(args) -> int:
    problem, _ = _load_problem(args)
    problem, _ = _maybe_normalize(args, problem)
    t0 = time.perf_counter()
    res = oracle1d.global_min_1d(
        problem, args.max_n, count_local_minima=args.count_local_minima, workers=args.workers
    )
    elapsed = time.perf_counter() - t0
    order = [problem.labels[i] for i in res.best_order]
    print(f"best stress {res.best_stress:.6f}")
    print("best order " + " ".join(order))
    print("best x " + " ".join(f"{v:.6f}" for v in res.best_x))
    print(f"orders enumerated {res.enumerated} (up to reflection) in {elapsed:.2f} s")
    if args.count_local_minima:
        print(f"local minima {res.local_min_count} up to reflection, "
              f"{res.local_min_count_with_reflections} counting reflections; "
              f"orders with ties {res.tied_orders}")
    return 0


def _cmd_diagnose(args) -> int:
    problem, record, meta = runfile.read_run(args.run)
    first, last = record.results[0], record.results[-1]
    rank = gower_rank(first.z)
    print(f"run {args.run}: dataset {meta['dataset']}, n {problem.n}, p {record.p}, "
          f"{len(record.results)} solves")
    print("singular values " + " ".join(f"{s:.2e}" for s in rank.singular_values))
    print(f"gower rank {rank.gower_rank} (tol {rank.tol:g}), "
          f"approximate rank {rank.approximate_rank} (tol {rank.approximate_tol:g})")
    if first.lam == 0:
        cert = cfds_certificate(problem, first.z, args.tol)
        print(f"certificate at lambda 0: min eigenvalue {cert.min_eigenvalue:.3e}, "
              f"complementarity {cert.complementarity:.3e}, {cert.verdict}")
    else:
        print("certificate: first solve is not at lambda 0, skipped")
    print(f"lambda bound at final x: {lambda_bound(problem, last.x):.6f}")
    lp = record.lambda_plus
    print("lambda plus " + (f"{lp:.6f}" if lp is not None else "not reached"))
    if record.p == 1:
        try:
            _, dev = check_uni(problem, last.x[:, 0])
            print(f"check_uni max deviation {dev:.3e}")
        except ValidationError as exc:
            print(f"check_uni: {exc}")
    report = audit_monotonicity(record)
    print(f"audit: {len(report.violations)} violations over {report.pairs_checked} pairs")
    return 0


def _dims(text: str) -> tuple:
    try:
        dims = tuple(int(v) - 1 for v in text.split(","))
    except ValueError:
        raise ValidationError(f"bad --dims {text!r}") from None
    if len(dims) != 2 or min(dims) < 0:
        raise ValidationError("--dims takes two 1-based column numbers, e.g. 1,2")
    return dims


def _cmd_align(args) -> int:
    problem, record, _ = runfile.read_run(args.run)
    cols = list(_dims(args.dims)) if record.p >= 2 else [0]
    if max(cols) >= record.p:
        raise ValidationError(f"--dims exceed p={record.p}")
    aset = match_configurations([r.x[:, cols] for r in record.results])
    out = {
        "labels": list(problem.labels),
        "lambdas": [r.lam for r in record.results],
        "iterations": aset.iterations,
        "final_fit": aset.final_fit,
        "configs": [c.tolist() for c in aset.configs],
    }
    text = json.dumps(out) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_plot(args) -> int:
    problem, record, _ = runfile.read_run(args.run)
    if args.index or record.p == 1:
        svg = plot_1d(record, problem.labels)
    else:
        svg = plot_2d(record, problem.labels, _dims(args.dims))
    with open(args.svg, "w") as fh:
        fh.write(svg)
    return 0


def _cmd_dataset(args) -> int:
    problem, _ = _load_problem(args)
    if args.out:
        datasets.write_matrix(args.out, problem.dissim, problem.labels)
    else:
        width = max(len(s) for s in problem.labels)
        print(" " * width + " " + " ".join(f"{s:>6}" for s in problem.labels))
        for label, row in zip(problem.labels, problem.dissim):
            print(f"{label:<{width}} " + " ".join(f"{v:6.3f}" for v in row))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfds",
        description="Penalized full-dimensional multidimensional scaling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="one penalized solve at a fixed lambda")
    _add_data_args(p)
    _add_norm_args(p, True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--itmax", type=int, default=10000)
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--out", help="write the result as JSON")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("trajectory", help="solve along a lambda schedule")
    _add_data_args(p)
    _add_norm_args(p, True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--lambdas", default="lin:0:1:101",
                   help="lin:a:b:count, geo:start:factor:count or list:v1,v2,...")
    p.add_argument("--cut", type=float, default=DEFAULT_CUT)
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--itmax", type=int, default=10000)
    p.add_argument("--out", help="JSON-lines run file")
    p.add_argument("--strict-audits", action="store_true",
                   help="exit with status 4 on monotonicity audit violations")
    p.set_defaults(func=_cmd_trajectory)

    p = sub.add_parser("oracle", help="exact one-dimensional global minimum")
    _add_data_args(p)
    _add_norm_args(p, False)
    p.add_argument("--count-local-minima", action="store_true")
    p.add_argument("--max-n", type=int, default=oracle1d.DEFAULT_MAX_N)
    p.add_argument("--workers", type=int, default=None,
                   help="threads (default: PFDS_THREADS or 1)")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("diagnose", help="rank, certificate and lambda bound of a run")
    p.add_argument("--run", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("align", help="Procrustes-aligned configurations of a run")
    p.add_argument("--run", required=True)
    p.add_argument("--dims", default="1,2")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("plot", help="SVG figure of a run")
    p.add_argument("--run", required=True)
    p.add_argument("--svg", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--dims", default="1,2")
    g.add_argument("--index", action="store_true", help="one-dimensional index plot")
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("dataset", help="print or export a (transformed) matrix")
    _add_data_args(p)
    p.add_argument("--out", help="write CSV with 17 significant digits")
    p.set_defaults(func=_cmd_dataset)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PfdsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ValidationError.exit_code


if __name__ == "__main__":
    sys.exit(main())
