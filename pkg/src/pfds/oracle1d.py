"""Exact unidimensional scaling by enumerating point orders.

For a fixed order of the points on the line the signs ``sign(x_i - x_j)``
are constants, stress is a convex quadratic in ``x``, and its minimizer is
``x = V^+ u`` with ``u_i = sum_j w_ij delta_ij sign(x_i - x_j)``. The global
minimum is the best of these over all orders; an order is a strict local
minimum when its ``x`` actually lies in that order.

Orders and their reversals give mirrored solutions, so only orders whose
first element is smaller than their last are enumerated.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import mdscore
from .errors import ValidationError
from .mdscore import MdsProblem

DEFAULT_MAX_N = 10
CHUNK = 20000
TIE_TOL = 1e-12


@dataclass(frozen=True)
class OracleResult:
    best_order: tuple
    best_x: np.ndarray
    best_stress: float
    enumerated: int
    local_min_count: int | None = None
    tied_orders: int | None = None

    @property
    def local_min_count_with_reflections(self) -> int | None:
        return None if self.local_min_count is None else 2 * self.local_min_count


@dataclass(frozen=True)
class _Context:
    n: int
    wd: np.ndarray
    w: np.ndarray
    delta: np.ndarray
    vinv: np.ndarray


def _context(problem: MdsProblem) -> _Context:
    vinv = mdscore.v_pseudoinverse(mdscore.build_v(problem))
    return _Context(problem.n, problem.weights * problem.dissim, problem.weights, problem.dissim, vinv)


def _evaluate(ctx: _Context, orders: np.ndarray):
    """Optimal coordinates and stress for a batch of orders (rows)."""
    b, n = orders.shape
    rank = np.empty_like(orders)
    np.put_along_axis(rank, orders, np.broadcast_to(np.arange(n), (b, n)), axis=1)
    sign = np.sign(rank[:, :, None] - rank[:, None, :]).astype(float)
    u = np.einsum("bij,ij->bi", sign, ctx.wd)
    x = u @ ctx.vinv
    d = np.abs(x[:, :, None] - x[:, None, :])
    s = np.einsum("bij,ij->b", (ctx.delta - d) ** 2, ctx.w) / 4
    return x, s


def _classify(x: np.ndarray, orders: np.ndarray):
    """Boolean masks (strict local minimum, tied) for a batch."""
    gaps = np.diff(np.take_along_axis(x, orders, axis=1), axis=1)
    scale = np.max(np.abs(x), axis=1, keepdims=True)
    tol = TIE_TOL * np.maximum(scale, np.finfo(float).tiny)
    tied = np.any(np.abs(gaps) <= tol, axis=1)
    strict = np.all(gaps > tol, axis=1)
    return strict, tied


def _orders_starting_with(n: int, first: int):
    """Lexicographic orders beginning with ``first`` and ending above it."""
    rest = [i for i in range(n) if i != first]
    for tail in itertools.permutations(rest):
        if tail[-1] > first:
            yield (first,) + tail


def _scan_block(ctx: _Context, first: int, census: bool):
    best_s, best_order = np.inf, None
    count = ties = enumerated = 0
    gen = _orders_starting_with(ctx.n, first)
    while True:
        chunk = list(itertools.islice(gen, CHUNK))
        if not chunk:
            break
        orders = np.array(chunk, dtype=np.intp)
        x, s = _evaluate(ctx, orders)
        enumerated += len(chunk)
        k = int(np.argmin(s))
        if s[k] < best_s:
            best_s, best_order = float(s[k]), chunk[k]
        if census:
            strict, tied = _classify(x, orders)
            count += int(strict.sum())
            ties += int(tied.sum())
    return best_s, best_order, count, ties, enumerated


def _workers(workers: int | None) -> int:
    if workers is None:
        try:
            workers = int(os.environ.get("PFDS_THREADS", "1"))
        except ValueError:
            workers = 1
    return max(1, workers)


def _check_size(problem: MdsProblem, max_n: int) -> None:
    if problem.n > max_n:
        raise ValidationError(
            f"instance too large for exhaustive oracle: n={problem.n} > max_n={max_n}"
        )
    if problem.n < 2:
        raise ValidationError("need at least two points")


def best_coords_for_order(problem: MdsProblem, order) -> tuple[np.ndarray, float]:
    """Optimal coordinates and stress when the points lie in ``order``.

    ``order`` lists point indices from left to right.
    """
    order = np.asarray(order, dtype=np.intp)
    if sorted(order.tolist()) != list(range(problem.n)):
        raise ValidationError(f"not a permutation of 0..{problem.n - 1}: {order.tolist()}")
    x, s = _evaluate(_context(problem), order[None, :])
    return x[0], float(s[0])


def _scan(problem: MdsProblem, max_n: int, census: bool, workers: int | None):
    _check_size(problem, max_n)
    ctx = _context(problem)
    firsts = range(problem.n - 1)  # the first element must be below the last
    nw = _workers(workers)
    if nw > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            blocks = list(pool.map(lambda f: _scan_block(ctx, f, census), firsts))
    else:
        blocks = [_scan_block(ctx, f, census) for f in firsts]
    best_s, best_order = np.inf, None
    count = ties = enumerated = 0
    for s, order, c, t, e in blocks:
        if order is not None and s < best_s:
            best_s, best_order = s, order
        count += c
        ties += t
        enumerated += e
    return best_s, best_order, count, ties, enumerated


def global_min_1d(
    problem: MdsProblem,
    max_n: int = DEFAULT_MAX_N,
    *,
    count_local_minima: bool = False,
    workers: int | None = None,
) -> OracleResult:
    """Exhaustive global minimum of one-dimensional stress.

    Enumerates ``n!/2`` orders. ``workers`` (default: ``PFDS_THREADS`` or 1)
    splits the work by first element; the result does not depend on it.
    """
    best_s, best_order, count, ties, enumerated = _scan(
        problem, max_n, count_local_minima, workers
    )
    x, _ = best_coords_for_order(problem, best_order)
    return OracleResult(
        best_order=tuple(int(i) for i in best_order),
        best_x=x,
        best_stress=best_s,
        enumerated=enumerated,
        local_min_count=count if count_local_minima else None,
        tied_orders=ties if count_local_minima else None,
    )


@dataclass(frozen=True)
class LocalMinimaCensus:
    count: int
    tied_orders: int
    enumerated: int

    @property
    def count_with_reflections(self) -> int:
        return 2 * self.count


def count_local_minima_1d(
    problem: MdsProblem, max_n: int = DEFAULT_MAX_N, *, workers: int | None = None
) -> LocalMinimaCensus:
    """Number of orders, up to reflection, that are strict local minima.

    Orders whose optimal coordinates contain ties are left out of the count
    and reported in ``tied_orders``.
    """
    _, _, count, ties, enumerated = _scan(problem, max_n, True, workers)
    return LocalMinimaCensus(count, ties, enumerated)
