"""Fixed-lambda penalized full-dimensional SMACOF."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import mdscore
from .errors import NumericalError, ValidationError
from .mdscore import MdsProblem


@dataclass(frozen=True)
class SolverSettings:
    """Settings for one penalized solve.

    Parameters
    ----------
    p : int
        Number of leading (unpenalized) dimensions.
    lam : float
        Penalty parameter.
    itmax : int
        Iteration cap. Hitting it is reported, not raised.
    eps : float
        Stop when penalized stress decreases by less than this.
    """

    p: int = 2
    lam: float = 0.0
    itmax: int = 10000
    eps: float = 1e-10

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise ValidationError(f"p must be a positive integer, got {self.p}")
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValidationError(f"lambda must be finite and >= 0, got {self.lam}")
        if int(self.itmax) != self.itmax or self.itmax < 1:
            raise ValidationError(f"itmax must be >= 1, got {self.itmax}")
        if not self.eps > 0:
            raise ValidationError(f"eps must be > 0, got {self.eps}")

    def check(self, n: int) -> None:
        if not self.p < n:
            raise ValidationError(f"p={self.p} must be smaller than n={n}")


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Outcome of :func:`solve_penalized`.

    ``stress`` and ``penalty`` are evaluated on the last iterate before the
    principal-axes rotation; ``z`` is the rotated full configuration and
    ``x`` its first ``p`` columns. ``history`` holds ``(stress, penalty)``
    for the rescaled start and after every iteration. ``converged`` is False
    only when ``itmax`` ended the loop.
    """

    x: np.ndarray
    z: np.ndarray
    lam: float
    stress: float
    penalty: float
    itel: int
    converged: bool = True
    history: tuple = field(default=())

    @property
    def penalized(self) -> float:
        return mdscore.penalized_stress(self.stress, self.penalty, self.lam)

    def majorized_history(self) -> np.ndarray:
        """Per-iterate ``stress + lam * tr(Y'VY) / 2``, the function each step decreases.

        The stored penalty is ``tr(Y'VY) / 4``, hence the factor 2.
        """
        h = np.array(self.history, dtype=float).reshape(-1, 2)
        return h[:, 0] + 2.0 * self.lam * h[:, 1]


def default_start(n: int) -> np.ndarray:
    """Column-centered ``n x n`` identity."""
    return mdscore.column_center(np.eye(n))


def principal_axes_rotation(z: np.ndarray) -> np.ndarray:
    """Orthonormal ``R`` such that ``z @ R`` is in principal axes.

    Column signs make the largest-magnitude entry of each rotated column
    positive.
    """
    z = np.asarray(z, dtype=float)
    _, _, vt = np.linalg.svd(z, full_matrices=True)
    rot = vt.T
    zpri = z @ rot
    rows = np.argmax(np.abs(zpri), axis=0)
    signs = np.sign(zpri[rows, np.arange(zpri.shape[1])])
    signs[signs == 0] = 1.0
    return rot * signs


def principal_axes(z: np.ndarray) -> np.ndarray:
    """Rotate ``z`` so its Gram matrix ``z' z`` is diagonal, largest first."""
    z = np.asarray(z, dtype=float)
    return z @ principal_axes_rotation(z)


def solve_penalized(
    problem: MdsProblem,
    settings: SolverSettings,
    z0: np.ndarray | None = None,
    *,
    v: np.ndarray | None = None,
    vinv: np.ndarray | None = None,
) -> SolveResult:
    """Minimize ``stress + lam * penalty`` from ``z0`` by majorization.

    Each iteration applies the Guttman transform to the full configuration
    and divides the trailing ``n - p`` columns by ``1 + lam``. The start is
    first rescaled by the factor that minimizes stress along the ray through
    it. ``v`` and ``vinv`` may be passed in to avoid recomputation.
    """
    problem.require_positive()
    n = problem.n
    settings.check(n)
    p, lam = settings.p, settings.lam
    if v is None:
        v = mdscore.build_v(problem)
    if vinv is None:
        vinv = mdscore.v_pseudoinverse(v)
    zold = default_start(n) if z0 is None else np.array(z0, dtype=float)
    if zold.shape != (n, n):
        raise ValidationError(f"start configuration must be {n}x{n}, got {zold.shape}")
    if not np.all(np.isfinite(zold)):
        raise ValidationError("start configuration contains non-finite values")
    w, delta = problem.weights, problem.dissim

    dold = mdscore.distances(zold)
    denom = np.sum(w * dold * dold)
    if not denom > 0:
        raise ValidationError("start configuration has all points coincident")
    scale = np.sum(w * delta * dold) / denom
    zold = zold * scale
    dold = dold * scale
    sold = mdscore.stress(problem, dold)
    bold = mdscore.build_b(problem, dold)
    told = mdscore.penalty_term(zold, p, v)
    uold = sold + lam * told
    history = [(sold, told)]

    itel = 1
    while True:
        znew = mdscore.guttman_update(zold, bold, vinv)
        znew[:, p:] /= 1.0 + lam
        if not np.all(np.isfinite(znew)):
            raise NumericalError(f"non-finite configuration at iteration {itel}")
        dnew = mdscore.distances(znew)
        bnew = mdscore.build_b(problem, dnew)
        tnew = mdscore.penalty_term(znew, p, v)
        snew = mdscore.stress(problem, dnew)
        unew = snew + lam * tnew
        history.append((snew, tnew))
        if (uold - unew) < settings.eps or itel == settings.itmax:
            break
        itel += 1
        zold, bold, uold = znew, bnew, unew

    converged = (uold - unew) < settings.eps
    zpri = principal_axes(znew)
    zpri.setflags(write=False)
    x = zpri[:, :p]
    return SolveResult(
        x=x,
        z=zpri,
        lam=float(lam),
        stress=snew,
        penalty=tnew,
        itel=itel,
        converged=bool(converged),
        history=tuple(history),
    )
