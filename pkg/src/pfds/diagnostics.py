"""Optimality certificates and rank analysis for MDS solutions."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import mdscore
from .errors import ValidationError
from .mdscore import MdsProblem

RANK_TOL = 1e-6
APPROX_RANK_TOL = 1e-2


@dataclass(frozen=True)
class Certificate:
    """Global-minimum test for a full-dimensional solution ``Z``.

    With ``C = Z Z'`` the solution is certified when ``V - B(Z)`` is positive
    semi-definite and ``tr C (V - B(Z)) = 0``, both within ``tol``.
    """

    min_eigenvalue: float
    complementarity: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.min_eigenvalue >= -self.tol and abs(self.complementarity) <= self.tol

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass(frozen=True)
class RankReport:
    singular_values: tuple
    gower_rank: int
    tol: float
    approximate_rank: int
    approximate_tol: float


def _as_columns(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def cfds_certificate(problem: MdsProblem, z, tol: float = 1e-6) -> Certificate:
    z = _as_columns(z)
    m = mdscore.build_v(problem) - mdscore.build_b(problem, mdscore.distances(z))
    evals, _ = mdscore.symmetric_eigen(m)
    complementarity = float(np.sum((z @ z.T) * m))
    return Certificate(float(evals[-1]), complementarity, tol)


def gower_rank(z, tol_rel: float = RANK_TOL, approx_tol_rel: float = APPROX_RANK_TOL) -> RankReport:
    """Count singular values of ``z`` above ``tol_rel`` times the largest."""
    _, s, _ = mdscore.thin_svd(_as_columns(z))
    top = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol_rel * top)) if top > 0 else 0
    approx = int(np.sum(s > approx_tol_rel * top)) if top > 0 else 0
    return RankReport(tuple(float(v) for v in s), rank, tol_rel, approx, approx_tol_rel)


def check_uni(problem: MdsProblem, x) -> tuple[np.ndarray, float]:
    """Fixed-point check ``x == V^+ u`` for a one-dimensional solution.

    ``u_i = sum_j w_ij delta_ij sign(x_i - x_j)``. A local minimum of
    one-dimensional stress satisfies the equation; the returned deviation is
    the largest absolute difference.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != problem.n:
        raise ValidationError(f"expected {problem.n} coordinates, got {x.shape[0]}")
    if np.unique(x).size != x.size:
        raise ValidationError("tie in coordinates")
    sign = np.sign(x[:, None] - x[None, :])
    u = np.sum(problem.weights * problem.dissim * sign, axis=1)
    xhat = mdscore.v_pseudoinverse(mdscore.build_v(problem)) @ u
    return xhat, float(np.max(np.abs(x - xhat)))


def spectral_radius(problem: MdsProblem, x) -> float:
    """Largest eigenvalue of ``V^+ B(X)``.

    ``V^+ B`` is similar to ``S B S`` with ``S`` the symmetric square root of
    ``V^+``, so the symmetric eigensolver applies.
    """
    x = _as_columns(x)
    v = mdscore.build_v(problem)
    vinv = mdscore.v_pseudoinverse(v)
    evals, evecs = mdscore.symmetric_eigen(vinv)
    root = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.T
    b = mdscore.build_b(problem, mdscore.distances(x))
    rho, _ = mdscore.symmetric_eigen(root @ b @ root)
    return float(rho[0])


def lambda_bound(problem: MdsProblem, x, grad_tol: float = 1e-4) -> float:
    """Smallest penalty making ``[X | 0]`` a penalized local minimum.

    Returns ``max(0, rho(V^+ B(X)) - 1)``. Warns when ``X`` is visibly not a
    stationary point, since the bound is only meaningful there.
    """
    x = _as_columns(x)
    try:
        g = mdscore.gradient(problem, x)
    except ValidationError:
        g = None
    if g is not None:
        scale = max(1.0, float(np.max(np.abs(x))))
        if np.max(np.abs(g)) > grad_tol * scale:
            warnings.warn(
                f"configuration is not stationary (max gradient {np.max(np.abs(g)):.2e})",
                stacklevel=2,
            )
    return max(0.0, spectral_radius(problem, x) - 1.0)
