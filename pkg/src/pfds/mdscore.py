"""Stress, penalty and the matrices of the SMACOF majorization.

Conventions
-----------
Weights ``W`` and dissimilarities ``Delta`` are stored as full symmetric,
hollow ``n x n`` arrays. Stress and the penalty term are computed as
full-matrix sums divided by 4, which equals the usual half sum over pairs
``i < j``::

    stress  = sum(W * (Delta - D)**2) / 4
    penalty = sum(V * Y @ Y.T) / 4 = tr(Y' V Y) / 4

where ``Y`` holds the trailing columns of a configuration.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, ValidationError


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MdsProblem:
    """Weights, dissimilarities and point labels of one MDS instance.

    Both matrices must be square, exactly symmetric, exactly hollow and
    nonnegative. Strict positivity of the off-diagonal entries is only
    required by the solver and checked there.
    """

    dissim: np.ndarray
    weights: np.ndarray = None
    labels: tuple = field(default=None)

    def __post_init__(self):
        delta = _frozen(self.dissim)
        if delta.ndim != 2 or delta.shape[0] != delta.shape[1]:
            raise ValidationError(f"matrix not square: shape {delta.shape}")
        n = delta.shape[0]
        if n < 2:
            raise ValidationError("need at least two points")
        w = np.ones((n, n)) - np.eye(n) if self.weights is None else self.weights
        w = _frozen(w)
        if w.shape != delta.shape:
            raise ValidationError(
                f"weights shape {w.shape} does not match dissimilarities {delta.shape}"
            )
        for name, a in (("dissimilarities", delta), ("weights", w)):
            if not np.all(np.isfinite(a)):
                raise ValidationError(f"{name} contain non-finite entries")
            if np.any(a != a.T):
                i, j = np.argwhere(a != a.T)[0]
                raise ValidationError(f"{name} not symmetric at ({i}, {j})")
            if np.any(np.diag(a) != 0):
                raise ValidationError(f"{name} not hollow: nonzero diagonal")
            if np.any(a < 0):
                i, j = np.argwhere(a < 0)[0]
                raise ValidationError(f"{name} negative at ({i}, {j}): {a[i, j]}")
        labels = self.labels
        if labels is None:
            labels = tuple(str(i + 1) for i in range(n))
        labels = tuple(str(s) for s in labels)
        if len(labels) != n:
            raise ValidationError(f"expected {n} labels, got {len(labels)}")
        object.__setattr__(self, "dissim", delta)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.dissim.shape[0]

    def require_positive(self) -> None:
        """Raise unless all off-diagonal weights and dissimilarities are > 0."""
        off = ~np.eye(self.n, dtype=bool)
        if np.any(self.weights[off] <= 0):
            raise ValidationError("solver requires strictly positive off-diagonal weights")
        if np.any(self.dissim[off] <= 0):
            raise ValidationError(
                "solver requires strictly positive off-diagonal dissimilarities"
            )


def normalize(problem: MdsProblem) -> MdsProblem:
    """Rescale the dissimilarities so that ``sum(W * Delta**2) / 4 == 1``."""
    eta2 = np.sum(problem.weights * problem.dissim**2) / 4
    if eta2 <= 0:
        raise ValidationError("cannot normalize: all weighted dissimilarities are zero")
    scale = 1.0 / np.sqrt(eta2)
    return MdsProblem(problem.dissim * scale, problem.weights, problem.labels)


def build_v(problem: MdsProblem) -> np.ndarray:
    """The weighted Laplacian ``V``: ``-w_ij`` off the diagonal, row sums on it."""
    v = -np.array(problem.weights)
    np.fill_diagonal(v, 0.0)
    np.fill_diagonal(v, -v.sum(axis=1))
    return v


def v_pseudoinverse(v: np.ndarray) -> np.ndarray:
    """Moore-Penrose inverse of a connected weighted Laplacian.

    Uses ``(V + J/n)^{-1} - J/n``, valid because the null space of ``V`` is
    spanned by the constant vector when the weight graph is connected.
    """
    n = v.shape[0]
    shifted = v + 1.0 / n
    # rank n-1 Laplacian => shifted matrix is well conditioned
    if np.linalg.cond(shifted) > 1e12:
        raise ValidationError("disconnected weight graph")
    try:
        inv = np.linalg.inv(shifted)
    except np.linalg.LinAlgError:
        raise ValidationError("disconnected weight graph") from None
    vinv = inv - 1.0 / n
    return (vinv + vinv.T) / 2


def distances(z: np.ndarray) -> np.ndarray:
    """Euclidean distances between the rows of ``z``."""
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        z = z[:, None]
    diff = z[:, None, :] - z[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def stress(problem: MdsProblem, dist: np.ndarray) -> float:
    return float(np.sum(problem.weights * (problem.dissim - dist) ** 2) / 4)


def penalty_term(z: np.ndarray, p: int, v: np.ndarray) -> float:
    """``tr(Y' V Y) / 4`` for ``Y`` the columns of ``z`` after the first ``p``."""
    y = np.asarray(z)[:, p:]
    return float(np.sum(v * (y @ y.T)) / 4)


def penalized_stress(stress_value: float, penalty_value: float, lam: float) -> float:
    return stress_value + lam * penalty_value


def build_b(problem: MdsProblem, dist: np.ndarray) -> np.ndarray:
    """``B(Z)``; coincident points (zero distance) contribute nothing."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(dist > 0, problem.dissim / dist, 0.0)
    b = -problem.weights * ratio
    np.fill_diagonal(b, 0.0)
    np.fill_diagonal(b, -b.sum(axis=1))
    return b


def guttman_update(z: np.ndarray, b: np.ndarray, vinv: np.ndarray) -> np.ndarray:
    """One Guttman transform ``V^+ B(Z) Z``."""
    return vinv @ (b @ z)


def gradient(problem: MdsProblem, z: np.ndarray) -> np.ndarray:
    """Gradient ``(V - B(Z)) Z`` of stress at a configuration with distinct rows."""
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        z = z[:, None]
    d = distances(z)
    off = ~np.eye(problem.n, dtype=bool)
    if np.any(d[off] == 0):
        raise ValidationError("nondifferentiable point: coincident rows in configuration")
    return (build_v(problem) - build_b(problem, d)) @ z


def symmetric_eigen(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and matching orthonormal eigenvectors."""
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise NumericalError("non-finite entries in eigenproblem")
    try:
        evals, evecs = np.linalg.eigh((m + m.T) / 2)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symmetric eigensolver failed: {exc}") from None
    return evals[::-1], evecs[:, ::-1]


def thin_svd(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``m = U diag(s) Vt`` with ``s`` descending."""
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise NumericalError("non-finite entries in SVD input")
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from None
    return u, s, vt


def column_center(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return z - z.mean(axis=0)
