"""Orthogonal Procrustes alignment of a sequence of configurations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .solver import principal_axes_rotation


@dataclass(frozen=True, eq=False)
class AlignmentSet:
    configs: tuple
    iterations: int
    final_fit: float
    fit_history: tuple


def procrustes_rotation(a, target) -> np.ndarray:
    """Orthonormal ``R`` minimizing ``||a R - target||``, from the SVD of ``a' target``."""
    a = np.asarray(a, dtype=float)
    target = np.asarray(target, dtype=float)
    if a.shape != target.shape:
        raise ValidationError(f"shape mismatch: {a.shape} vs {target.shape}")
    u, _, vt = np.linalg.svd(a.T @ target)
    return u @ vt


def _fit(configs, mean) -> float:
    return float(sum(np.sum((c - mean) ** 2) for c in configs))


def match_configurations(configs, itmax: int = 100, eps: float = 1e-10) -> AlignmentSet:
    """Rotate every configuration toward their common mean until the fit settles.

    One sweep rotates each configuration onto the current mean, then
    recomputes the mean. Stops when a sweep lowers the total squared
    deviation by less than ``eps`` or after ``itmax`` sweeps. Finally the
    whole set is rotated so that the mean is in principal axes.
    """
    xs = [np.array(c, dtype=float) for c in configs]
    if len(xs) < 2:
        raise ValidationError("need at least two configurations to align")
    xs = [c[:, None] if c.ndim == 1 else c for c in xs]
    shape = xs[0].shape
    if any(c.shape != shape for c in xs):
        raise ValidationError("configurations differ in shape")
    mean = sum(xs) / len(xs)
    fold = _fit(xs, mean)
    history = [fold]
    itel = 1
    while True:
        xs = [c @ procrustes_rotation(c, mean) for c in xs]
        mean = sum(xs) / len(xs)
        fnew = _fit(xs, mean)
        history.append(fnew)
        if (fold - fnew) < eps or itel == itmax:
            break
        itel += 1
        fold = fnew
    rot = principal_axes_rotation(mean)
    xs = [c @ rot for c in xs]
    return AlignmentSet(tuple(xs), itel, fnew, tuple(history))
