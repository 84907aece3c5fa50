"""Built-in instances, dissimilarity transforms and CSV matrix I/O.

CSV dialect: comma separated, ``.`` decimal point, an optional header row of
labels and an optional leading label column. Written values use 17
significant digits so that reading them back is exact.
"""
from __future__ import annotations

import csv
import enum
import io
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from .errors import ValidationError
from .mdscore import MdsProblem

PARTY_LABELS = ("KVP", "PvdA", "VVD", "ARP", "CHU", "CPN", "PSP", "BP", "D66")

# Averaged judged dissimilarities between nine Dutch parties.
PARTY_DISSIM = (
    (0.000, 0.209, 0.196, 0.171, 0.179, 0.281, 0.250, 0.267, 0.230),
    (0.209, 0.000, 0.250, 0.210, 0.231, 0.190, 0.171, 0.269, 0.204),
    (0.196, 0.250, 0.000, 0.203, 0.185, 0.302, 0.281, 0.257, 0.174),
    (0.171, 0.210, 0.203, 0.000, 0.119, 0.292, 0.250, 0.271, 0.228),
    (0.179, 0.231, 0.185, 0.119, 0.000, 0.290, 0.263, 0.259, 0.225),
    (0.281, 0.190, 0.302, 0.292, 0.290, 0.000, 0.152, 0.236, 0.276),
    (0.250, 0.171, 0.281, 0.250, 0.263, 0.152, 0.000, 0.256, 0.237),
    (0.267, 0.269, 0.257, 0.271, 0.259, 0.236, 0.256, 0.000, 0.274),
    (0.230, 0.204, 0.174, 0.228, 0.225, 0.276, 0.237, 0.274, 0.000),
)

SYMMETRY_TOL = 1e-9


def simplex(n: int) -> MdsProblem:
    """Regular simplex: all dissimilarities and weights equal to one."""
    if n < 3:
        raise ValidationError(f"simplex needs n >= 3, got {n}")
    ones = np.ones((n, n)) - np.eye(n)
    return MdsProblem(ones, ones)


def parties() -> MdsProblem:
    """The nine Dutch political parties of 1967."""
    return MdsProblem(np.array(PARTY_DISSIM), labels=PARTY_LABELS)


class TransformKind(enum.Enum):
    ONE_MINUS = "one_minus"
    ONE_MINUS_CUBED = "one_minus_cubed"
    NEG_LOG = "neg_log"
    SEVEN_MINUS = "seven_minus"
    ABS_NORM_QUANTILE = "abs_norm_quantile"
    SUBTRACT_CONSTANT = "subtract_constant"


def parse_transform(text: str) -> tuple[TransformKind, float | None]:
    """Parse ``kind`` or ``subtract_constant:c`` (alias ``subtract:c``)."""
    name, _, arg = text.partition(":")
    if name == "subtract":
        name = TransformKind.SUBTRACT_CONSTANT.value
    try:
        kind = TransformKind(name)
    except ValueError:
        choices = ", ".join(k.value for k in TransformKind)
        raise ValidationError(f"unknown transform {name!r}; choose from {choices}") from None
    if kind is TransformKind.SUBTRACT_CONSTANT:
        try:
            return kind, float(arg)
        except ValueError:
            raise ValidationError("subtract_constant needs a numeric argument, e.g. subtract:0.1") from None
    if arg:
        raise ValidationError(f"transform {name!r} takes no argument")
    return kind, None


def _domain_error(a: np.ndarray, bad: np.ndarray, kind: TransformKind, why: str):
    i, j = np.argwhere(bad)[0]
    raise ValidationError(f"{kind.value}: entry ({i}, {j}) = {a[i, j]!r} {why}")


def apply_transform(matrix, kind: TransformKind | str, constant: float | None = None) -> np.ndarray:
    """Elementwise transform of similarities (or dissimilarities).

    Only off-diagonal entries are checked and transformed; the diagonal of
    the result is set to zero. Entries whose image would be negative, or lie
    outside the function's domain, raise :class:`ValidationError`.
    """
    kind = TransformKind(kind)
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"matrix not square: shape {a.shape}")
    off = ~np.eye(a.shape[0], dtype=bool)
    vals = np.where(off, a, 0.5)  # placeholder inside every domain
    if kind is TransformKind.ONE_MINUS:
        bad = off & (a > 1)
        if bad.any():
            _domain_error(a, bad, kind, "exceeds 1")
        out = 1.0 - vals
    elif kind is TransformKind.ONE_MINUS_CUBED:
        bad = off & (a > 1)
        if bad.any():
            _domain_error(a, bad, kind, "exceeds 1")
        out = (1.0 - vals) ** 3
    elif kind is TransformKind.NEG_LOG:
        bad = off & ~((a > 0) & (a <= 1))
        if bad.any():
            _domain_error(a, bad, kind, "is outside (0, 1]")
        out = -np.log(vals)
    elif kind is TransformKind.SEVEN_MINUS:
        bad = off & (a > 7)
        if bad.any():
            _domain_error(a, bad, kind, "exceeds 7")
        out = 7.0 - vals
    elif kind is TransformKind.ABS_NORM_QUANTILE:
        bad = off & ~((a > 0) & (a < 1))
        if bad.any():
            _domain_error(a, bad, kind, "is outside (0, 1)")
        out = np.abs(ndtri(vals))
    else:
        if constant is None:
            raise ValidationError("subtract_constant needs a constant")
        bad = off & (a < constant)
        if bad.any():
            _domain_error(a, bad, kind, f"is smaller than the constant {constant}")
        out = vals - constant
    if not np.all(np.isfinite(out)):
        _domain_error(a, ~np.isfinite(out), kind, "maps to a non-finite value")
    out = np.where(off, out, 0.0)
    # elementwise maps keep symmetric inputs symmetric; enforce it bitwise
    return np.triu(out) + np.triu(out, 1).T


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_matrix(path, symmetrize: bool = False) -> tuple[np.ndarray, tuple | None]:
    """Read a square CSV matrix and its labels (``None`` when absent).

    Gaps ``|a_ij - a_ji|`` up to 1e-9 are averaged away silently; larger
    gaps raise unless ``symmetrize`` is set. The diagonal must be zero.
    """
    text = Path(path).read_text()
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValidationError(f"{path}: empty matrix file")
    rows = [[c.strip() for c in r] for r in rows]
    header = None
    if not all(_is_number(c) for c in rows[0][1:] if c):
        header = rows[0]
        rows = rows[1:]
    row_labels = None
    if rows and not all(_is_number(r[0]) for r in rows):
        row_labels = [r[0] for r in rows]
        rows = [r[1:] for r in rows]
        if header is not None and len(header) == len(rows[0]) + 1:
            header = header[1:]
    try:
        a = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise ValidationError(f"{path}: non-numeric entry ({exc})") from None
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        shape = a.shape if a.ndim == 2 else (len(rows), "ragged")
        raise ValidationError(f"{path}: matrix not square: shape {shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{path}: non-finite entry")
    if np.any(a < 0):
        i, j = np.argwhere(a < 0)[0]
        raise ValidationError(f"{path}: negative entry at ({i}, {j}): {a[i, j]}")
    if np.any(np.diag(a) != 0):
        raise ValidationError(f"{path}: nonzero diagonal")
    gap = np.max(np.abs(a - a.T))
    if gap > SYMMETRY_TOL and not symmetrize:
        raise ValidationError(
            f"{path}: matrix not symmetric (max gap {gap:.3g}); pass symmetrize to average"
        )
    if gap > 0:
        a = (a + a.T) / 2
    labels = row_labels if row_labels is not None else header
    if labels is not None:
        if len(labels) != a.shape[0]:
            raise ValidationError(f"{path}: {len(labels)} labels for a {a.shape[0]}x{a.shape[0]} matrix")
        labels = tuple(labels)
    return a, labels


def write_matrix(path, matrix, labels=None) -> None:
    """Write a square matrix as CSV with 17 significant digits."""
    a = np.asarray(matrix, dtype=float)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        if labels is not None:
            out.writerow([""] + list(labels))
        for i, row in enumerate(a):
            cells = [format(float(v), ".17g") for v in row]
            out.writerow(([labels[i]] if labels is not None else []) + cells)


def read_problem(dissim_path, weights_path=None, symmetrize: bool = False) -> MdsProblem:
    """Build a problem from a dissimilarity file and an optional weight file."""
    delta, labels = read_matrix(dissim_path, symmetrize=symmetrize)
    weights = None
    if weights_path is not None:
        weights, _ = read_matrix(weights_path, symmetrize=symmetrize)
        if weights.shape != delta.shape:
            raise ValidationError(
                f"weights {weights.shape} do not match dissimilarities {delta.shape}"
            )
    return MdsProblem(delta, weights, labels)
