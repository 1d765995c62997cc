"""EDAS ranking (Evaluation based on Distance from Average Solution).

Two orientations are supported. ``mode="shortfall"`` treats a score *below*
the criterion mean as the positive (penalizing) distance, so the best
alternative gets the *lowest* appraisal score. ``mode="canonical"`` is the
textbook method: distance above the mean is positive and the highest
appraisal score wins. In both modes the appraisal score is
``(nsp + nsn) / 2``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FormatError, ShapeError

MODES = ("shortfall", "canonical")


@dataclass
class DecisionMatrix:
    alternatives: list[str]
    criteria: list[str]
    scores: np.ndarray
    weights: np.ndarray
    benefit: np.ndarray  # bool per criterion; False = cost
    fixed_means: np.ndarray | None = None  # NaN entries fall back to the column mean

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.benefit = np.asarray(self.benefit, dtype=bool)
        a, c = len(self.alternatives), len(self.criteria)
        if a < 1 or c < 1:
            raise ShapeError("need at least one alternative and one criterion")
        if self.scores.shape != (a, c):
            raise ShapeError(f"scores shape {self.scores.shape} != ({a}, {c})")
        if self.weights.shape != (c,) or self.benefit.shape != (c,):
            raise ShapeError("weights and criterion kinds must have one entry per criterion")
        if not np.all(np.isfinite(self.scores)):
            raise DomainError("scores must be finite")
        if np.any(self.weights < 0):
            raise DomainError("weights must be >= 0")
        if self.fixed_means is not None:
            self.fixed_means = np.asarray(self.fixed_means, dtype=np.float64)
            if self.fixed_means.shape != (c,):
                raise ShapeError("fixed means must have one entry per criterion")


@dataclass
class EdasResult:
    alternatives: list[str]
    mean: np.ndarray
    pd: np.ndarray
    nd: np.ndarray
    sp: np.ndarray
    sn: np.ndarray
    nsp: np.ndarray
    nsn: np.ndarray
    as_score: np.ndarray
    rank: np.ndarray
    mode: str = "shortfall"


def mean_solution(m: DecisionMatrix) -> np.ndarray:
    mu = m.scores.mean(axis=0)
    if m.fixed_means is not None:
        mu = np.where(np.isnan(m.fixed_means), mu, m.fixed_means)
    return mu


def distances(m: DecisionMatrix, means, mode: str = "shortfall") -> tuple[np.ndarray, np.ndarray]:
    """Positive and negative distance matrices, each relative to the criterion mean."""
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    mu = np.asarray(means, dtype=np.float64)
    if mu.shape != (len(m.criteria),):
        raise ShapeError("means must have one entry per criterion")
    if np.any(mu == 0):
        raise DomainError("a criterion mean is zero; relative distances are undefined")
    above = np.maximum(0.0, m.scores - mu) / mu
    below = np.maximum(0.0, mu - m.scores) / mu
    # shortfall mode: falling short of a benefit criterion is the positive distance
    good_up = m.benefit if mode == "canonical" else ~m.benefit
    pd = np.where(good_up, above, below)
    nd = np.where(good_up, below, above)
    return pd, nd


def aggregate(pd, nd, weights) -> tuple[np.ndarray, np.ndarray]:
    w = np.asarray(weights, dtype=np.float64)
    return np.asarray(pd) @ w, np.asarray(nd) @ w


def appraise(sp, sn, mode: str = "shortfall") -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Normalize the aggregates and rank.

    Returns ``(nsp, nsn, as_score, rank)``; rank 1 is the best alternative
    and ties keep row order. All-zero aggregates give ``nsp = 0`` and
    ``nsn = 1`` instead of dividing by zero.
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    sp = np.asarray(sp, dtype=np.float64)
    sn = np.asarray(sn, dtype=np.float64)
    nsp = sp / sp.max() if sp.max() > 0 else np.zeros_like(sp)
    nsn = 1.0 - sn / sn.max() if sn.max() > 0 else np.ones_like(sn)
    score = 0.5 * (nsp + nsn)
    key = score if mode == "shortfall" else -score
    order = np.argsort(key, kind="stable")
    rank = np.empty(len(score), dtype=np.int64)
    rank[order] = np.arange(1, len(score) + 1)
    return nsp, nsn, score, rank


def edas(m: DecisionMatrix, mode: str = "shortfall") -> EdasResult:
    mu = mean_solution(m)
    pd, nd = distances(m, mu, mode)
    sp, sn = aggregate(pd, nd, m.weights)
    nsp, nsn, score, rank = appraise(sp, sn, mode)
    return EdasResult(list(m.alternatives), mu, pd, nd, sp, sn, nsp, nsn, score, rank, mode)


# -- CSV ------------------------------------------------------------------------


def read_matrix_csv(path) -> DecisionMatrix:
    """Parse ``alternative,<name>:benefit|cost,...`` with optional ``weights``/``means`` rows.

    Missing weights default to 1; a ``means`` cell left empty uses the
    computed column mean.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
    if not rows:
        raise FormatError(f"{path}: empty decision matrix")
    header = [c.strip() for c in rows[0]]
    if header[0].lower() != "alternative" or len(header) < 2:
        raise FormatError(f"{path}: header must start with 'alternative' and name criteria")
    criteria, benefit = [], []
    for cell in header[1:]:
        name, _, kind = cell.rpartition(":")
        if not name or kind.lower() not in ("benefit", "cost"):
            raise FormatError(f"{path}: criterion {cell!r} must look like name:benefit or name:cost")
        criteria.append(name)
        benefit.append(kind.lower() == "benefit")

    def numbers(row, lineno, allow_empty=False):
        if len(row) != len(header):
            raise FormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        out = []
        for cell in row[1:]:
            cell = cell.strip()
            if allow_empty and cell == "":
                out.append(np.nan)
                continue
            try:
                out.append(float(cell))
            except ValueError:
                raise FormatError(f"{path}:{lineno}: {cell!r} is not a number") from None
        return out

    names, scores, weights, means = [], [], None, None
    for lineno, row in enumerate(rows[1:], 2):
        label = row[0].strip()
        if label.lower() == "weights":
            weights = numbers(row, lineno)
        elif label.lower() == "means":
            means = numbers(row, lineno, allow_empty=True)
        else:
            names.append(label)
            scores.append(numbers(row, lineno))
    if not names:
        raise FormatError(f"{path}: no alternatives")
    return DecisionMatrix(
        names,
        criteria,
        np.array(scores),
        np.ones(len(criteria)) if weights is None else np.array(weights),
        np.array(benefit),
        None if means is None else np.array(means),
    )


def write_result_csv(dest, result: EdasResult) -> None:
    """Write ``alternative,sp,sn,nsp,nsn,as,rank`` rows to a path or open text file."""
    if hasattr(dest, "write"):
        _write_result(dest, result)
        return
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        _write_result(fh, result)


def _write_result(fh, result):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["alternative", "sp", "sn", "nsp", "nsn", "as", "rank"])
    for i, name in enumerate(result.alternatives):
        w.writerow(
            [name]
            + [f"{v[i]:.6f}" for v in (result.sp, result.sn, result.nsp, result.nsn, result.as_score)]
            + [int(result.rank[i])]
        )
