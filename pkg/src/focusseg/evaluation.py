"""Precision/recall, threshold-swept PR curves, F-alpha and a dataset harness."""
from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import FormatError, ShapeError
from .image import load_gray

log = logging.getLogger(__name__)

ALPHA_SQ = 0.3
THRESHOLDS = np.arange(256)
IMAGE_SUFFIXES = (".png", ".pgm", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")


def binarize_gt(gt) -> np.ndarray:
    """Ground truth as booleans; real-valued maps are cut at gray level 128."""
    g = np.asarray(gt)
    if g.dtype == bool:
        return g
    return np.asarray(g, dtype=np.float64) * 255.0 >= 128.0 - 1e-9


def _ratio(num, den, empty):
    if den:
        return num / den
    return 1.0 if empty == "one" else math.nan


def precision_recall(mask, gt, empty: str = "one") -> tuple[float, float]:
    """Pixel precision ``|S & G| / |S|`` and recall ``|S & G| / |G|``.

    An empty selection or empty ground truth yields 1.0 (``empty="one"``) or
    NaN (``empty="nan"``).
    """
    s = np.asarray(mask, dtype=bool)
    g = np.asarray(gt, dtype=bool)
    if s.shape != g.shape:
        raise ShapeError(f"mask {s.shape} and ground truth {g.shape} differ in shape")
    tp = int(np.count_nonzero(s & g))
    return _ratio(tp, int(s.sum()), empty), _ratio(tp, int(g.sum()), empty)


@dataclass
class PrCurve:
    thresholds: np.ndarray
    precision: np.ndarray
    recall: np.ndarray

    def f_alpha(self, alpha_sq: float = ALPHA_SQ) -> np.ndarray:
        return f_alpha(self.precision, self.recall, alpha_sq)

    def best(self, alpha_sq: float = ALPHA_SQ) -> tuple[int, float, float, float]:
        """``(t, precision, recall, F)`` at the threshold maximizing F (first on ties)."""
        f = np.nan_to_num(self.f_alpha(alpha_sq), nan=-1.0)
        i = int(np.argmax(f))
        return int(self.thresholds[i]), float(self.precision[i]), float(self.recall[i]), float(f[i])


def pr_curve(score_map, gt, empty: str = "one") -> PrCurve:
    """Precision and recall of ``score * 255 >= t`` for every integer ``t`` in 0..255.

    Counting is done once through a 256-bin cumulative histogram.
    """
    s = np.asarray(score_map, dtype=np.float64)
    g = np.asarray(gt, dtype=bool)
    if s.shape != g.shape:
        raise ShapeError(f"score map {s.shape} and ground truth {g.shape} differ in shape")
    # smallest t with s*255 < t is ceil(s*255); selected for every t <= that level
    level = np.clip(np.floor(s * 255.0 + 1e-9), -1, 255).astype(np.int64)
    sel_hist = np.bincount(level.ravel() + 1, minlength=257)
    tp_hist = np.bincount(level[g].ravel() + 1, minlength=257)
    selected = np.cumsum(sel_hist[::-1])[::-1][1:]
    tp = np.cumsum(tp_hist[::-1])[::-1][1:]
    n_gt = int(g.sum())
    fill = 1.0 if empty == "one" else math.nan
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(selected > 0, tp / np.maximum(selected, 1), fill)
        recall = np.full(256, fill) if n_gt == 0 else tp / n_gt
    return PrCurve(THRESHOLDS.copy(), precision.astype(np.float64), np.asarray(recall, dtype=np.float64))


def f_alpha(precision, recall, alpha_sq: float = ALPHA_SQ):
    """Weighted harmonic mean ``(1 + a2) P R / (a2 P + R)``; 0 when both are 0."""
    p = np.asarray(precision, dtype=np.float64)
    r = np.asarray(recall, dtype=np.float64)
    den = alpha_sq * p + r
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0, (1.0 + alpha_sq) * p * r / np.where(den > 0, den, 1.0), 0.0)
    out = np.where(np.isnan(p) | np.isnan(r), np.nan, out)
    return float(out) if out.ndim == 0 else out


# -- dataset harness --------------------------------------------------------------


@dataclass
class ImageScore:
    path: str
    best_t: int
    precision: float
    recall: float
    f_alpha: float


@dataclass
class EvalReport:
    alpha_sq: float = ALPHA_SQ
    images: list[ImageScore] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)
    mean_curve: PrCurve | None = None

    @property
    def mean_of_maxima(self) -> float:
        return float(np.mean([s.f_alpha for s in self.images])) if self.images else math.nan

    @property
    def pooled(self) -> tuple[int, float, float, float] | None:
        return self.mean_curve.best(self.alpha_sq) if self.mean_curve is not None else None

    @property
    def highest_f(self) -> float:
        """Dataset score: best F over thresholds of the mean precision/recall curve."""
        pooled = self.pooled
        return pooled[3] if pooled is not None else math.nan


def read_index(path) -> list[tuple[str, str]]:
    """Read ``image<TAB>gt`` lines; relative paths resolve against the index's folder."""
    base = os.path.dirname(os.path.abspath(path))
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected 'image<TAB>gt'")
            pairs.append(tuple(p if os.path.isabs(p) else os.path.join(base, p) for p in parts))
    return pairs


def build_index(image_dir, gt_dir, gt_suffixes=("", "_gt", "_mask")) -> list[tuple[str, str]]:
    """Pair every image in ``image_dir`` with the ground truth sharing its stem.

    Ground-truth files may carry one of ``gt_suffixes`` after the stem.
    Images without a match are left out.
    """
    gts = {}
    for name in sorted(os.listdir(gt_dir)):
        stem, ext = os.path.splitext(name)
        if ext.lower() in IMAGE_SUFFIXES:
            gts.setdefault(stem, os.path.join(gt_dir, name))
    pairs = []
    for name in sorted(os.listdir(image_dir)):
        stem, ext = os.path.splitext(name)
        if ext.lower() not in IMAGE_SUFFIXES:
            continue
        for suffix in gt_suffixes:
            if stem + suffix in gts:
                pairs.append((os.path.join(image_dir, name), gts[stem + suffix]))
                break
    return pairs


def write_index(path, pairs) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for img, gt in pairs:
            fh.write(f"{img}\t{gt}\n")


def _score_one(pair, method, loader, empty):
    img_path, gt_path = pair
    try:
        image = loader(img_path)
        gt = binarize_gt(loader(gt_path))
    except (OSError, ValueError) as exc:
        return None, f"unreadable pair: {exc}"
    if image.shape != gt.shape:
        return None, f"size mismatch {image.shape} vs {gt.shape}"
    scores = np.clip(np.asarray(method(image), dtype=np.float64), 0.0, 1.0)
    if scores.shape != gt.shape:
        return None, f"method returned shape {scores.shape}, expected {gt.shape}"
    return pr_curve(scores, gt, empty), None


def evaluate_dataset(
    index,
    method: Callable[[np.ndarray], np.ndarray],
    alpha_sq: float = ALPHA_SQ,
    workers: int = 1,
    loader: Callable = load_gray,
    empty: str = "one",
) -> EvalReport:
    """Score ``method`` on every ``(image, gt)`` pair of ``index``.

    Unreadable or mismatched pairs are skipped and recorded in
    ``report.skipped``. Results keep index order whatever ``workers`` is.
    """
    pairs = list(index)
    report = EvalReport(alpha_sq=alpha_sq)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda p: _score_one(p, method, loader, empty), pairs))
    else:
        results = [_score_one(p, method, loader, empty) for p in pairs]

    curves = []
    for (img_path, _), (curve, problem) in zip(pairs, results):
        if curve is None:
            log.warning("skipping %s: %s", img_path, problem)
            report.skipped.append((img_path, problem))
            continue
        t, p, r, f = curve.best(alpha_sq)
        report.images.append(ImageScore(img_path, t, p, r, f))
        curves.append(curve)
    if curves:
        report.mean_curve = PrCurve(
            THRESHOLDS.copy(),
            np.mean([c.precision for c in curves], axis=0),
            np.mean([c.recall for c in curves], axis=0),
        )
    return report


def write_report_csv(path, report: EvalReport) -> None:
    """Per-image rows ``path,best_t,precision,recall,f_alpha`` plus two summary rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["path", "best_t", "precision", "recall", "f_alpha"])
        for s in report.images:
            w.writerow([s.path, s.best_t, f"{s.precision:.6f}", f"{s.recall:.6f}", f"{s.f_alpha:.6f}"])
        if report.images:
            t, p, r, f = report.pooled
            w.writerow(["#pooled", t, f"{p:.6f}", f"{r:.6f}", f"{f:.6f}"])
            w.writerow(["#mean_of_maxima", "", "", "", f"{report.mean_of_maxima:.6f}"])


def write_curve_csv(path, curve: PrCurve) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "precision", "recall"])
        for t, p, r in zip(curve.thresholds, curve.precision, curve.recall):
            w.writerow([int(t), f"{p:.6f}", f"{r:.6f}"])
