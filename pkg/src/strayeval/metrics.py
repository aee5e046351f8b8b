"""Pixel-level and artifact-level segmentation metrics.

Pixel metrics (precision, recall, foreground IoU) treat every pixel alike,
so one huge flare dominates the score of a frame that also contains several
small ones. The artifact metrics count whole connected regions instead:

    par    = 1 - fn_artifacts / gt_artifacts
    pap    = 1 - fp_artifacts / pred_artifacts
    pamiou = intersection over union, excluding the pixels of regions that
             are false-positive or false-negative artifacts

A predicted region is a true positive when it overlaps at least one pixel
of some ground-truth region; a ground-truth region counts as detected when
at least one predicted pixel lands on it. Many-to-one matches are allowed
in both directions. All degenerate cases (empty masks) score 1.0 so that a
perfect predictor on a fault-free frame is not penalized.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .mask import BinaryMask, ShapeMismatchError
from .regions import Connectivity, LabelMap, label_components
from .smoothing import SmoothingConfig, smooth_mask

__all__ = [
    "PixelMetrics",
    "ArtifactMatch",
    "ArtifactMetrics",
    "MetricsReport",
    "pixel_metrics",
    "match_artifacts",
    "artifact_metrics",
    "evaluate",
    "report_to_dict",
    "report_to_json",
    "reports_to_csv",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PixelMetrics:
    """Per-pixel confusion counts and the ratios derived from them."""

    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    iou_fault: float
    iou_background: float
    miou_2class: float

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class ArtifactMatch:
    """Region-level correspondence between a prediction and ground truth.

    ``overlap_pairs`` lists every (pred_label, gt_label, overlap_pixels)
    with positive overlap, sorted by (pred_label, gt_label). The label maps
    the match was computed from are carried along so the metric step can
    exclude whole regions without relabeling.
    """

    gt_regions: int
    pred_regions: int
    tp_pred_labels: frozenset
    fp_pred_labels: frozenset
    detected_gt_labels: frozenset
    fn_gt_labels: frozenset
    overlap_pairs: tuple
    pred_map: LabelMap
    gt_map: LabelMap


@dataclass(frozen=True)
class ArtifactMetrics:
    """Whole-artifact precision, recall, and region-masked IoU."""

    gt_artifacts: int
    pred_artifacts: int
    fn_artifacts: int
    fp_artifacts: int
    pap: float
    par: float
    pamiou: float


@dataclass(frozen=True)
class MetricsReport:
    """Joint pixel + artifact report for one frame."""

    pixel: PixelMetrics
    artifact: ArtifactMetrics
    gt_was_smoothed: bool
    smoothing: SmoothingConfig | None
    frame_id: str

    def __post_init__(self):
        if self.gt_was_smoothed and self.smoothing is None:
            raise ValueError("gt_was_smoothed requires the smoothing config")


def _ratio(num: int, den: int) -> float:
    # Degenerate convention: an empty denominator scores perfect.
    return 1.0 if den == 0 else num / den


def iou_from_precision_recall(precision: float, recall: float) -> float:
    """Foreground IoU implied by a (precision, recall) pair.

    Uses the count-level identity tp/(tp+fp+fn) == P*R / (P + R - P*R),
    which holds whenever tp > 0; both inputs must therefore be positive.
    """
    if not (0.0 < precision <= 1.0) or not (0.0 < recall <= 1.0):
        raise ValueError("precision and recall must lie in (0, 1]")
    return precision * recall / (precision + recall - precision * recall)


def pixel_metrics(pred: BinaryMask, gt: BinaryMask) -> PixelMetrics:
    """Exact per-pixel confusion counts between two same-size masks."""
    if pred.shape != gt.shape:
        raise ShapeMismatchError(pred.shape, gt.shape)
    # Encode each pixel as 2*pred + gt, then histogram: 0=tn 1=fn 2=fp 3=tp.
    # bool arrays hold 0/1 bytes, so the uint8 views are free.
    code = (pred.bits.view(np.uint8) << 1) | gt.bits.view(np.uint8)
    counts = np.bincount(code.ravel(), minlength=4)
    tn, fn, fp, tp = (int(c) for c in counts[:4])
    iou_fault = _ratio(tp, tp + fp + fn)
    iou_background = _ratio(tn, tn + fp + fn)
    return PixelMetrics(
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
        precision=_ratio(tp, tp + fp),
        recall=_ratio(tp, tp + fn),
        iou_fault=iou_fault,
        iou_background=iou_background,
        miou_2class=(iou_fault + iou_background) / 2.0,
    )


def match_artifacts(
    pred_lm: LabelMap,
    gt_lm: LabelMap,
    min_overlap_fraction: float = 0.0,
) -> ArtifactMatch:
    """Relate predicted regions to ground-truth regions by pixel overlap.

    With the default ``min_overlap_fraction`` of 0 a single shared pixel
    establishes a match. A positive fraction f additionally requires the
    overlap to reach f times the area of BOTH regions in the pair, which
    discards grazing contacts symmetrically.
    """
    if pred_lm.shape != gt_lm.shape:
        raise ShapeMismatchError(pred_lm.shape, gt_lm.shape)
    if not 0.0 <= min_overlap_fraction <= 1.0:
        raise ValueError(
            f"min_overlap_fraction must be in [0, 1], got {min_overlap_fraction}"
        )

    pl = pred_lm.labels
    gl = gt_lm.labels
    both = (pl > 0) & (gl > 0)
    pn = pred_lm.region_count
    gn = gt_lm.region_count

    if both.any():
        code = pl[both].astype(np.int64) * (gn + 1) + gl[both].astype(np.int64)
        uniq, counts = np.unique(code, return_counts=True)
        pair_pred = uniq // (gn + 1)
        pair_gt = uniq % (gn + 1)
        overlaps = counts
    else:
        pair_pred = np.empty(0, dtype=np.int64)
        pair_gt = np.empty(0, dtype=np.int64)
        overlaps = np.empty(0, dtype=np.int64)

    if min_overlap_fraction > 0.0 and len(pair_pred):
        pred_area = np.bincount(pl.ravel(), minlength=pn + 1)
        gt_area = np.bincount(gl.ravel(), minlength=gn + 1)
        need_p = min_overlap_fraction * pred_area[pair_pred]
        need_g = min_overlap_fraction * gt_area[pair_gt]
        keep = (overlaps >= need_p) & (overlaps >= need_g)
        pair_pred, pair_gt, overlaps = pair_pred[keep], pair_gt[keep], overlaps[keep]

    tp_pred = frozenset(int(p) for p in pair_pred)
    detected_gt = frozenset(int(g) for g in pair_gt)
    all_pred = frozenset(range(1, pn + 1))
    all_gt = frozenset(range(1, gn + 1))
    pairs = tuple(
        sorted(
            (int(p), int(g), int(o))
            for p, g, o in zip(pair_pred, pair_gt, overlaps)
        )
    )
    return ArtifactMatch(
        gt_regions=gn,
        pred_regions=pn,
        tp_pred_labels=tp_pred,
        fp_pred_labels=all_pred - tp_pred,
        detected_gt_labels=detected_gt,
        fn_gt_labels=all_gt - detected_gt,
        overlap_pairs=pairs,
        pred_map=pred_lm,
        gt_map=gt_lm,
    )


def artifact_metrics(
    match: ArtifactMatch, pred: BinaryMask, gt: BinaryMask
) -> ArtifactMetrics:
    """Score a match: artifact-level precision/recall plus the masked IoU.

    The masked IoU removes every false-positive predicted region and every
    undetected ground-truth region from its respective pixel set before
    intersecting; unmatched regions therefore cost nothing here (they are
    already billed by pap and par).
    """
    pl = match.pred_map.labels
    gl = match.gt_map.labels
    if pl.shape != pred.shape or gl.shape != gt.shape:
        raise ShapeMismatchError(pl.shape, pred.shape)
    if not np.array_equal(pl > 0, pred.bits) or not np.array_equal(gl > 0, gt.bits):
        raise ValueError("match was not computed from these masks")

    fn_count = len(match.fn_gt_labels)
    fp_count = len(match.fp_pred_labels)
    par = 1.0 if match.gt_regions == 0 else 1.0 - fn_count / match.gt_regions
    pap = 1.0 if match.pred_regions == 0 else 1.0 - fp_count / match.pred_regions

    keep_pred = np.ones(match.pred_regions + 1, dtype=bool)
    keep_pred[0] = False
    for lab in match.fp_pred_labels:
        keep_pred[lab] = False
    keep_gt = np.ones(match.gt_regions + 1, dtype=bool)
    keep_gt[0] = False
    for lab in match.fn_gt_labels:
        keep_gt[lab] = False

    p_kept = keep_pred[pl]
    g_kept = keep_gt[gl]
    inter = int(np.count_nonzero(p_kept & g_kept))
    union = int(np.count_nonzero(p_kept | g_kept))
    return ArtifactMetrics(
        gt_artifacts=match.gt_regions,
        pred_artifacts=match.pred_regions,
        fn_artifacts=fn_count,
        fp_artifacts=fp_count,
        pap=pap,
        par=par,
        pamiou=_ratio(inter, union),
    )


def evaluate(
    pred: BinaryMask,
    gt: BinaryMask,
    smoothing: SmoothingConfig | None = None,
    connectivity: Connectivity = Connectivity.EIGHT,
    *,
    frame_id: str = "",
    min_overlap_fraction: float = 0.0,
) -> MetricsReport:
    """Full single-frame evaluation.

    When a smoothing config is given, the ground truth is repaired before
    everything downstream: region extraction, the masked-IoU pixel sets,
    and the pixel metrics. The report flags this, since pixel scores
    against a dilated ground truth are not comparable to raw ones.
    """
    if pred.shape != gt.shape:
        raise ShapeMismatchError(pred.shape, gt.shape)
    gt_eval = smooth_mask(gt, smoothing) if smoothing is not None else gt
    pixel = pixel_metrics(pred, gt_eval)
    pred_lm = label_components(pred, connectivity)
    gt_lm = label_components(gt_eval, connectivity)
    match = match_artifacts(pred_lm, gt_lm, min_overlap_fraction)
    artifact = artifact_metrics(match, pred, gt_eval)
    return MetricsReport(
        pixel=pixel,
        artifact=artifact,
        gt_was_smoothed=smoothing is not None,
        smoothing=smoothing,
        frame_id=frame_id,
    )


def report_to_dict(report: MetricsReport) -> dict:
    """Serialize one report to the versioned plain-dict schema."""
    out = {
        "schema_version": SCHEMA_VERSION,
        "frame_id": report.frame_id,
        "pixel": {
            "tp": report.pixel.tp,
            "fp": report.pixel.fp,
            "fn": report.pixel.fn,
            "tn": report.pixel.tn,
            "precision": report.pixel.precision,
            "recall": report.pixel.recall,
            "iou_fault": report.pixel.iou_fault,
            "miou_2class": report.pixel.miou_2class,
        },
        "artifact": {
            "gt_artifacts": report.artifact.gt_artifacts,
            "pred_artifacts": report.artifact.pred_artifacts,
            "fn_artifacts": report.artifact.fn_artifacts,
            "fp_artifacts": report.artifact.fp_artifacts,
            "pap": report.artifact.pap,
            "par": report.artifact.par,
            "pamiou": report.artifact.pamiou,
        },
        "gt_was_smoothed": report.gt_was_smoothed,
    }
    if report.smoothing is not None:
        out["smoothing"] = {
            "sigma": report.smoothing.sigma,
            "truncate": report.smoothing.truncate,
            "threshold": report.smoothing.binarize_threshold,
            "border": report.smoothing.border.value,
        }
    return out


def report_to_json(report: MetricsReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=False) + "\n"


_CSV_COLUMNS = [
    "frame_id",
    "tp",
    "fp",
    "fn",
    "tn",
    "precision",
    "recall",
    "iou_fault",
    "miou_2class",
    "gt_artifacts",
    "pred_artifacts",
    "fn_artifacts",
    "fp_artifacts",
    "pap",
    "par",
    "pamiou",
    "gt_was_smoothed",
]


def _csv_row(report: MetricsReport) -> list:
    p, a = report.pixel, report.artifact
    return [
        report.frame_id,
        p.tp,
        p.fp,
        p.fn,
        p.tn,
        repr(p.precision),
        repr(p.recall),
        repr(p.iou_fault),
        repr(p.miou_2class),
        a.gt_artifacts,
        a.pred_artifacts,
        a.fn_artifacts,
        a.fp_artifacts,
        repr(a.pap),
        repr(a.par),
        repr(a.pamiou),
        int(report.gt_was_smoothed),
    ]


def reports_to_csv(reports: list) -> str:
    """One row per frame (sorted by frame_id) plus a final mean row."""
    ordered = sorted(reports, key=lambda r: r.frame_id)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for report in ordered:
        writer.writerow(_csv_row(report))
    if ordered:
        numeric = np.array(
            [[float(v) for v in _csv_row(r)[1:]] for r in ordered], dtype=np.float64
        )
        means = numeric.mean(axis=0)
        writer.writerow(["mean"] + [repr(float(v)) for v in means])
    return buf.getvalue()
