"""Scoring a straylight prediction: pixel metrics and artifact metrics.

Pixel metrics answer "how many pixels are right"; artifact metrics answer
"how many flares were found at all". A model can score well on one and
badly on the other, which is why both are reported side by side.

Run from the repository root:  python3 demos/03_metrics.py
"""

import numpy as np

from strayeval import (
    BinaryMask,
    SmoothingConfig,
    evaluate,
    iou_from_precision_recall,
    report_to_json,
)


def block(canvas, r0, r1, c0, c1):
    canvas[r0:r1, c0:c1] = True


# Ground truth: three flares. Prediction: finds two of them (one only
# partially), misses the third, and hallucinates a fourth region.
gt_bits = np.zeros((48, 64), dtype=bool)
block(gt_bits, 4, 14, 4, 20)
block(gt_bits, 20, 30, 30, 52)
block(gt_bits, 36, 44, 8, 18)

pred_bits = np.zeros((48, 64), dtype=bool)
block(pred_bits, 4, 14, 4, 20)      # first flare, exact
block(pred_bits, 20, 25, 30, 52)    # second flare, top half only
block(pred_bits, 38, 44, 54, 60)    # spurious detection

report = evaluate(BinaryMask(pred_bits), BinaryMask(gt_bits), frame_id="demo")
px, art = report.pixel, report.artifact

print(f"pixels: tp {px.tp}  fp {px.fp}  fn {px.fn}  tn {px.tn}")
print(f"precision {px.precision:.3f}  recall {px.recall:.3f}  iou {px.iou_fault:.3f}")

# Precision, recall, and foreground IoU are three views of the same three
# counts, tied together by an exact identity.
implied = iou_from_precision_recall(px.precision, px.recall)
assert abs(implied - px.iou_fault) < 1e-12
print(f"identity check: PR/(P+R-PR) = {implied:.3f}")

print(
    f"\nartifacts: {art.gt_artifacts} true, {art.pred_artifacts} predicted, "
    f"{art.fn_artifacts} missed, {art.fp_artifacts} spurious"
)
print(f"PaR {art.par:.3f} (share of flares found)")
print(f"PaP {art.pap:.3f} (share of detections that are real)")

# PamIoU scores pixel overlap after dropping whole missed/spurious regions,
# isolating "how well are the found flares traced" from "how many were
# found". It can never fall below the plain foreground IoU.
print(f"PamIoU {art.pamiou:.3f} >= iou {px.iou_fault:.3f}")
assert art.pamiou >= px.iou_fault

# Fragmented ground truth punishes recall unfairly; smoothing it first
# restores the intended region structure (see demo 02).
striped = gt_bits.copy()
striped[::4, :] = False
raw = evaluate(BinaryMask(pred_bits), BinaryMask(striped))
fixed = evaluate(BinaryMask(pred_bits), BinaryMask(striped), smoothing=SmoothingConfig())
print(
    f"\nfragmented GT: PaR {raw.artifact.par:.3f} raw "
    f"-> {fixed.artifact.par:.3f} with smoothing"
)

# The full report serializes to versioned JSON for downstream tooling.
print("\nJSON report:")
print(report_to_json(report))
