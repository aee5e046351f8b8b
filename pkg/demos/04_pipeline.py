"""Onboard use of a straylight mask: validity, usability, gating.

A segmented straylight mask is not an end product. Onboard, it drives two
decisions: is this frame usable at all, and if so, which individual
measurements (star detections, feature tracks) must be discarded because
they sit on contaminated pixels.

Run from the repository root:  python3 demos/04_pipeline.py
"""

import json

import numpy as np

from strayeval import (
    BinaryMask,
    Measurement,
    build_validity,
    decide_usability,
    gate_measurements,
    gating_report_to_dict,
    measurements_to_jsonl,
    parse_measurements,
)

# A frame with a flare across the top-left corner.
seg = np.zeros((64, 64), dtype=bool)
rr, cc = np.mgrid[0:64, 0:64]
seg[(rr + cc) < 30] = True
mask = BinaryMask(seg)

# Validity is the mask inverted: a pixel is valid iff not straylight.
validity = build_validity(mask)
print(
    f"invalid pixels: {validity.invalid_count} "
    f"({validity.invalid_fraction:.3f} of the frame)"
)

# The frame verdict is a plain threshold on that fraction (strictly less
# than; the rule is deliberately simple and replaceable).
decision = decide_usability(validity, threshold=0.30)
print(f"usable: {decision.usable} -> action {decision.action.value}")

# Measurements arrive as JSON lines and survive a round trip unchanged.
ms = [
    Measurement("star-007", (5, 5)),      # inside the flare
    Measurement("star-031", (40, 40)),    # clean
    Measurement("star-012", (14, 14)),    # near the flare edge
    Measurement("star-099", (80, 10)),    # off-frame
]
jsonl = measurements_to_jsonl(ms)
assert [m.id for m in parse_measurements(jsonl)] == [m.id for m in ms]

report = gate_measurements(ms, validity, decision)
print(f"\naccepted: {[m.id for m in report.accepted]}")
for m, reason in report.rejected:
    print(f"rejected: {m.id} ({reason.value})")

# A safety margin widens the rejection zone by a Chebyshev radius, catching
# measurements adjacent to straylight as well as on it.
wide = gate_measurements(ms, validity, decision, margin=8)
print(f"\nwith margin 8: accepted {[m.id for m in wide.accepted]}")
assert {m.id for m in wide.accepted} <= {m.id for m in report.accepted}

# When the mask saturates the frame, the verdict flips and nothing passes:
# the consumer sees a recovery action instead of a half-trusted frame.
flooded = build_validity(BinaryMask(np.ones((64, 64), dtype=bool)))
fdir = decide_usability(flooded, threshold=0.30)
all_out = gate_measurements(ms, flooded, fdir)
print(f"\nsaturated frame: action {fdir.action.value}, accepted {len(all_out.accepted)}")

# The machine-readable report carries the verdict and both lists.
print("\ngating report:")
print(json.dumps(gating_report_to_dict(report, decision), indent=2))
