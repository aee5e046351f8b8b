"""Onboard use of a straylight mask: validity, usability, gating.

The segmentation mask is inverted into a per-pixel validity map; the
invalid-pixel fraction drives a frame-level usability verdict; point
measurements (star or landmark detections feeding a navigation filter) are
then either passed through or rejected. A frame judged unusable rejects
everything and signals that a fault response should be triggered instead.

The usability rule here is a plain fraction threshold with strict
less-than. It is deliberately the simplest monotone rule that makes the
interface demonstrable; callers with a better onboard criterion can swap
it without touching the gating step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .mask import BinaryMask

__all__ = [
    "DEFAULT_USABILITY_THRESHOLD",
    "Action",
    "RejectReason",
    "ValidityMask",
    "UsabilityDecision",
    "Measurement",
    "GatingReport",
    "MeasurementFormatError",
    "build_validity",
    "decide_usability",
    "gate_measurements",
    "parse_measurements",
    "measurements_to_jsonl",
    "gating_report_to_dict",
]

DEFAULT_USABILITY_THRESHOLD = 0.30


class Action(Enum):
    USE_WITH_GATING = "UseWithGating"
    TRIGGER_FDIR = "TriggerFdir"


class RejectReason(Enum):
    FRAME_UNUSABLE = "FrameUnusable"
    INVALID_PIXEL = "InvalidPixel"
    OUT_OF_BOUNDS = "OutOfBounds"


@dataclass(frozen=True, eq=False)
class ValidityMask:
    """Per-pixel validity: a pixel is valid iff it is straylight-free."""

    width: int
    height: int
    valid: np.ndarray = field(repr=False)
    invalid_count: int
    invalid_fraction: float

    def __post_init__(self):
        v = np.asarray(self.valid, dtype=bool).copy()
        if v.shape != (self.height, self.width):
            raise ValueError(
                f"valid array shape {v.shape} does not match "
                f"{self.height}x{self.width}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "valid", v)


@dataclass(frozen=True)
class UsabilityDecision:
    usable: bool
    invalid_fraction: float
    threshold: float
    action: Action

    def __post_init__(self):
        if self.usable != (self.action is Action.USE_WITH_GATING):
            raise ValueError("action must be TriggerFdir exactly when not usable")


@dataclass(frozen=True)
class Measurement:
    """A point detection at integer pixel coordinates, payload opaque."""

    id: str
    pixel: tuple
    payload: object = None


@dataclass(frozen=True)
class GatingReport:
    """Partition of the input measurements; order of arrival preserved."""

    accepted: tuple
    rejected: tuple  # (Measurement, RejectReason) pairs
    frame_usable: bool

    def __post_init__(self):
        if not self.frame_usable and self.accepted:
            raise ValueError("unusable frame cannot accept measurements")


class MeasurementFormatError(ValueError):
    """Raised for measurement input that is not valid JSON lines."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def build_validity(seg: BinaryMask) -> ValidityMask:
    """Invert a straylight mask into a validity map with counts."""
    invalid = int(seg.count())
    total = seg.height * seg.width
    return ValidityMask(
        width=seg.width,
        height=seg.height,
        valid=~seg.bits,
        invalid_count=invalid,
        invalid_fraction=invalid / total,
    )


def decide_usability(
    v: ValidityMask, threshold: float = DEFAULT_USABILITY_THRESHOLD
) -> UsabilityDecision:
    """Frame verdict: usable iff invalid_fraction < threshold (strict)."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    usable = v.invalid_fraction < threshold
    return UsabilityDecision(
        usable=usable,
        invalid_fraction=v.invalid_fraction,
        threshold=threshold,
        action=Action.USE_WITH_GATING if usable else Action.TRIGGER_FDIR,
    )


def gate_measurements(
    ms: list,
    v: ValidityMask,
    d: UsabilityDecision,
    margin: int = 0,
) -> GatingReport:
    """Filter measurements through the validity map.

    An unusable frame rejects everything as FrameUnusable. Otherwise each
    measurement is rejected as OutOfBounds when its pixel lies outside the
    frame, or as InvalidPixel when any invalid pixel sits within Chebyshev
    distance ``margin`` of it (margin 0 checks the pixel itself).
    """
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    if not d.usable:
        return GatingReport(
            accepted=(),
            rejected=tuple((m, RejectReason.FRAME_UNUSABLE) for m in ms),
            frame_usable=False,
        )
    accepted = []
    rejected = []
    for m in ms:
        row, col = m.pixel
        if not (0 <= row < v.height and 0 <= col < v.width):
            rejected.append((m, RejectReason.OUT_OF_BOUNDS))
            continue
        r0 = max(0, row - margin)
        c0 = max(0, col - margin)
        window = v.valid[r0 : row + margin + 1, c0 : col + margin + 1]
        if window.all():
            accepted.append(m)
        else:
            rejected.append((m, RejectReason.INVALID_PIXEL))
    return GatingReport(
        accepted=tuple(accepted), rejected=tuple(rejected), frame_usable=True
    )


def parse_measurements(text: str) -> list:
    """Parse JSON-lines measurements: {"id":..., "row":..., "col":...}."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MeasurementFormatError(lineno, f"invalid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise MeasurementFormatError(lineno, "expected a JSON object")
        try:
            mid, row, col = obj["id"], obj["row"], obj["col"]
        except KeyError as exc:
            raise MeasurementFormatError(lineno, f"missing key {exc}") from exc
        if not isinstance(row, int) or not isinstance(col, int) or isinstance(row, bool) or isinstance(col, bool):
            raise MeasurementFormatError(lineno, "row and col must be integers")
        out.append(Measurement(id=str(mid), pixel=(row, col)))
    return out


def measurements_to_jsonl(ms: list) -> str:
    lines = [
        json.dumps({"id": m.id, "row": m.pixel[0], "col": m.pixel[1]})
        for m in ms
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def gating_report_to_dict(report: GatingReport, decision: UsabilityDecision) -> dict:
    def entry(m: Measurement) -> dict:
        return {"id": m.id, "row": m.pixel[0], "col": m.pixel[1]}

    return {
        "schema_version": 1,
        "frame_usable": report.frame_usable,
        "invalid_fraction": decision.invalid_fraction,
        "threshold": decision.threshold,
        "action": decision.action.value,
        "accepted": [entry(m) for m in report.accepted],
        "rejected": [
            {**entry(m), "reason": reason.value} for m, reason in report.rejected
        ],
    }
