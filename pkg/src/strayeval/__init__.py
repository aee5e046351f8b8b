"""Straylight segmentation evaluation toolkit.

Masks in, scores and decisions out: connected-region extraction, pixel and
per-artifact metrics, Gaussian repair of fragmented ground truth, an
onboard validity/usability/gating pipeline, and a deterministic synthetic
scene generator for desk-scale experiments.
"""

from .mask import (
    BinaryMask,
    ChannelCountError,
    FloatField,
    GrayImage,
    MaskDecodeError,
    ShapeMismatchError,
    decode_gray,
    decode_mask,
    encode_gray,
    encode_gray16,
    encode_mask,
    luminance,
)
from .metrics import (
    ArtifactMatch,
    ArtifactMetrics,
    MetricsReport,
    PixelMetrics,
    artifact_metrics,
    evaluate,
    iou_from_precision_recall,
    match_artifacts,
    pixel_metrics,
    report_to_dict,
    report_to_json,
    reports_to_csv,
)
from .pipeline import (
    DEFAULT_USABILITY_THRESHOLD,
    Action,
    GatingReport,
    Measurement,
    MeasurementFormatError,
    RejectReason,
    UsabilityDecision,
    ValidityMask,
    build_validity,
    decide_usability,
    gate_measurements,
    gating_report_to_dict,
    measurements_to_jsonl,
    parse_measurements,
)
from .regions import (
    Connectivity,
    LabelMap,
    Region,
    label_components,
    region_properties,
)
from .rng import SplitMix64, splitmix64_stream, stream_floats
from .smoothing import (
    Border,
    GaussianKernel,
    SmoothingConfig,
    gaussian_kernel,
    smooth_mask,
)
from .synth import (
    FlareDescriptor,
    FlatBackground,
    Orientation,
    SceneConfig,
    SpeckleBackground,
    SynthScene,
    baseline_segment,
    fragment_mask,
    generate_scene,
    scene_config_from_dict,
    scene_config_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # mask
    "BinaryMask",
    "GrayImage",
    "FloatField",
    "MaskDecodeError",
    "ChannelCountError",
    "ShapeMismatchError",
    "decode_mask",
    "encode_mask",
    "decode_gray",
    "encode_gray",
    "encode_gray16",
    "luminance",
    # regions
    "Connectivity",
    "LabelMap",
    "Region",
    "label_components",
    "region_properties",
    # smoothing
    "Border",
    "GaussianKernel",
    "SmoothingConfig",
    "gaussian_kernel",
    "smooth_mask",
    # metrics
    "PixelMetrics",
    "ArtifactMatch",
    "ArtifactMetrics",
    "MetricsReport",
    "iou_from_precision_recall",
    "pixel_metrics",
    "match_artifacts",
    "artifact_metrics",
    "evaluate",
    "report_to_dict",
    "report_to_json",
    "reports_to_csv",
    # pipeline
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
    # rng
    "SplitMix64",
    "splitmix64_stream",
    "stream_floats",
    # synth
    "FlatBackground",
    "SpeckleBackground",
    "SceneConfig",
    "FlareDescriptor",
    "SynthScene",
    "Orientation",
    "generate_scene",
    "fragment_mask",
    "baseline_segment",
    "scene_config_to_dict",
    "scene_config_from_dict",
]
