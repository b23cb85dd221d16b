"""Rotation- and translation-invariant G-code comparison, G-code synthesis
from trajectory predictions, and evaluation dataset generation."""

from .changepoint import PeltChangePointDetector, optimal_partition, pelt
from .dataset import ShapeSpec, VariantSpec, gen_shape, gen_variants, inject_noise
from .equivalence import (
    AlignmentResult,
    ComparisonReport,
    LayerScore,
    align_layer,
    best_rotation,
    compare,
    layer_dissimilarity,
    nmse_similarity,
    subsequence_dtw,
)
from .estimators import CurveChecker, NmseBaseline
from .gcode_model import (
    Command,
    GcodeParseError,
    GcodeProgram,
    Instruction,
    Layer,
    Skeleton,
    emit_program,
    extract_skeleton,
    parse_program,
    read_program,
    write_program,
)
from .geometry import (
    Polygon,
    Transform2D,
    convex_hull,
    convex_intersection_area,
    polygon_area,
    polygon_centroid,
    rotate_points,
    translate_points,
    union_area,
)
from .manipulator import rotate_gcode, translate_gcode
from .postprocess import (
    GcodeSynthesizer,
    PrinterProfile,
    TrajectoryPrediction,
    ZNormalizer,
    assign_feed_rate,
    build_gcode,
    compute_extrusion,
    detect_z_changepoints,
    normalize_z,
)

__version__ = "0.1.0"
