"""Pose-adaptive, component-based face identification with LBP histograms."""

__version__ = "0.1.0"

from .config import Config, load_config
from .fusion import (
    FusionWeights,
    MatchResult,
    chi_square,
    component_score,
    default_weights,
    fuse,
    identify,
)
from .gallery import Gallery, GalleryEntry, enroll, load_gallery, partition_for, save_gallery
from .geometry import BoundingBox, ComponentKind, component_box, euclidean_2d, extract_roi
from .landmarks import (
    POINT_NAMES,
    FacePointId,
    Landmark,
    LandmarkSet,
    load_landmarks,
    parse_landmark_file,
    save_landmarks,
    validate,
)
from .lbp import LbpDescriptor, descriptor, lbp_code, lbp_image
from .pipeline import describe_capture, load_image
from .pose import PoseAngles, PoseBucket, active_components, bucket_pose, estimate_pose, signed_axis_angle
from .preprocess import COMPONENT_SIZES, gaussian_blur, local_normalize, preprocess_component, resize_bilinear
