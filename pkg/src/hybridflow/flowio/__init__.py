"""Flow/frame data types, file codecs, metrics, warping and visualization."""

from .flo import (FLO_MAGIC, read_flo, read_flo_file, write_flo,
                  write_flo_file)
from .image_io import (read_frame_png, read_mask_png, write_frame_png,
                       write_mask_png)
from .kitti import (FLOW_RANGE, decode_kitti_png, encode_kitti_png,
                    read_kitti_png_file, write_kitti_png_file)
from .metrics import (DB_CAP, endpoint_error, moving_region_mask, psnr,
                      sharpness)
from .types import (FlowField, Frame, MetricsReport, Minibatch, SampleTriplet,
                    Source)
from .viz import colorize_flow, make_color_wheel, wheel_color
from .warp import bilinear_sample, warp_frame

__all__ = [
    "FLO_MAGIC", "FLOW_RANGE", "DB_CAP",
    "FlowField", "Frame", "SampleTriplet", "Minibatch", "MetricsReport",
    "Source",
    "read_flo", "write_flo", "read_flo_file", "write_flo_file",
    "decode_kitti_png", "encode_kitti_png",
    "read_kitti_png_file", "write_kitti_png_file",
    "read_frame_png", "write_frame_png", "read_mask_png", "write_mask_png",
    "endpoint_error", "psnr", "sharpness", "moving_region_mask",
    "warp_frame", "bilinear_sample",
    "colorize_flow", "make_color_wheel", "wheel_color",
]
