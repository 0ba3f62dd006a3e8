"""Shared-encoder, dual-decoder fully convolutional model.

A stack of stride-2 convolutions encodes two (or four) frames into a feature
pyramid; two structurally identical decoders, one for flow (2 output
channels) and one for frame synthesis (3 output channels), upconvolve back to
input resolution. Each decoder stage concatenates its upconvolution output
with same-resolution encoder features and the 2x-upsampled previous
prediction, then emits a prediction at that scale, so every batch yields a
coarse-to-fine prediction pyramid per active branch.
"""

from .config import TaskMode, NetworkConfig
from .layers import LayerSpec, build_layers, encoder_feature_names, scaled_width
from .model import (ENCODER, FLOW_DECODER, FRAME_DECODER, HybridNet,
                    ParameterSet, Prediction, PredictionSet, forward,
                    init_parameters)
from .checkpoint import (CHECKPOINT_MAGIC, CHECKPOINT_VERSION, CheckpointData,
                         load_checkpoint, load_checkpoint_full,
                         save_checkpoint)

__all__ = [
    "TaskMode",
    "NetworkConfig",
    "LayerSpec",
    "build_layers",
    "encoder_feature_names",
    "scaled_width",
    "ENCODER",
    "FLOW_DECODER",
    "FRAME_DECODER",
    "HybridNet",
    "ParameterSet",
    "Prediction",
    "PredictionSet",
    "forward",
    "init_parameters",
    "CHECKPOINT_MAGIC",
    "CHECKPOINT_VERSION",
    "CheckpointData",
    "save_checkpoint",
    "load_checkpoint",
    "load_checkpoint_full",
]
