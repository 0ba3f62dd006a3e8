"""Hybrid training engine.

Training alternates minibatches between two sources on a fixed cycle: n1
iterations on the real source (no flow ground truth) followed by n2 on the
synthetic source (exact flow ground truth) per period. A switch value s
derived from the iteration index selects the source and gates the flow loss,
so real batches train the frame decoder (and encoder) only, while the flow
decoder and its optimizer moments stay bit-unchanged on those steps.

The total objective is w1 * flow_loss * s + w2 * frame_loss, each loss a
weighted sum of per-scale terms over the decoder's prediction pyramid.
"""

from .schedule import AdamConfig, TrainSchedule, lr_at, switch
from .sampler import (DataSource, InMemorySource, ManifestSource, next_batch,
                      sample_indices, source_draw_ordinal)
from .losses import (batch_tensors, flow_loss, frame_loss, pool_flow_target,
                     pool_frame_target, total_loss)
from .calibrate import calibrate_weights
from .loop import (AdamState, StepRecord, TrainSources, adam_init, adam_update,
                   read_step_records, train, train_step)

__all__ = [
    "AdamConfig",
    "TrainSchedule",
    "switch",
    "lr_at",
    "DataSource",
    "InMemorySource",
    "ManifestSource",
    "next_batch",
    "sample_indices",
    "source_draw_ordinal",
    "batch_tensors",
    "flow_loss",
    "frame_loss",
    "pool_flow_target",
    "pool_frame_target",
    "total_loss",
    "calibrate_weights",
    "AdamState",
    "StepRecord",
    "TrainSources",
    "adam_init",
    "adam_update",
    "train",
    "train_step",
    "read_step_records",
]
