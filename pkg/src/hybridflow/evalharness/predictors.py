"""Predictors: anything mapping a sample to flow and/or next-frame output.

Besides the trained-model wrapper there are three trivial stubs (exact
ground truth, zero flow, copy-the-last-frame) that pin down the metric
plumbing in tests: the oracle must score a perfect 0 EPE, the analytic
stubs must reproduce hand-computed values.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol

import numpy as np
import torch
import torch.nn.functional as F

from ..errors import MissingGroundTruthError
from ..flowio import FlowField, Frame, Minibatch, SampleTriplet
from ..network import HybridNet, load_checkpoint
from ..training import batch_tensors


@dataclass(frozen=True)
class PredictorOutput:
    """Full-resolution outputs; a branch a predictor lacks stays None."""

    flow: Optional[FlowField] = None
    frame: Optional[Frame] = None


class Predictor(Protocol):
    def __call__(self, sample: SampleTriplet) -> PredictorOutput: ...


class GroundTruthPredictor:
    """Emits the sample's own ground truth; the oracle stub."""

    def __init__(self, flow_target: str = "f12"):
        self.flow_target = flow_target

    def __call__(self, sample: SampleTriplet) -> PredictorOutput:
        flow = getattr(sample, self.flow_target)
        if flow is None:
            raise MissingGroundTruthError(
                f"sample lacks {self.flow_target} ground truth")
        return PredictorOutput(flow=flow, frame=sample.i3)


class ZeroFlowPredictor:
    """All-zero flow plus a copied second frame."""

    def __call__(self, sample: SampleTriplet) -> PredictorOutput:
        h, w = sample.shape
        zeros = np.zeros((h, w), dtype=np.float32)
        return PredictorOutput(flow=FlowField(u=zeros, v=zeros.copy()),
                               frame=sample.i2)


class CopySecondFramePredictor:
    """Next-frame baseline that assumes nothing moves."""

    def __call__(self, sample: SampleTriplet) -> PredictorOutput:
        return PredictorOutput(frame=sample.i2)


class ModelPredictor:
    """Runs a trained network on single samples at full resolution.

    Inputs whose sides do not divide the network's downscale factor are
    replicate-padded on the right/bottom for the forward pass and the
    outputs cropped back.
    """

    def __init__(self, model_or_checkpoint):
        if isinstance(model_or_checkpoint, HybridNet):
            self.model = model_or_checkpoint
        else:
            params, config, _ = load_checkpoint(Path(model_or_checkpoint))
            self.model = HybridNet(config)
            self.model.load_parameter_set(params)
        self.model.eval()

    @property
    def config(self):
        return self.model.config

    def __call__(self, sample: SampleTriplet) -> PredictorOutput:
        batch = Minibatch(samples=(sample,), source=sample.source)
        inputs = batch_tensors(batch, self.config.input_frames)["inputs"]
        h, w = sample.shape
        f = self.config.scale_factor
        pad_h = (-h) % f
        pad_w = (-w) % f
        if pad_h or pad_w:
            inputs = F.pad(inputs, (0, pad_w, 0, pad_h), mode="replicate")
        with torch.no_grad():
            out = self.model(inputs)
        flow = None
        if out["flow"] is not None:
            full = out["flow"][-1][0, :, :h, :w].numpy()
            flow = FlowField(u=full[0].copy(), v=full[1].copy())
        frame = None
        if out["frame"] is not None:
            full = out["frame"][-1][0, :, :h, :w].numpy()
            frame = Frame(np.ascontiguousarray(full.transpose(1, 2, 0)))
        return PredictorOutput(flow=flow, frame=frame)
