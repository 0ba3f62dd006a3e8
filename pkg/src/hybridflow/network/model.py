"""The model itself, plus functional parameter-set import/export.

Built on torch for the convolution and autodiff machinery; parameters are
exposed as plain numpy arrays through ParameterSet so checkpoints, tests and
the training loop never depend on torch serialization.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch
from torch import nn

from ..errors import ShapeMismatchError
from .config import NetworkConfig
from .layers import LEAKY_SLOPE, LayerSpec, build_layers, encoder_feature_names

ENCODER = "encoder"
FLOW_DECODER = "flow_decoder"
FRAME_DECODER = "frame_decoder"


@dataclass(frozen=True)
class ParameterSet:
    """Ordered name -> float32 array map with a group per layer.

    Names are '<layer>.weight' / '<layer>.bias'; groups partition layers into
    encoder, flow_decoder and frame_decoder.
    """

    arrays: "OrderedDict[str, np.ndarray]"
    groups: dict

    def group_of(self, name: str) -> str:
        layer = name.rsplit(".", 1)[0]
        return self.groups[layer]

    def names(self) -> tuple[str, ...]:
        return tuple(self.arrays.keys())


@dataclass(frozen=True)
class Prediction:
    """One decoder output: (B, C, H, W) values at 1/scale input resolution."""

    values: np.ndarray
    scale: int


@dataclass(frozen=True)
class PredictionSet:
    """Coarse-to-fine prediction pyramids of the active branches."""

    flow: Optional[tuple[Prediction, ...]]
    frame: Optional[tuple[Prediction, ...]]


def _layer_module(spec: LayerSpec, padding_mode: str) -> nn.Module:
    if spec.kind == "upconv":
        return nn.ConvTranspose2d(spec.in_channels, spec.out_channels,
                                  spec.kernel, stride=spec.stride,
                                  padding=spec.padding)
    mode = padding_mode if spec.kind == "conv" else "zeros"
    return nn.Conv2d(spec.in_channels, spec.out_channels, spec.kernel,
                     stride=spec.stride, padding=spec.padding,
                     padding_mode=mode)


class HybridNet(nn.Module):
    """Shared encoder with flow and frame decoder branches."""

    def __init__(self, config: NetworkConfig, seed: int = 0,
                 dtype: torch.dtype = torch.float32):
        super().__init__()
        self.config = config
        enc, flow, frame = build_layers(config)
        self.specs = {ENCODER: enc, FLOW_DECODER: flow, FRAME_DECODER: frame}
        self._levels = encoder_feature_names(config.depth)
        self.encoder = nn.ModuleDict(
            {s.name: _layer_module(s, config.padding_mode) for s in enc})
        self.flow_decoder = nn.ModuleDict(
            {s.name.split(".", 1)[1]: _layer_module(s, "zeros") for s in flow})
        self.frame_decoder = nn.ModuleDict(
            {s.name.split(".", 1)[1]: _layer_module(s, "zeros") for s in frame})
        self._init_weights(seed)
        if dtype is not torch.float32:
            self.to(dtype)

    # --- parameter plumbing -------------------------------------------------

    def _ordered_layers(self):
        for spec in self.specs[ENCODER]:
            yield spec.name, ENCODER, self.encoder[spec.name]
        for spec in self.specs[FLOW_DECODER]:
            yield spec.name, FLOW_DECODER, self.flow_decoder[spec.name.split(".", 1)[1]]
        for spec in self.specs[FRAME_DECODER]:
            yield spec.name, FRAME_DECODER, self.frame_decoder[spec.name.split(".", 1)[1]]

    def parameter_records(self):
        """Yield (canonical name, group, tensor) in a stable order."""
        for name, group, module in self._ordered_layers():
            yield f"{name}.weight", group, module.weight
            yield f"{name}.bias", group, module.bias

    def _init_weights(self, seed: int) -> None:
        # uniform(-b, b) with b = sqrt(2 / fan_in), fan_in = in_ch * kh * kw;
        # numpy generator keeps init independent of torch RNG internals
        rng = np.random.default_rng(seed)
        with torch.no_grad():
            for name, group, module in self._ordered_layers():
                w = module.weight
                if isinstance(module, nn.ConvTranspose2d):
                    in_ch = w.shape[0]
                else:
                    in_ch = w.shape[1]
                bound = math.sqrt(2.0 / (in_ch * w.shape[2] * w.shape[3]))
                values = rng.uniform(-bound, bound, size=tuple(w.shape))
                w.copy_(torch.from_numpy(values.astype(np.float32)))
                module.bias.zero_()

    def export_parameter_set(self) -> ParameterSet:
        arrays = OrderedDict()
        groups = {}
        for name, group, tensor in self.parameter_records():
            arrays[name] = tensor.detach().cpu().numpy().astype(
                np.float32).copy()
            groups[name.rsplit(".", 1)[0]] = group
        return ParameterSet(arrays=arrays, groups=groups)

    def load_parameter_set(self, params: ParameterSet) -> None:
        own = {name: tensor for name, _, tensor in self.parameter_records()}
        if set(own) != set(params.arrays):
            missing = sorted(set(own) ^ set(params.arrays))
            raise ShapeMismatchError(
                f"parameter names do not match the model: {missing[:4]}")
        with torch.no_grad():
            for name, tensor in own.items():
                value = params.arrays[name]
                if tuple(value.shape) != tuple(tensor.shape):
                    raise ShapeMismatchError(
                        f"{name}: checkpoint shape {tuple(value.shape)} != "
                        f"model shape {tuple(tensor.shape)}")
                tensor.copy_(torch.from_numpy(value).to(tensor.dtype))

    # --- forward ------------------------------------------------------------

    def _check_input(self, x: torch.Tensor) -> None:
        if x.ndim != 4:
            raise ShapeMismatchError("input must be (B, C, H, W)")
        if x.shape[1] != self.config.input_channels:
            raise ShapeMismatchError(
                f"expected {self.config.input_channels} input channels, "
                f"got {x.shape[1]}")
        factor = self.config.scale_factor
        if x.shape[2] % factor or x.shape[3] % factor:
            raise ShapeMismatchError(
                f"input dims {tuple(x.shape[2:])} not divisible by {factor}")

    def _encode(self, x: torch.Tensor) -> dict:
        feats = {0: x}
        cur = x
        by_name = {}
        for spec in self.specs[ENCODER]:
            cur = torch.nn.functional.leaky_relu(
                self.encoder[spec.name](cur), LEAKY_SLOPE)
            by_name[spec.name] = cur
        for level, name in self._levels.items():
            feats[level] = by_name[name]
        return feats

    def _decode(self, decoder: nn.ModuleDict, feats: dict,
                shift_output: bool, clamp_final: bool) -> list:
        depth = self.config.depth
        cur = feats[depth]
        raw = []
        outputs = []
        for k in range(depth - 1, -1, -1):
            up = torch.nn.functional.leaky_relu(
                decoder[f"upconv{k}"](cur), LEAKY_SLOPE)
            parts = [up, feats[k]]
            if raw:
                parts.append(torch.nn.functional.interpolate(
                    raw[-1], scale_factor=2, mode="bilinear",
                    align_corners=False))
            cur = torch.cat(parts, dim=1)
            pred = decoder[f"predict{k}"](cur)
            raw.append(pred)
            out = pred + 0.5 if shift_output else pred
            if clamp_final and k == 0:
                out = torch.clamp(out, 0.0, 1.0)
            outputs.append(out)
        return outputs

    def forward(self, x: torch.Tensor, include_flow: bool = True,
                include_frame: bool = True) -> dict:
        """Run active branches; returns coarse-to-fine tensor pyramids.

        Input values are on [0, 1]; normalization to zero mean happens here.
        Frame predictions come back on the [0, 1] scale (final one clamped);
        flow predictions are unbounded. include_flow/include_frame further
        restrict the branches to run (the training loop skips the flow branch
        entirely on real batches, so its parameters never enter the graph).
        """
        self._check_input(x)
        feats = self._encode(x - 0.5)
        mode = self.config.task_mode
        out = {"flow": None, "frame": None}
        if mode.flow_active and include_flow:
            out["flow"] = self._decode(self.flow_decoder, feats,
                                       shift_output=False, clamp_final=False)
        if mode.frame_active and include_frame:
            out["frame"] = self._decode(self.frame_decoder, feats,
                                        shift_output=True, clamp_final=True)
        return out


def init_parameters(config: NetworkConfig, seed: int = 0) -> ParameterSet:
    """Freshly initialized parameters; deterministic in seed."""
    return HybridNet(config, seed=seed).export_parameter_set()


def _pyramid_to_predictions(tensors: list) -> tuple[Prediction, ...]:
    finest = tensors[-1].shape[-1]
    return tuple(
        Prediction(values=t.detach().cpu().numpy().astype(np.float32),
                   scale=finest // t.shape[-1])
        for t in tensors)


def forward(params: ParameterSet, config: NetworkConfig,
            batch_input: np.ndarray) -> PredictionSet:
    """Functional forward pass over a numpy batch (B, C, H, W) on [0, 1]."""
    net = HybridNet(config)
    net.load_parameter_set(params)
    net.eval()
    with torch.no_grad():
        out = net(torch.from_numpy(np.ascontiguousarray(
            batch_input, dtype=np.float32)))
    return PredictionSet(
        flow=None if out["flow"] is None else _pyramid_to_predictions(out["flow"]),
        frame=None if out["frame"] is None else _pyramid_to_predictions(out["frame"]),
    )
