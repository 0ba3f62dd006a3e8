"""Multi-resolution losses and batch tensor assembly.

Per-scale ground truth comes from average-pooling the full-resolution target
by the scale factor; flow values are additionally divided by the factor so
displacements stay in the units of the coarser pixel grid. The endpoint error
is an exact sqrt wherever it is nonzero (so analytic examples hold
bit-exactly) with the sqrt's singular point at zero masked out, keeping the
gradient finite everywhere.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
import torch
import torch.nn.functional as F

from ..errors import (MissingGroundTruthError, ShapeMismatchError,
                      SourceMismatchError)
from ..flowio import Minibatch, Source
from ..network import TaskMode
from .schedule import TrainSchedule

# sqrt input floor used only under the zero-error mask; never visible in
# the loss value, it just bounds the sqrt backward before the mask zeroes it
_EPE_TINY = 1e-24


def pool_flow_target(gt: torch.Tensor, factor: int) -> torch.Tensor:
    """Ground-truth flow at 1/factor resolution, in coarse-grid pixel units."""
    if factor == 1:
        return gt
    return F.avg_pool2d(gt, factor) / factor


def pool_frame_target(gt: torch.Tensor, factor: int) -> torch.Tensor:
    """Ground-truth image at 1/factor resolution."""
    if factor == 1:
        return gt
    return F.avg_pool2d(gt, factor)


def _check_levels(preds: Sequence[torch.Tensor], gt: torch.Tensor,
                  channels: int) -> list[int]:
    h, w = gt.shape[2], gt.shape[3]
    factors = []
    for p in preds:
        if p.shape[0] != gt.shape[0] or p.shape[1] != channels:
            raise ShapeMismatchError(
                f"prediction shape {tuple(p.shape)} incompatible with "
                f"target {tuple(gt.shape)}")
        if h % p.shape[2] or w % p.shape[3]:
            raise ShapeMismatchError(
                f"prediction dims {tuple(p.shape[2:])} do not divide "
                f"target dims {(h, w)}")
        fh, fw = h // p.shape[2], w // p.shape[3]
        if fh != fw:
            raise ShapeMismatchError("anisotropic prediction scale")
        factors.append(fh)
    return factors


def _resolve_weights(level_weights, levels: int) -> Sequence[float]:
    if level_weights is None:
        return (1.0,) * levels
    if len(level_weights) != levels:
        raise ShapeMismatchError(
            f"{len(level_weights)} level weights for {levels} predictions")
    return level_weights


def flow_loss(preds: Sequence[torch.Tensor], gt: torch.Tensor,
              level_weights: Optional[Sequence[float]] = None) -> torch.Tensor:
    """Weighted sum over scales of the mean per-pixel endpoint error."""
    factors = _check_levels(preds, gt, channels=2)
    weights = _resolve_weights(level_weights, len(preds))
    total = None
    for w, p, f in zip(weights, preds, factors):
        target = pool_flow_target(gt, f)
        diff = p - target
        sq = (diff * diff).sum(dim=1)
        epe = torch.where(sq > 0, sq.clamp_min(_EPE_TINY).sqrt(), sq)
        term = w * epe.mean()
        total = term if total is None else total + term
    return total


def frame_loss(preds: Sequence[torch.Tensor], gt: torch.Tensor,
               level_weights: Optional[Sequence[float]] = None) -> torch.Tensor:
    """Weighted sum over scales of the mean absolute intensity error."""
    factors = _check_levels(preds, gt, channels=3)
    weights = _resolve_weights(level_weights, len(preds))
    total = None
    for w, p, f in zip(weights, preds, factors):
        term = w * (p - pool_frame_target(gt, f)).abs().mean()
        total = term if total is None else total + term
    return total


def _frames_tensor(batch: Minibatch, name: str) -> torch.Tensor:
    stack = np.stack([getattr(s, name).values for s in batch.samples])
    return torch.from_numpy(stack.transpose(0, 3, 1, 2).copy())


def _flow_tensor(batch: Minibatch, name: str) -> torch.Tensor:
    stack = np.stack([getattr(s, name).to_array() for s in batch.samples])
    return torch.from_numpy(stack.transpose(0, 3, 1, 2).copy())


def batch_tensors(batch: Minibatch, input_frames: int = 2) -> dict:
    """Model input and available targets for a minibatch.

    Input stacks the observed frames channel-wise in time order; with
    input_frames=4 the missing history is padded by repeating the oldest
    observed frame. Targets: 'i3' always; 'f12'/'f23' when the batch carries
    ground truth.
    """
    if input_frames not in (2, 4):
        raise ShapeMismatchError("input_frames must be 2 or 4")
    i1 = _frames_tensor(batch, "i1")
    i2 = _frames_tensor(batch, "i2")
    if input_frames == 2:
        inputs = torch.cat([i1, i2], dim=1)
    else:
        inputs = torch.cat([i1, i1, i1, i2], dim=1)
    out = {"inputs": inputs, "i3": _frames_tensor(batch, "i3")}
    if batch.samples[0].f12 is not None:
        out["f12"] = _flow_tensor(batch, "f12")
        out["f23"] = _flow_tensor(batch, "f23")
    return out


def total_loss(batch_preds: dict, batch: Minibatch, schedule: TrainSchedule,
               s: int, task_mode: TaskMode,
               targets: Optional[dict] = None) -> tuple[torch.Tensor, dict]:
    """Gated objective w1*flow*s + w2*frame and its per-term breakdown.

    Returns (loss tensor, record fields); absent terms are recorded as None,
    not zero. `targets` may pass precomputed batch_tensors output to avoid
    rebuilding tensors.
    """
    if s not in (0, 1):
        raise SourceMismatchError(f"switch value {s} not in {{0, 1}}")
    expected = Source.REAL if s == 0 else Source.SYNTHETIC
    if batch.source is not expected:
        raise SourceMismatchError(
            f"s={s} requires a {expected.value} batch, got {batch.source.value}")
    if targets is None:
        targets = batch_tensors(batch)
    loss = None
    loss_flow = None
    loss_frame = None
    if s == 1 and task_mode.flow_active:
        preds = batch_preds.get("flow")
        if preds is None:
            raise MissingGroundTruthError(
                "flow predictions missing from a synthetic step")
        key = task_mode.flow_target
        if key not in targets:
            raise MissingGroundTruthError(
                f"batch lacks {key} ground truth required at s=1")
        flow_term = flow_loss(preds, targets[key], schedule.level_weights)
        loss_flow = float(flow_term.detach())
        loss = schedule.w1 * flow_term
    if task_mode.frame_active:
        preds = batch_preds.get("frame")
        if preds is None:
            raise MissingGroundTruthError("frame predictions missing")
        frame_term = frame_loss(preds, targets["i3"], schedule.level_weights)
        loss_frame = float(frame_term.detach())
        term = schedule.w2 * frame_term
        loss = term if loss is None else loss + term
    if loss is None:
        loss = torch.zeros(())
    fields = {
        "loss_total": float(loss.detach()),
        "loss_flow": loss_flow,
        "loss_frame": loss_frame,
    }
    return loss, fields
