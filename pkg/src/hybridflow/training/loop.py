"""Training loop: gated two-task updates, checkpoints, structured logs.

The optimizer is a plain per-parameter ADAM written out long-hand so the
gating guarantee is auditable: parameters whose gradient is None after a
step are skipped outright, leaving their moment buffers and step counts
bit-identical. Moments live in the model dtype and serialize as float32,
which makes checkpoint resume reproduce the uninterrupted run exactly.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import torch

from ..errors import (CheckpointIOError, EmptySourceError, InvalidCyclesError,
                      NonFiniteLossError)
from ..flowio import Minibatch, Source
from ..network import (HybridNet, NetworkConfig, TaskMode, load_checkpoint_full,
                       save_checkpoint)
from .losses import batch_tensors, total_loss
from .sampler import DataSource, next_batch
from .schedule import TrainSchedule, lr_at

LOG_FILENAME = "train_log.jsonl"


@dataclass
class StepRecord:
    """One training step, as logged. loss_flow is None when the step had
    no supervised term (s=0 or a frame-only mode)."""

    iteration: int
    s: int
    source: str
    loss_total: float
    loss_flow: Optional[float]
    loss_frame: Optional[float]
    lr: float
    wall_time: float

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "s": self.s,
            "source": self.source,
            "loss_total": self.loss_total,
            "loss_flow": self.loss_flow,
            "loss_frame": self.loss_frame,
            "lr": self.lr,
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, row: dict) -> "StepRecord":
        return cls(iteration=int(row["iteration"]), s=int(row["s"]),
                   source=str(row["source"]),
                   loss_total=float(row["loss_total"]),
                   loss_flow=(None if row.get("loss_flow") is None
                              else float(row["loss_flow"])),
                   loss_frame=(None if row.get("loss_frame") is None
                               else float(row["loss_frame"])),
                   lr=float(row["lr"]), wall_time=float(row["wall_time"]))


def read_step_records(path) -> list[StepRecord]:
    """Parse a JSONL training log."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(StepRecord.from_dict(json.loads(line)))
    return records


@dataclass
class TrainSources:
    """Datasets feeding the two halves of the schedule."""

    real: Optional[DataSource] = None
    synthetic: Optional[DataSource] = None


@dataclass
class AdamState:
    """First/second moment buffers and per-parameter step counts."""

    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    steps: dict = field(default_factory=dict)


def adam_init(model: HybridNet) -> AdamState:
    state = AdamState()
    for name, _, tensor in model.parameter_records():
        state.m[name] = torch.zeros_like(tensor)
        state.v[name] = torch.zeros_like(tensor)
        state.steps[name] = 0
    return state


def adam_update(model: HybridNet, state: AdamState, lr: float,
                schedule: TrainSchedule) -> None:
    """One ADAM step over parameters that received a gradient."""
    cfg = schedule.adam
    with torch.no_grad():
        for name, _, param in model.parameter_records():
            grad = param.grad
            if grad is None:
                continue
            t = state.steps[name] + 1
            state.steps[name] = t
            m, v = state.m[name], state.v[name]
            m.mul_(cfg.beta1).add_(grad, alpha=1.0 - cfg.beta1)
            v.mul_(cfg.beta2).addcmul_(grad, grad, value=1.0 - cfg.beta2)
            m_hat = m / (1.0 - cfg.beta1 ** t)
            v_hat = v / (1.0 - cfg.beta2 ** t)
            param.addcdiv_(m_hat, v_hat.sqrt().add_(cfg.epsilon), value=-lr)


def _model_dtype(model: HybridNet) -> torch.dtype:
    return next(model.parameters()).dtype


def train_step(model: HybridNet, state: AdamState, batch: Minibatch, s: int,
               schedule: TrainSchedule, i: int) -> StepRecord:
    """Forward, gated loss, backward, ADAM update. Mutates model and state.

    On REAL batches the flow branch is never run, so its parameters keep
    grad=None and the optimizer leaves them untouched.
    """
    dtype = _model_dtype(model)
    tensors = batch_tensors(batch, model.config.input_frames)
    if dtype is not torch.float32:
        tensors = {k: t.to(dtype) for k, t in tensors.items()}
    model.zero_grad(set_to_none=True)
    preds = model(tensors["inputs"], include_flow=(s == 1))
    loss, fields = total_loss(preds, batch, schedule, s,
                              model.config.task_mode, targets=tensors)
    lr = lr_at(i, schedule)
    record = StepRecord(iteration=i, s=s, source=batch.source.value,
                        loss_total=fields["loss_total"],
                        loss_flow=fields["loss_flow"],
                        loss_frame=fields["loss_frame"],
                        lr=lr, wall_time=time.time())
    if not math.isfinite(record.loss_total):
        raise NonFiniteLossError(
            f"non-finite loss {record.loss_total} at iteration {i}",
            record=record)
    loss.backward()
    adam_update(model, state, lr, schedule)
    return record


def _validate_plan(config: NetworkConfig, schedule: TrainSchedule,
                   sources: TrainSources) -> None:
    mode = config.task_mode
    if mode.flow_active and schedule.n1 > 0 and schedule.n2 == 0:
        raise InvalidCyclesError(
            "n2=0 yields no supervised batches; the flow task would never "
            "receive a gradient")
    if mode is TaskMode.FLOW_ONLY and schedule.n1 > 0:
        raise InvalidCyclesError(
            "flow-only training has no objective on real batches; use n1=0")
    needs_real = schedule.n1 > 0
    needs_synth = schedule.n1 == 0 or schedule.n2 > 0
    if needs_real and (sources.real is None or len(sources.real) == 0):
        raise EmptySourceError("schedule draws real batches but no real "
                               "source was provided")
    if needs_synth and (sources.synthetic is None
                        or len(sources.synthetic) == 0):
        raise EmptySourceError("schedule draws synthetic batches but no "
                               "synthetic source was provided")


def _save_state(model: HybridNet, state: AdamState, config: NetworkConfig,
                iteration: int, path: Path) -> None:
    optimizer = {}
    for name in state.m:
        optimizer[f"m.{name}"] = state.m[name].detach().cpu().numpy().astype(
            np.float32)
        optimizer[f"v.{name}"] = state.v[name].detach().cpu().numpy().astype(
            np.float32)
    extra = {"adam_steps": {k: int(n) for k, n in state.steps.items()}}
    save_checkpoint(model.export_parameter_set(), config, iteration, path,
                    optimizer=optimizer, extra=extra)


def _restore_state(model: HybridNet, state: AdamState, path) -> int:
    data = load_checkpoint_full(path)
    model.load_parameter_set(data.params)
    steps = data.extra.get("adam_steps", {})
    for name in state.m:
        m_arr = data.optimizer.get(f"m.{name}")
        v_arr = data.optimizer.get(f"v.{name}")
        if m_arr is None or v_arr is None:
            raise CheckpointIOError(
                f"checkpoint lacks optimizer state for {name}; cannot resume")
        if tuple(m_arr.shape) != tuple(state.m[name].shape):
            raise CheckpointIOError(
                f"optimizer state shape mismatch for {name}")
        dtype = state.m[name].dtype
        state.m[name] = torch.from_numpy(m_arr.copy()).to(dtype)
        state.v[name] = torch.from_numpy(v_arr.copy()).to(dtype)
        state.steps[name] = int(steps.get(name, 0))
    return data.iteration


def train(config: NetworkConfig, schedule: TrainSchedule,
          sources: TrainSources, checkpoint_every: int, out,
          resume_from=None) -> tuple[Path, list[StepRecord]]:
    """Run iterations start..total_iterations-1 and return the final
    checkpoint path plus all StepRecords produced by this call.

    Batch selection is a pure function of (iteration, schedule), so a run
    resumed from a checkpoint replays the exact remaining step sequence.
    """
    _validate_plan(config, schedule, sources)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    model = HybridNet(config, seed=schedule.seed)
    state = adam_init(model)
    start = 0
    if resume_from is not None:
        start = _restore_state(model, state, resume_from)
    log_path = out / LOG_FILENAME
    records = []
    mode = "a" if resume_from is not None else "w"
    with open(log_path, mode, encoding="utf-8") as log:
        for i in range(start, schedule.total_iterations):
            batch, s = next_batch(i, sources.real, sources.synthetic, schedule)
            record = train_step(model, state, batch, s, schedule, i)
            records.append(record)
            log.write(json.dumps(record.to_dict()) + "\n")
            done = i + 1
            if (checkpoint_every > 0 and done % checkpoint_every == 0
                    and done < schedule.total_iterations):
                _save_state(model, state, config, done,
                            out / f"checkpoint_{done:07d}.ckpt")
    final_path = out / "checkpoint_final.ckpt"
    _save_state(model, state, config, schedule.total_iterations, final_path)
    return final_path, records
