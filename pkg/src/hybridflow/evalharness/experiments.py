"""Desk-scale experiment drivers: ratio sweeps and domain-shift comparisons.

Every (ratio, seed) combination trains its own model under its own output
subdirectory; reports aggregate medians over seeds. Runs are deterministic,
so a finished subdirectory whose recorded plan matches is reused rather than
retrained.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..datagen import DatasetManifest, load_manifest
from ..errors import InvalidConfigError
from ..network import NetworkConfig
from ..training import ManifestSource, TrainSchedule, TrainSources, train
from .evaluate import evaluate_flow, evaluate_prediction, load_eval_samples
from .predictors import ModelPredictor

DEFAULT_RATIOS = ((0, 1), (1, 9), (1, 5), (1, 1), (4, 1))


@dataclass(frozen=True)
class ExperimentConfig:
    """Datasets, model shape, schedule template, and output root."""

    network: NetworkConfig
    schedule: TrainSchedule
    synth_train: Path
    real_train: Path
    eval_real: Path
    out_dir: Path
    eval_synth: Optional[Path] = None
    seeds: tuple[int, ...] = (0, 1, 2)
    ratios: tuple[tuple[int, int], ...] = DEFAULT_RATIOS

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "ratios",
                           tuple((int(a), int(b)) for a, b in self.ratios))
        if not self.seeds:
            raise InvalidConfigError("need at least one seed")
        for name in ("synth_train", "real_train", "eval_real", "out_dir",
                     "eval_synth"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, Path(value))
        for name in ("synth_train", "real_train", "eval_real"):
            if not getattr(self, name).exists():
                raise InvalidConfigError(f"{name} path does not exist: "
                                         f"{getattr(self, name)}")
        if self.eval_synth is not None and not self.eval_synth.exists():
            raise InvalidConfigError(
                f"eval_synth path does not exist: {self.eval_synth}")


def ratio_label(n1: int, n2: int) -> str:
    base = f"{n1}:{n2}"
    return f"{base} (supervised-only)" if n1 == 0 else base


def _plan_dict(config: ExperimentConfig, schedule: TrainSchedule) -> dict:
    return {"network": config.network.to_dict(),
            "schedule": schedule.to_dict()}


def _train_one(config: ExperimentConfig, n1: int, n2: int,
               seed: int) -> Path:
    """Train (or reuse) the model for one (ratio, seed) cell."""
    schedule = replace(config.schedule, n1=n1, n2=n2, seed=seed)
    run_dir = config.out_dir / f"run_{n1}to{n2}_seed{seed}"
    final = run_dir / "checkpoint_final.ckpt"
    plan = _plan_dict(config, schedule)
    plan_path = run_dir / "plan.json"
    if final.exists() and plan_path.exists():
        if json.loads(plan_path.read_text()) == plan:
            return final
    sources = TrainSources(
        real=ManifestSource(load_manifest(config.real_train), cache=True),
        synthetic=ManifestSource(load_manifest(config.synth_train),
                                 cache=True),
    )
    run_dir.mkdir(parents=True, exist_ok=True)
    plan_path.write_text(json.dumps(plan, indent=1, sort_keys=True))
    final, _ = train(config.network, schedule, sources, checkpoint_every=0,
                     out=run_dir)
    return final


def _evaluate_cell(config: ExperimentConfig, checkpoint: Path,
                   samples) -> dict:
    predictor = ModelPredictor(checkpoint)
    metrics = {"epe": None, "psnr": None}
    mode = config.network.task_mode
    if mode.flow_active:
        flow = evaluate_flow(predictor, samples,
                             flow_target=mode.flow_target)
        metrics["epe"] = flow.mean_epe
    if mode.frame_active:
        frame = evaluate_prediction(predictor, samples)
        metrics["psnr"] = frame.psnr_whole
    return metrics


def _median(values: Sequence[Optional[float]]):
    values = [v for v in values if v is not None]
    return float(np.median(values)) if values else None


def _write_csv(path: Path, fieldnames: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k) for k in fieldnames})


def _plot_sweep(rows: list[dict], path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [row["ratio"] for row in rows]
    epes = [row["median_epe"] for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(range(len(labels)), epes, marker="o")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels)
    ax.set_xlabel("real:synthetic cycle ratio")
    ax.set_ylabel("median held-out EPE (px)")
    ax.set_title("Cycle-ratio sweep")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def ratio_sweep(config: ExperimentConfig,
                ratios: Optional[Sequence[tuple[int, int]]] = None,
                seeds: Optional[Sequence[int]] = None) -> dict:
    """Train every (ratio, seed) cell and tabulate median metrics per ratio.

    Writes ratio_sweep.json, ratio_sweep.csv, and ratio_sweep.png under the
    experiment's output directory and returns the table.
    """
    ratios = config.ratios if ratios is None else tuple(ratios)
    seeds = config.seeds if seeds is None else tuple(seeds)
    eval_samples = load_eval_samples(config.eval_real)
    rows = []
    for n1, n2 in ratios:
        per_seed = {}
        for seed in seeds:
            checkpoint = _train_one(config, n1, n2, seed)
            per_seed[str(seed)] = _evaluate_cell(config, checkpoint,
                                                 eval_samples)
        rows.append({
            "ratio": f"{n1}:{n2}",
            "label": ratio_label(n1, n2),
            "n1": n1,
            "n2": n2,
            "median_epe": _median([c["epe"] for c in per_seed.values()]),
            "median_psnr": _median([c["psnr"] for c in per_seed.values()]),
            "per_seed": per_seed,
        })
    table = {"seeds": list(seeds), "rows": rows}
    config.out_dir.mkdir(parents=True, exist_ok=True)
    (config.out_dir / "ratio_sweep.json").write_text(
        json.dumps(table, indent=1, sort_keys=True))
    _write_csv(config.out_dir / "ratio_sweep.csv",
               ["ratio", "label", "n1", "n2", "median_epe", "median_psnr"],
               rows)
    _plot_sweep(rows, config.out_dir / "ratio_sweep.png")
    return table


def domain_shift_experiment(config: ExperimentConfig,
                            seeds: Optional[Sequence[int]] = None,
                            hybrid_ratio: tuple[int, int] = (1, 5)) -> dict:
    """Supervised-only baseline vs hybrid schedule on held-out real-like data.

    Rows one and two compare the two schedules on the real-like set; when a
    synthetic held-out set is configured, two more rows repeat the comparison
    in-domain. Writes domain_shift.json and domain_shift.csv.
    """
    seeds = config.seeds if seeds is None else tuple(seeds)
    plans = [("supervised-only", (0, 1)),
             (f"hybrid-{hybrid_ratio[0]}:{hybrid_ratio[1]}", hybrid_ratio)]
    checkpoints = {}
    for label, (n1, n2) in plans:
        for seed in seeds:
            checkpoints[(label, seed)] = _train_one(config, n1, n2, seed)

    eval_sets = [("real", load_eval_samples(config.eval_real))]
    if config.eval_synth is not None:
        eval_sets.append(("synthetic", load_eval_samples(config.eval_synth)))

    rows = []
    for dataset_name, samples in eval_sets:
        for label, _ in plans:
            per_seed = {}
            for seed in seeds:
                cell = _evaluate_cell(config, checkpoints[(label, seed)],
                                      samples)
                per_seed[str(seed)] = cell
            rows.append({
                "label": label,
                "dataset": dataset_name,
                "median_epe": _median([c["epe"] for c in per_seed.values()]),
                "median_psnr": _median([c["psnr"]
                                        for c in per_seed.values()]),
                "per_seed": per_seed,
            })
    report = {"seeds": list(seeds), "rows": rows}
    config.out_dir.mkdir(parents=True, exist_ok=True)
    (config.out_dir / "domain_shift.json").write_text(
        json.dumps(report, indent=1, sort_keys=True))
    _write_csv(config.out_dir / "domain_shift.csv",
               ["label", "dataset", "median_epe", "median_psnr"], rows)
    return report
