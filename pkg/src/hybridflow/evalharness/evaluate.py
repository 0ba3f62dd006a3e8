"""Per-dataset metric reports for flow estimation and next-frame synthesis."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from ..datagen import (DatasetManifest, load_manifest, load_triplet,
                       load_withheld_truth)
from ..errors import MissingGroundTruthError
from ..flowio import (MetricsReport, SampleTriplet, Source, endpoint_error,
                      moving_region_mask, psnr, sharpness)
from .predictors import Predictor

DatasetLike = Union[Sequence[SampleTriplet], DatasetManifest, str, Path]


def load_eval_samples(dataset: DatasetLike) -> list[SampleTriplet]:
    """Materialize a dataset as triplets carrying ground truth when it exists.

    For real-like datasets built with withheld truth, the truth records are
    loaded, so evaluation sees the frames the model saw plus the flows it
    never did.
    """
    if isinstance(dataset, (str, Path)):
        dataset = load_manifest(dataset)
    if isinstance(dataset, DatasetManifest):
        if dataset.source is Source.REAL:
            return [load_withheld_truth(dataset, i)
                    for i in range(dataset.sample_count)]
        return [load_triplet(dataset, i) for i in range(dataset.sample_count)]
    return list(dataset)


def _mean(values: Iterable[float]):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def evaluate_flow(predictor: Predictor, dataset: DatasetLike,
                  flow_target: str = "f12") -> MetricsReport:
    """Mean endpoint error of a predictor's full-resolution flow output."""
    samples = load_eval_samples(dataset)
    per_sample = []
    for idx, sample in enumerate(samples):
        gt = getattr(sample, flow_target, None)
        if gt is None:
            raise MissingGroundTruthError(
                f"evaluation sample {idx} lacks {flow_target} ground truth")
        output = predictor(sample)
        if output.flow is None:
            raise MissingGroundTruthError(
                "predictor produced no flow output")
        epe, _ = endpoint_error(output.flow, gt)
        per_sample.append({"index": idx, "epe": epe})
    return MetricsReport(
        sample_count=len(per_sample),
        per_sample=tuple(per_sample),
        mean_epe=_mean(r["epe"] for r in per_sample),
    )


def evaluate_prediction(predictor: Predictor, dataset: DatasetLike,
                        moving_threshold: float = 0.5) -> MetricsReport:
    """PSNR and sharpness of predicted next frames, whole image and within
    the moving region.

    The moving region is where the ground-truth flow into the target frame
    (F23) exceeds the threshold; samples with no moving pixels contribute
    None to the region metrics.
    """
    samples = load_eval_samples(dataset)
    per_sample = []
    for idx, sample in enumerate(samples):
        output = predictor(sample)
        if output.frame is None:
            raise MissingGroundTruthError(
                "predictor produced no frame output")
        if sample.f23 is None:
            raise MissingGroundTruthError(
                f"evaluation sample {idx} lacks f23 ground truth for the "
                "moving-region mask")
        row = {
            "index": idx,
            "psnr_whole": psnr(output.frame, sample.i3),
            "sharpness_whole": sharpness(output.frame, sample.i3),
            "psnr_moving": None,
            "sharpness_moving": None,
        }
        mask = moving_region_mask(sample.f23, moving_threshold)
        if mask.any():
            row["psnr_moving"] = psnr(output.frame, sample.i3, mask=mask)
            interior = mask[:-1, :-1]
            if interior.any():
                row["sharpness_moving"] = sharpness(output.frame, sample.i3,
                                                    mask=mask)
        per_sample.append(row)
    return MetricsReport(
        sample_count=len(per_sample),
        per_sample=tuple(per_sample),
        psnr_whole=_mean(r["psnr_whole"] for r in per_sample),
        psnr_moving=_mean(r["psnr_moving"] for r in per_sample),
        sharpness_whole=_mean(r["sharpness_whole"] for r in per_sample),
        sharpness_moving=_mean(r["sharpness_moving"] for r in per_sample),
    )
