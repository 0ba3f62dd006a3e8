"""Loss-weight calibration from pooled target statistics."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import (DegenerateVarianceError, MissingGroundTruthError,
                      TooFewSamplesError)
from ..flowio import SampleTriplet

DEFAULT_MIN_SAMPLES = 500


def calibrate_weights(samples: Sequence[SampleTriplet],
                      min_samples: int = DEFAULT_MIN_SAMPLES,
                      allow_fewer: bool = False,
                      flow_target: str = "f12") -> tuple[float, float]:
    """Weight ratio matching the two losses' native scales.

    Pools every flow-target component value into one population (std sigma1)
    and every target-frame pixel value into another (std sigma2), then
    returns (sigma2 / sigma1, 1.0) so the flow term is scaled to the frame
    term's magnitude. Population standard deviations (ddof=0).
    """
    if flow_target not in ("f12", "f23"):
        raise MissingGroundTruthError(f"unknown flow target {flow_target!r}")
    n = len(samples)
    if n < min_samples and not allow_fewer:
        raise TooFewSamplesError(
            f"calibration needs at least {min_samples} samples, got {n}; "
            "pass allow_fewer=True to override")
    if n == 0:
        raise TooFewSamplesError("calibration needs at least one sample")

    # Pooled sums in float64; datasets are small enough to keep exact.
    flow_n = 0
    flow_sum = 0.0
    flow_sumsq = 0.0
    frame_n = 0
    frame_sum = 0.0
    frame_sumsq = 0.0
    for sample in samples:
        flow = getattr(sample, flow_target)
        if flow is None:
            raise MissingGroundTruthError(
                f"sample lacks {flow_target} ground truth")
        comp = flow.to_array().astype(np.float64)
        flow_n += comp.size
        flow_sum += float(comp.sum())
        flow_sumsq += float((comp * comp).sum())
        pix = sample.i3.values.astype(np.float64)
        frame_n += pix.size
        frame_sum += float(pix.sum())
        frame_sumsq += float((pix * pix).sum())

    sigma1 = float(np.sqrt(max(0.0, flow_sumsq / flow_n
                               - (flow_sum / flow_n) ** 2)))
    sigma2 = float(np.sqrt(max(0.0, frame_sumsq / frame_n
                               - (frame_sum / frame_n) ** 2)))
    if sigma1 == 0.0:
        raise DegenerateVarianceError(
            "flow targets are constant; weight ratio undefined")
    return sigma2 / sigma1, 1.0
