"""Loss-weight calibration against an independent streaming-variance oracle."""

import numpy as np
import pytest

from hybridflow.datagen import (GeneratorConfig, generate_real_like_triplet,
                                generate_triplet, random_scene_spec)
from hybridflow.errors import (DegenerateVarianceError,
                               MissingGroundTruthError, TooFewSamplesError)
from hybridflow.flowio import Frame, FlowField, SampleTriplet, Source
from hybridflow.training import TrainSchedule, calibrate_weights

# pooled std ratio of the fixed 500-sample set below, pinned once computed
PINNED_RATIO = 0.2097621633424357


def fixed_sample_set(n=500):
    cfg = GeneratorConfig(width=16, height=16, master_seed=2026)
    return [generate_triplet(random_scene_spec(cfg, i)) for i in range(n)]


def pooled_std_streaming(arrays):
    """Chunked Welford: numerically independent of the implementation."""
    n = 0
    mean = 0.0
    m2 = 0.0
    for a in arrays:
        a = np.asarray(a, dtype=np.float64).ravel()
        cn = a.size
        cmean = float(a.mean())
        cm2 = float(((a - cmean) ** 2).sum())
        if n == 0:
            n, mean, m2 = cn, cmean, cm2
        else:
            delta = cmean - mean
            total = n + cn
            mean += delta * cn / total
            m2 += cm2 + delta * delta * n * cn / total
            n = total
    return (m2 / n) ** 0.5


def flat_sample(value_flow, value_frame, h=4, w=4):
    frame = Frame(np.full((h, w, 3), value_frame, dtype=np.float32))
    flow = FlowField(u=np.full((h, w), value_flow, dtype=np.float32),
                     v=np.full((h, w), value_flow, dtype=np.float32))
    return SampleTriplet(i1=frame, i2=frame, i3=frame, f12=flow, f23=flow,
                         source=Source.SYNTHETIC)


class TestCalibrateWeights:
    def test_matches_streaming_oracle(self):
        samples = fixed_sample_set()
        w1, w2 = calibrate_weights(samples)
        sigma1 = pooled_std_streaming(s.f12.to_array() for s in samples)
        sigma2 = pooled_std_streaming(s.i3.values for s in samples)
        assert w2 == 1.0
        assert w1 == pytest.approx(sigma2 / sigma1, rel=1e-9)

    def test_pinned_regression_value(self):
        w1, _ = calibrate_weights(fixed_sample_set())
        assert w1 == pytest.approx(PINNED_RATIO, rel=1e-9)

    def test_too_few_samples(self):
        samples = fixed_sample_set(3)
        with pytest.raises(TooFewSamplesError):
            calibrate_weights(samples)
        w1, w2 = calibrate_weights(samples, allow_fewer=True)
        assert w1 > 0 and w2 == 1.0
        with pytest.raises(TooFewSamplesError):
            calibrate_weights([], allow_fewer=True)

    def test_degenerate_flow_variance(self):
        # constant flows, varying frames
        samples = [flat_sample(2.0, 0.1 * k) for k in range(5)]
        with pytest.raises(DegenerateVarianceError):
            calibrate_weights(samples, allow_fewer=True)

    def test_missing_ground_truth(self):
        cfg = GeneratorConfig(width=16, height=16, master_seed=9,
                              source=Source.REAL)
        samples = [generate_real_like_triplet(random_scene_spec(cfg, i))
                   for i in range(3)]
        with pytest.raises(MissingGroundTruthError):
            calibrate_weights(samples, allow_fewer=True)
        with pytest.raises(MissingGroundTruthError):
            calibrate_weights(fixed_sample_set(3), allow_fewer=True,
                              flow_target="f13")

    def test_flow_target_choice_matters(self):
        samples = fixed_sample_set(40)
        w12, _ = calibrate_weights(samples, allow_fewer=True,
                                   flow_target="f12")
        w23, _ = calibrate_weights(samples, allow_fewer=True,
                                   flow_target="f23")
        assert w12 != w23

    def test_uncalibrated_default_ratio(self):
        # without calibration the schedule falls back to a fixed 1:5 ratio
        s = TrainSchedule()
        assert s.w1 / s.w2 == pytest.approx(0.2)
