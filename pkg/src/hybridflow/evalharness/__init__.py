"""Evaluation harness: metric reports and desk-scale experiment drivers.

Flow quality is endpoint error against held-back ground truth; next-frame
quality is PSNR/sharpness over the whole image and over the region the
ground-truth flow marks as moving. The experiment drivers train small
models per (cycle ratio, seed) and tabulate medians, reproducing the
structure of the full-scale comparisons at desk size.
"""

from .predictors import (CopySecondFramePredictor, GroundTruthPredictor,
                         ModelPredictor, Predictor, PredictorOutput,
                         ZeroFlowPredictor)
from .evaluate import evaluate_flow, evaluate_prediction, load_eval_samples
from .experiments import (DEFAULT_RATIOS, ExperimentConfig,
                          domain_shift_experiment, ratio_label, ratio_sweep)

__all__ = [
    "Predictor",
    "PredictorOutput",
    "GroundTruthPredictor",
    "ZeroFlowPredictor",
    "CopySecondFramePredictor",
    "ModelPredictor",
    "evaluate_flow",
    "evaluate_prediction",
    "load_eval_samples",
    "ExperimentConfig",
    "DEFAULT_RATIOS",
    "ratio_label",
    "ratio_sweep",
    "domain_shift_experiment",
]
