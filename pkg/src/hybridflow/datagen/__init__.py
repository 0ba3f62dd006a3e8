"""Procedural triplet generator with exact ground-truth flow.

Scenes are layered 2-D sprites (rectangles, ellipses, polygons) moving with
constant velocity and rotation rate over a translating textured background.
Because motion is analytic, the flow fields and occlusion masks that the
renderer emits are exact, which makes the generated data usable as an oracle
for the rest of the pipeline.

Two render families exist: the plain one keeps ground truth on the sample
(source SYNTHETIC), the distribution-shifted one uses a different texture
family plus photometric noise and brightness drift and withholds ground truth
(source REAL), storing it in a sibling tree for evaluation only.
"""

from .scene import (GeneratorConfig, ObjectSpec, PhotometricConfig, SceneSpec,
                    random_scene_spec)
from .render import (generate_real_like_triplet, generate_real_like_with_truth,
                     generate_triplet, photometric_consistency_error)
from .dataset import (FORMAT_VERSION, DatasetManifest, build_dataset,
                      load_manifest, load_triplet, load_withheld_truth, mix64)

__all__ = [
    "GeneratorConfig",
    "ObjectSpec",
    "PhotometricConfig",
    "SceneSpec",
    "random_scene_spec",
    "generate_triplet",
    "generate_real_like_triplet",
    "generate_real_like_with_truth",
    "photometric_consistency_error",
    "FORMAT_VERSION",
    "DatasetManifest",
    "build_dataset",
    "load_manifest",
    "load_triplet",
    "load_withheld_truth",
    "mix64",
]
