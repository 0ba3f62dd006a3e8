import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from hybridflow.datagen import (GeneratorConfig, build_dataset, load_manifest,
                                load_triplet, load_withheld_truth, mix64,
                                random_scene_spec, generate_triplet)
from hybridflow.errors import (CorruptFileError, IndexOutOfRangeError,
                               InvalidSpecError, MissingGroundTruthError)
from hybridflow.flowio import Source


def tree_digest(root: Path) -> dict:
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file():
            out[str(p.relative_to(root))] = hashlib.sha256(
                p.read_bytes()).hexdigest()
    return out


class TestMix64:
    def test_deterministic(self):
        assert mix64(5, 7) == mix64(5, 7)

    def test_order_sensitive(self):
        assert mix64(5, 7) != mix64(7, 5)

    def test_spreads_small_inputs(self):
        values = {mix64(0, i) for i in range(100)}
        assert len(values) == 100
        assert all(0 <= v < 2 ** 64 for v in values)


class TestBuildDataset:
    def test_contents_and_manifest(self, tmp_path):
        cfg = GeneratorConfig(width=32, height=32, master_seed=1)
        manifest = build_dataset(cfg, 4, tmp_path / "data")
        assert manifest.sample_count == 4
        assert len(manifest.samples) == 4
        for entry in manifest.samples:
            for rel in entry.values():
                assert (manifest.root / rel).is_file()
        assert (manifest.root / "manifest.json").is_file()

    def test_rejects_zero_samples(self, tmp_path):
        with pytest.raises(InvalidSpecError):
            build_dataset(GeneratorConfig(), 0, tmp_path / "data")

    def test_rebuild_is_bit_identical(self, tmp_path):
        cfg = GeneratorConfig(width=32, height=32, master_seed=9)
        build_dataset(cfg, 3, tmp_path / "a")
        build_dataset(cfg, 3, tmp_path / "b")
        assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")

    def test_real_dataset_layout(self, tmp_path):
        cfg = GeneratorConfig(width=32, height=32, master_seed=2,
                              source=Source.REAL, noise_amplitude=0.01)
        manifest = build_dataset(cfg, 2, tmp_path / "real")
        root = manifest.root
        assert not (root / "000000" / "f12.flo").exists()
        assert (root / "withheld" / "000000" / "f12.flo").is_file()
        assert (root / "withheld" / "000000" / "i1.png").is_file()

    def test_no_temp_files_left(self, tmp_path):
        build_dataset(GeneratorConfig(width=32, height=32), 2,
                      tmp_path / "data")
        assert not list((tmp_path / "data").rglob("*.tmp"))


class TestLoadTriplet:
    def test_roundtrip(self, tmp_path):
        cfg = GeneratorConfig(width=32, height=32, master_seed=4)
        manifest = build_dataset(cfg, 2, tmp_path / "data")
        direct = generate_triplet(random_scene_spec(cfg, 1))
        loaded = load_triplet(manifest, 1)
        # flows survive exactly; frames survive after 8-bit quantization
        np.testing.assert_array_equal(loaded.f12.u, direct.f12.u)
        np.testing.assert_array_equal(loaded.f23.v, direct.f23.v)
        np.testing.assert_array_equal(loaded.occlusion12, direct.occlusion12)
        np.testing.assert_array_equal(loaded.i1.to_uint8(), direct.i1.to_uint8())
        np.testing.assert_array_equal(loaded.i3.to_uint8(), direct.i3.to_uint8())

    def test_manifest_roundtrip(self, tmp_path):
        cfg = GeneratorConfig(width=32, height=32, master_seed=4)
        built = build_dataset(cfg, 2, tmp_path / "data")
        loaded = load_manifest(tmp_path / "data")
        assert loaded.sample_count == built.sample_count
        assert loaded.config_hash == built.config_hash
        assert loaded.source == built.source
        assert loaded.samples == built.samples

    def test_index_out_of_range(self, tmp_path):
        manifest = build_dataset(GeneratorConfig(width=32, height=32), 2,
                                 tmp_path / "data")
        with pytest.raises(IndexOutOfRangeError):
            load_triplet(manifest, 2)
        with pytest.raises(IndexOutOfRangeError):
            load_triplet(manifest, -1)

    def test_truncated_flo_is_corrupt(self, tmp_path):
        manifest = build_dataset(GeneratorConfig(width=32, height=32), 1,
                                 tmp_path / "data")
        flo = manifest.root / "000000" / "f12.flo"
        flo.write_bytes(flo.read_bytes()[:20])
        with pytest.raises(CorruptFileError):
            load_triplet(manifest, 0)

    def test_missing_file_is_corrupt(self, tmp_path):
        manifest = build_dataset(GeneratorConfig(width=32, height=32), 1,
                                 tmp_path / "data")
        (manifest.root / "000000" / "i2.png").unlink()
        with pytest.raises(CorruptFileError):
            load_triplet(manifest, 0)

    def test_version_check(self, tmp_path):
        build_dataset(GeneratorConfig(width=32, height=32), 1,
                      tmp_path / "data")
        path = tmp_path / "data" / "manifest.json"
        data = json.loads(path.read_text())
        data["format_version"] = 99
        path.write_text(json.dumps(data))
        with pytest.raises(CorruptFileError):
            load_manifest(tmp_path / "data")


class TestWithheldTruth:
    def test_load_for_real_dataset(self, tmp_path):
        cfg = GeneratorConfig(width=32, height=32, master_seed=6,
                              source=Source.REAL)
        manifest = build_dataset(cfg, 2, tmp_path / "real")
        sample = load_triplet(manifest, 0)
        assert sample.source is Source.REAL
        assert sample.f12 is None
        truth = load_withheld_truth(manifest, 0)
        assert truth.f12 is not None and truth.f23 is not None
        assert truth.occlusion12 is not None
        np.testing.assert_array_equal(truth.i1.to_uint8(),
                                      sample.i1.to_uint8())

    def test_rejected_for_synthetic_dataset(self, tmp_path):
        manifest = build_dataset(GeneratorConfig(width=32, height=32), 1,
                                 tmp_path / "data")
        with pytest.raises(MissingGroundTruthError):
            load_withheld_truth(manifest, 0)
