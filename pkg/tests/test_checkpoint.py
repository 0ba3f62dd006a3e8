import numpy as np
import pytest

from hybridflow.errors import (CheckpointIOError, FormatVersionMismatchError,
                               ShapeMismatchError)
from hybridflow.network import (CHECKPOINT_MAGIC, HybridNet, NetworkConfig,
                                TaskMode, init_parameters, load_checkpoint,
                                load_checkpoint_full, save_checkpoint)

CFG = NetworkConfig(depth=3, alpha=0.125, task_mode=TaskMode.NEXTFLOW_NEXTFRAME)


def test_round_trip_bit_exact(tmp_path):
    ps = init_parameters(CFG, seed=8)
    path = tmp_path / "model.ckpt"
    save_checkpoint(ps, CFG, 1234, path)
    loaded, config, iteration = load_checkpoint(path)
    assert config == CFG
    assert iteration == 1234
    assert loaded.names() == ps.names()
    for name in ps.names():
        np.testing.assert_array_equal(loaded.arrays[name], ps.arrays[name])
        assert loaded.arrays[name].dtype == np.float32
    assert loaded.groups == ps.groups


def test_optimizer_state_round_trip(tmp_path):
    ps = init_parameters(CFG, seed=8)
    rng = np.random.default_rng(0)
    opt = {f"m.{n}": rng.normal(size=ps.arrays[n].shape).astype(np.float32)
           for n in list(ps.names())[:4]}
    extra = {"adam_steps": {"conv1.weight": 17}}
    path = tmp_path / "model.ckpt"
    save_checkpoint(ps, CFG, 5, path, optimizer=opt, extra=extra)
    data = load_checkpoint_full(path)
    assert set(data.optimizer) == set(opt)
    for key, value in opt.items():
        np.testing.assert_array_equal(data.optimizer[key], value)
    assert data.extra == extra


def test_load_into_incompatible_model(tmp_path):
    ps = init_parameters(CFG, seed=8)
    path = tmp_path / "model.ckpt"
    save_checkpoint(ps, CFG, 0, path)
    loaded, _, _ = load_checkpoint(path)
    other = HybridNet(NetworkConfig(depth=2, alpha=0.125))
    with pytest.raises(ShapeMismatchError):
        other.load_parameter_set(loaded)
    # same names but different widths also fails
    wider = HybridNet(NetworkConfig(depth=3, alpha=0.25))
    with pytest.raises(ShapeMismatchError):
        wider.load_parameter_set(loaded)


def test_truncated_file(tmp_path):
    ps = init_parameters(CFG, seed=8)
    path = tmp_path / "model.ckpt"
    save_checkpoint(ps, CFG, 0, path)
    blob = path.read_bytes()
    path.write_bytes(blob[:len(blob) // 2])
    with pytest.raises(CheckpointIOError):
        load_checkpoint(path)


def test_bad_magic(tmp_path):
    path = tmp_path / "model.ckpt"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(CheckpointIOError):
        load_checkpoint(path)


def test_version_mismatch(tmp_path):
    ps = init_parameters(CFG, seed=8)
    path = tmp_path / "model.ckpt"
    save_checkpoint(ps, CFG, 0, path)
    blob = bytearray(path.read_bytes())
    assert blob[:4] == CHECKPOINT_MAGIC
    blob[4] = 99  # bump the little-endian version word
    path.write_bytes(bytes(blob))
    with pytest.raises(FormatVersionMismatchError):
        load_checkpoint(path)


def test_trailing_garbage(tmp_path):
    ps = init_parameters(CFG, seed=8)
    path = tmp_path / "model.ckpt"
    save_checkpoint(ps, CFG, 0, path)
    path.write_bytes(path.read_bytes() + b"extra")
    with pytest.raises(CheckpointIOError):
        load_checkpoint(path)


def test_no_temp_file_left(tmp_path):
    ps = init_parameters(CFG, seed=8)
    save_checkpoint(ps, CFG, 0, tmp_path / "model.ckpt")
    assert not list(tmp_path.glob("*.tmp"))
