import math

import numpy as np
import pytest
import torch

from hybridflow.errors import ShapeMismatchError
from hybridflow.network import (HybridNet, NetworkConfig, TaskMode, forward,
                                init_parameters)

SMALL = NetworkConfig(depth=4, alpha=0.125)


def rand_input(batch=1, channels=6, h=64, w=64, seed=0):
    rng = np.random.default_rng(seed)
    return rng.random((batch, channels, h, w), dtype=np.float32)


class TestInit:
    def test_deterministic_in_seed(self):
        a = init_parameters(SMALL, seed=11)
        b = init_parameters(SMALL, seed=11)
        assert a.names() == b.names()
        for name in a.names():
            np.testing.assert_array_equal(a.arrays[name], b.arrays[name])

    def test_seed_changes_weights(self):
        a = init_parameters(SMALL, seed=1)
        b = init_parameters(SMALL, seed=2)
        assert any(not np.array_equal(a.arrays[n], b.arrays[n])
                   for n in a.names() if n.endswith(".weight"))

    def test_biases_zero(self):
        ps = init_parameters(SMALL, seed=3)
        for name in ps.names():
            if name.endswith(".bias"):
                assert not ps.arrays[name].any()

    def test_fan_in_bound(self):
        ps = init_parameters(SMALL, seed=4)
        w = ps.arrays["conv1.weight"]  # (8, 6, 7, 7)
        bound = math.sqrt(2.0 / (6 * 7 * 7))
        assert np.abs(w).max() <= bound
        assert np.abs(w).max() > 0.5 * bound  # actually fills the range

    def test_groups_partition(self):
        ps = init_parameters(SMALL, seed=5)
        groups = set(ps.groups.values())
        assert groups == {"encoder", "flow_decoder", "frame_decoder"}
        assert ps.group_of("conv1.weight") == "encoder"
        assert ps.group_of("flow.upconv3.bias") == "flow_decoder"
        assert ps.group_of("frame.predict0.weight") == "frame_decoder"


class TestForward:
    def test_prediction_pyramid(self):
        ps = init_parameters(SMALL, seed=0)
        out = forward(ps, SMALL, rand_input())
        assert [p.scale for p in out.flow] == [8, 4, 2, 1]
        assert [p.values.shape for p in out.flow] == [
            (1, 2, 8, 8), (1, 2, 16, 16), (1, 2, 32, 32), (1, 2, 64, 64)]
        assert [p.values.shape[1] for p in out.frame] == [3, 3, 3, 3]
        assert out.frame[-1].values.shape == (1, 3, 64, 64)

    def test_deterministic(self):
        ps = init_parameters(SMALL, seed=0)
        x = rand_input(seed=5)
        a = forward(ps, SMALL, x)
        b = forward(ps, SMALL, x)
        for pa, pb in zip(a.flow + a.frame, b.flow + b.frame):
            np.testing.assert_array_equal(pa.values, pb.values)

    def test_flow_only_mode(self):
        cfg = NetworkConfig(depth=4, alpha=0.125,
                            task_mode=TaskMode.FLOW_ONLY)
        out = forward(init_parameters(cfg, 0), cfg, rand_input())
        assert out.frame is None
        assert out.flow is not None

    def test_nextframe_only_mode(self):
        cfg = NetworkConfig(depth=4, alpha=0.125,
                            task_mode=TaskMode.NEXTFRAME_ONLY)
        out = forward(init_parameters(cfg, 0), cfg, rand_input())
        assert out.flow is None
        assert out.frame is not None

    def test_zero_parameters_give_constant_outputs(self):
        ps = init_parameters(SMALL, seed=0)
        for name in ps.names():
            ps.arrays[name][:] = 0.0
        out = forward(ps, SMALL, rand_input())
        for p in out.flow:
            np.testing.assert_array_equal(p.values, 0.0)
        for p in out.frame:
            np.testing.assert_array_equal(p.values, 0.5)

    def test_frame_final_clamped_to_unit_range(self):
        ps = init_parameters(SMALL, seed=0)
        out = forward(ps, SMALL, rand_input())
        final = out.frame[-1].values
        assert final.min() >= 0.0 and final.max() <= 1.0

    def test_four_frame_input(self):
        cfg = NetworkConfig(depth=4, alpha=0.125, input_frames=4)
        out = forward(init_parameters(cfg, 0), cfg,
                      rand_input(channels=12))
        assert out.flow[-1].values.shape == (1, 2, 64, 64)

    def test_rejects_wrong_channels(self):
        ps = init_parameters(SMALL, seed=0)
        with pytest.raises(ShapeMismatchError):
            forward(ps, SMALL, rand_input(channels=9))

    def test_rejects_indivisible_dims(self):
        ps = init_parameters(SMALL, seed=0)
        with pytest.raises(ShapeMismatchError):
            forward(ps, SMALL, rand_input(h=60, w=64))


class TestBranchIndependence:
    def test_flow_perturbation_leaves_frame_unchanged(self):
        ps = init_parameters(SMALL, seed=0)
        x = rand_input(seed=1)
        base = forward(ps, SMALL, x)
        ps.arrays["flow.upconv3.weight"][:] += 0.05
        bumped = forward(ps, SMALL, x)
        for pa, pb in zip(base.frame, bumped.frame):
            np.testing.assert_array_equal(pa.values, pb.values)
        assert any(not np.array_equal(pa.values, pb.values)
                   for pa, pb in zip(base.flow, bumped.flow))

    def test_frame_perturbation_leaves_flow_unchanged(self):
        ps = init_parameters(SMALL, seed=0)
        x = rand_input(seed=1)
        base = forward(ps, SMALL, x)
        ps.arrays["frame.predict0.weight"][:] += 0.05
        bumped = forward(ps, SMALL, x)
        for pa, pb in zip(base.flow, bumped.flow):
            np.testing.assert_array_equal(pa.values, pb.values)

    def test_encoder_perturbation_changes_both(self):
        ps = init_parameters(SMALL, seed=0)
        x = rand_input(seed=1)
        base = forward(ps, SMALL, x)
        ps.arrays["conv1.weight"][:] += 0.05
        bumped = forward(ps, SMALL, x)
        assert not np.array_equal(base.flow[-1].values,
                                  bumped.flow[-1].values)
        assert not np.array_equal(base.frame[0].values,
                                  bumped.frame[0].values)


class TestTranslationCovariance:
    def test_interior_shifts_with_input(self):
        cfg = NetworkConfig(depth=2, alpha=0.125, padding_mode="circular")
        net = HybridNet(cfg, seed=0)
        net.eval()
        shift = 4  # 2^depth
        x = torch.from_numpy(rand_input(h=64, w=64, seed=9))
        with torch.no_grad():
            base = net(x)["flow"][-1].numpy()
            rolled = net(torch.roll(x, shifts=(shift, shift),
                                    dims=(2, 3)))["flow"][-1].numpy()
        expected = np.roll(base, shift=(shift, shift), axis=(2, 3))
        m = 16  # margin absorbing decoder border effects and the wrap
        np.testing.assert_allclose(rolled[..., m:-m, m:-m],
                                   expected[..., m:-m, m:-m], atol=1e-5)
