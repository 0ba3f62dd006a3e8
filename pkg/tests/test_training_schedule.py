"""Switch function, schedule validation, and learning-rate decay."""

import pytest
from hypothesis import given, strategies as st

from hybridflow.errors import InvalidCyclesError
from hybridflow.training import AdamConfig, TrainSchedule, lr_at, switch


class TestSwitch:
    def test_one_to_five_cycle(self):
        assert switch(0, 1, 5) == 0
        for i in range(1, 6):
            assert switch(i, 1, 5) == 1
        assert switch(6, 1, 5) == 0

    def test_four_to_one_cycle(self):
        for i in range(20):
            expected = 1 if i % 5 == 4 else 0
            assert switch(i, 4, 1) == expected

    def test_no_real_cycles_always_one(self):
        assert all(switch(i, 0, 5) == 1 for i in range(50))

    def test_no_synth_cycles_always_zero(self):
        assert all(switch(i, 3, 0) == 0 for i in range(50))

    def test_negative_iteration_rejected(self):
        with pytest.raises(InvalidCyclesError):
            switch(-1, 1, 5)

    def test_empty_period_rejected(self):
        with pytest.raises(InvalidCyclesError):
            switch(0, 0, 0)

    def test_real_count_over_k_periods(self):
        # exactly k zeros over 0..6k-1 at ratio 1:5
        for k in (1, 3, 7):
            zeros = sum(1 - switch(i, 1, 5) for i in range(6 * k))
            assert zeros == k

    @given(n1=st.integers(0, 6), n2=st.integers(0, 6),
           start=st.integers(0, 500))
    def test_window_counts(self, n1, n2, start):
        if n1 + n2 < 1:
            return
        window = [switch(i, n1, n2) for i in range(start, start + n1 + n2)]
        assert all(v in (0, 1) for v in window)
        # any aligned-or-not window of one period has exactly n1 zeros
        assert window.count(0) == n1
        assert window.count(1) == n2


class TestTrainSchedule:
    def test_defaults(self):
        s = TrainSchedule()
        assert (s.n1, s.n2) == (1, 5)
        assert (s.w1, s.w2) == (1.0, 5.0)
        assert s.base_lr == 1e-4
        assert (s.lr_drop_start, s.lr_drop_every) == (300_000, 100_000)
        assert s.lr_drop_factor == 0.5
        assert s.batch_size == 8
        assert (s.adam.beta1, s.adam.beta2) == (0.9, 0.999)
        assert s.period == 6

    @pytest.mark.parametrize("kwargs", [
        {"n1": -1},
        {"n1": 0, "n2": 0},
        {"w1": -0.5},
        {"w2": -1.0},
        {"base_lr": -1e-4},
        {"lr_drop_every": 0},
        {"lr_drop_factor": 0.0},
        {"lr_drop_factor": 1.5},
        {"batch_size": 0},
        {"level_weights": (1.0, -2.0)},
        {"level_weights": (float("nan"),)},
    ])
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(InvalidCyclesError):
            TrainSchedule(**kwargs)

    def test_zero_base_lr_allowed(self):
        assert TrainSchedule(base_lr=0.0).base_lr == 0.0

    def test_adam_validation(self):
        with pytest.raises(InvalidCyclesError):
            AdamConfig(beta1=1.0)
        with pytest.raises(InvalidCyclesError):
            AdamConfig(epsilon=0.0)

    def test_resolve_level_weights_uniform(self):
        assert TrainSchedule().resolve_level_weights(4) == (1.0,) * 4

    def test_resolve_level_weights_explicit(self):
        s = TrainSchedule(level_weights=(0.5, 1.0, 2.0))
        assert s.resolve_level_weights(3) == (0.5, 1.0, 2.0)
        with pytest.raises(InvalidCyclesError):
            s.resolve_level_weights(4)

    def test_desk_scale_ratios(self):
        s = TrainSchedule.desk_scale(total_iterations=2000)
        assert s.total_iterations == 2000
        # drop points scale with the shortened run
        assert s.lr_drop_start == 600
        assert s.lr_drop_every == 200
        assert s.batch_size == 4
        assert s.base_lr == 1e-4

    def test_paper_scale_is_defaults(self):
        assert TrainSchedule.paper_scale() == TrainSchedule()

    def test_dict_roundtrip(self):
        s = TrainSchedule(n1=2, n2=3, w1=0.7, level_weights=(1.0, 2.0),
                          base_lr=3e-4, seed=11,
                          adam=AdamConfig(beta1=0.8, epsilon=1e-7))
        assert TrainSchedule.from_dict(s.to_dict()) == s


class TestLrAt:
    def test_pinned_values(self):
        s = TrainSchedule()
        assert lr_at(250_000, s) == 1e-4
        assert lr_at(350_000, s) == 5e-5
        assert lr_at(450_000, s) == 2.5e-5

    def test_boundary_values_exact(self):
        s = TrainSchedule()
        assert lr_at(0, s) == 1e-4
        assert lr_at(299_999, s) == 1e-4
        # each boundary lands exactly on base * 0.5^k
        assert lr_at(300_000, s) == 1e-4 * 0.5
        assert lr_at(399_999, s) == 1e-4 * 0.5
        assert lr_at(400_000, s) == 1e-4 * 0.5 ** 2
        assert lr_at(700_000, s) == 1e-4 * 0.5 ** 5

    def test_negative_iteration_rejected(self):
        with pytest.raises(InvalidCyclesError):
            lr_at(-1, TrainSchedule())

    @given(st.integers(0, 2_000_000), st.integers(0, 2_000_000))
    def test_non_increasing(self, a, b):
        s = TrainSchedule()
        lo, hi = sorted((a, b))
        assert lr_at(lo, s) >= lr_at(hi, s)
