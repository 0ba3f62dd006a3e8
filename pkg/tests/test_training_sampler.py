"""Deterministic epoch-shuffled batch selection."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hybridflow.datagen import (GeneratorConfig, build_dataset,
                                generate_real_like_triplet, generate_triplet,
                                mix64, random_scene_spec)
from hybridflow.errors import EmptySourceError
from hybridflow.flowio import Source
from hybridflow.training import (InMemorySource, ManifestSource, TrainSchedule,
                                 next_batch, sample_indices,
                                 source_draw_ordinal, switch)


def make_synth(n, w=16, h=16, seed=40):
    cfg = GeneratorConfig(width=w, height=h, master_seed=seed)
    return [generate_triplet(random_scene_spec(cfg, i)) for i in range(n)]


def make_real(n, w=16, h=16, seed=41):
    cfg = GeneratorConfig(width=w, height=h, master_seed=seed,
                          source=Source.REAL)
    return [generate_real_like_triplet(random_scene_spec(cfg, i))
            for i in range(n)]


class TestSourceDrawOrdinal:
    def test_one_to_five(self):
        # REAL draws happen at i = 0, 6, 12, ...
        assert source_draw_ordinal(0, 1, 5, 0) == 0
        assert source_draw_ordinal(6, 1, 5, 0) == 1
        assert source_draw_ordinal(12, 1, 5, 0) == 2
        # SYNTH draws at i = 1..5 are ordinals 0..4
        for k, i in enumerate(range(1, 6)):
            assert source_draw_ordinal(i, 1, 5, 1) == k
        assert source_draw_ordinal(7, 1, 5, 1) == 5

    @given(n1=st.integers(0, 4), n2=st.integers(0, 4), m=st.integers(1, 120))
    def test_matches_running_count(self, n1, n2, m):
        if n1 + n2 < 1:
            return
        seen = {0: 0, 1: 0}
        for i in range(m):
            s = switch(i, n1, n2)
            assert source_draw_ordinal(i, n1, n2, s) == seen[s]
            seen[s] += 1


class TestSampleIndices:
    def test_deterministic(self):
        a = sample_indices(3, Source.REAL, 5, 4, 17)
        b = sample_indices(3, Source.REAL, 5, 4, 17)
        assert a == b

    def test_sources_draw_independent_streams(self):
        a = sample_indices(3, Source.REAL, 0, 8, 50)
        b = sample_indices(3, Source.SYNTHETIC, 0, 8, 50)
        assert a != b

    def test_epoch_is_permutation(self):
        count, batch = 12, 4
        seen = []
        for ordinal in range(count // batch):
            seen.extend(sample_indices(9, Source.SYNTHETIC, ordinal, batch,
                                       count))
        assert sorted(seen) == list(range(count))

    def test_epoch_boundary_straddle(self):
        # a batch crossing epochs takes the tail of one permutation and the
        # head of the next
        count = 5
        rng0 = np.random.default_rng(mix64(7, 2, 0))
        rng1 = np.random.default_rng(mix64(7, 2, 1))
        p0, p1 = rng0.permutation(count), rng1.permutation(count)
        got = sample_indices(7, Source.SYNTHETIC, 1, 4, count)
        assert got == [int(p0[4]), int(p1[0]), int(p1[1]), int(p1[2])]

    def test_distinct_epochs_reshuffled(self):
        count = 64
        e0 = sample_indices(1, Source.REAL, 0, count, count)
        e1 = sample_indices(1, Source.REAL, 1, count, count)
        assert sorted(e0) == sorted(e1) == list(range(count))
        assert e0 != e1


class TestInMemorySource:
    def test_basic(self):
        samples = make_synth(3)
        src = InMemorySource(samples)
        assert len(src) == 3
        assert src.tag is Source.SYNTHETIC
        assert src.load(1) is samples[1]

    def test_empty_rejected(self):
        with pytest.raises(EmptySourceError):
            InMemorySource([])

    def test_mixed_sources_rejected(self):
        with pytest.raises(EmptySourceError):
            InMemorySource(make_synth(1) + make_real(1))


class TestManifestSource:
    def test_load_and_cache(self, tmp_path):
        cfg = GeneratorConfig(width=16, height=16, master_seed=5)
        manifest = build_dataset(cfg, 3, tmp_path / "ds")
        src = ManifestSource(manifest, cache=True)
        assert len(src) == 3
        assert src.tag is Source.SYNTHETIC
        a = src.load(2)
        assert src.load(2) is a
        uncached = ManifestSource(manifest)
        b = uncached.load(2)
        assert np.array_equal(a.i1.values, b.i1.values)
        assert uncached.load(2) is not b


class TestNextBatch:
    def test_source_selection(self):
        real = InMemorySource(make_real(6))
        synth = InMemorySource(make_synth(6))
        sched = TrainSchedule(n1=1, n2=5, batch_size=2)
        batch, s = next_batch(0, real, synth, sched)
        assert s == 0 and batch.source is Source.REAL
        batch, s = next_batch(3, real, synth, sched)
        assert s == 1 and batch.source is Source.SYNTHETIC
        assert len(batch) == 2

    def test_deterministic(self):
        real = InMemorySource(make_real(6))
        synth = InMemorySource(make_synth(6))
        sched = TrainSchedule(n1=1, n2=5, batch_size=3, seed=21)
        a, _ = next_batch(7, real, synth, sched)
        b, _ = next_batch(7, real, synth, sched)
        assert all(x is y for x, y in zip(a.samples, b.samples))

    def test_missing_source_rejected(self):
        synth = InMemorySource(make_synth(4))
        sched = TrainSchedule(n1=1, n2=5, batch_size=2)
        with pytest.raises(EmptySourceError):
            next_batch(0, None, synth, sched)
        # pure-synthetic schedule never touches the real source
        batch, s = next_batch(0, None, synth, TrainSchedule(n1=0, n2=1,
                                                            batch_size=2))
        assert s == 1 and batch.source is Source.SYNTHETIC
