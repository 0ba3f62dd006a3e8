"""Deterministic batch selection.

The sample stream of each source is a virtual concatenation of shuffled
epochs: epoch e enumerates the source in a permutation seeded by (schedule
seed, source, e). Which slice of that stream iteration i consumes follows in
closed form from the cycle counts, so batch contents are a pure function of
(seed, source sizes, i) - no sampler state, which makes training resumable
from any iteration with bit-identical batches.
"""

from __future__ import annotations

from typing import Protocol, Sequence

import numpy as np

from ..datagen import DatasetManifest, load_triplet, mix64
from ..errors import EmptySourceError
from ..flowio import Minibatch, SampleTriplet, Source
from .schedule import TrainSchedule, switch

_SOURCE_TAG = {Source.REAL: 1, Source.SYNTHETIC: 2}


class DataSource(Protocol):
    """Indexed collection of triplets from one source."""

    tag: Source

    def __len__(self) -> int: ...

    def load(self, index: int) -> SampleTriplet: ...


class InMemorySource:
    """Source backed by a list of already-loaded triplets."""

    def __init__(self, samples: Sequence[SampleTriplet]):
        samples = list(samples)
        if not samples:
            raise EmptySourceError("source holds no samples")
        self.tag = samples[0].source
        for s in samples:
            if s.source is not self.tag:
                raise EmptySourceError("source mixes sample origins")
        self._samples = samples

    def __len__(self) -> int:
        return len(self._samples)

    def load(self, index: int) -> SampleTriplet:
        return self._samples[index]


class ManifestSource:
    """Source backed by an on-disk dataset."""

    def __init__(self, manifest: DatasetManifest, cache: bool = False):
        if manifest.sample_count < 1:
            raise EmptySourceError(f"dataset at {manifest.root} is empty")
        self.tag = manifest.source
        self._manifest = manifest
        self._cache: dict = {} if cache else None

    def __len__(self) -> int:
        return self._manifest.sample_count

    def load(self, index: int) -> SampleTriplet:
        if self._cache is None:
            return load_triplet(self._manifest, index)
        if index not in self._cache:
            self._cache[index] = load_triplet(self._manifest, index)
        return self._cache[index]


def source_draw_ordinal(i: int, n1: int, n2: int, s: int) -> int:
    """How many earlier iterations drew from the source selected at i."""
    period = n1 + n2
    full, r = divmod(i, period)
    if s == 0:
        return full * n1 + min(r, n1)
    return full * n2 + max(0, r - n1)


def sample_indices(seed: int, source: Source, ordinal: int, batch_size: int,
                   count: int) -> list[int]:
    """Indices of the batch occupying slot `ordinal` of a source's stream."""
    start = ordinal * batch_size
    out = []
    epoch = None
    perm = None
    for g in range(start, start + batch_size):
        e = g // count
        if e != epoch:
            epoch = e
            rng = np.random.default_rng(mix64(seed, _SOURCE_TAG[source], e))
            perm = rng.permutation(count)
        out.append(int(perm[g % count]))
    return out


def next_batch(i: int, real_source, synth_source,
               schedule: TrainSchedule) -> tuple[Minibatch, int]:
    """Batch for iteration i plus the switch value that selected its source."""
    s = switch(i, schedule.n1, schedule.n2)
    source = real_source if s == 0 else synth_source
    if source is None or len(source) == 0:
        name = "real" if s == 0 else "synthetic"
        raise EmptySourceError(f"schedule requires a non-empty {name} source")
    ordinal = source_draw_ordinal(i, schedule.n1, schedule.n2, s)
    indices = sample_indices(schedule.seed, source.tag, ordinal,
                             schedule.batch_size, len(source))
    samples = tuple(source.load(idx) for idx in indices)
    return Minibatch(samples=samples, source=source.tag), s
