"""On-disk dataset management.

Layout: one zero-padded directory per sample holding `i1.png`, `i2.png`,
`i3.png` and, for ground-truth-bearing datasets, `f12.flo`, `f23.flo`,
`occ12.png`, `occ23.png` (1-bit masks), plus a `manifest.json` at the root.
Real-like datasets keep their withheld ground truth in a sibling `withheld/`
tree with the identical per-sample layout.

Every sample is a pure function of (config, index), so rebuilding with the
same config reproduces identical bytes; files are written to a temporary name
and renamed into place so readers never observe partial samples.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..errors import (CorruptFileError, DatasetIOError, FlowFormatError,
                      IndexOutOfRangeError, InvalidSpecError,
                      MissingGroundTruthError)
from ..flowio import (FlowField, SampleTriplet, Source, read_flo_file,
                      read_frame_png, read_mask_png, write_flo_file,
                      write_frame_png, write_mask_png)
from .render import generate_real_like_with_truth, generate_triplet
from .scene import GeneratorConfig, random_scene_spec

FORMAT_VERSION = 1

_MASK64 = (1 << 64) - 1

WITHHELD_DIR = "withheld"
MANIFEST_NAME = "manifest.json"

_TRUTH_KEYS = ("f12", "f23", "occ12", "occ23")
_FRAME_KEYS = ("i1", "i2", "i3")


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix64(*values: int) -> int:
    """Stable 64-bit hash of an integer tuple, used for seed derivation."""
    h = 0
    for v in values:
        h = _splitmix64((h ^ (v & _MASK64)) & _MASK64)
    return h


@dataclass(frozen=True)
class DatasetManifest:
    """Index of a generated dataset."""

    root: Path
    sample_count: int
    source: Source
    samples: tuple[dict, ...]
    config: dict
    config_hash: str
    format_version: int = FORMAT_VERSION

    def sample_dir(self, index: int) -> Path:
        return self.root / f"{index:06d}"

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "sample_count": self.sample_count,
            "source": self.source.value,
            "config": self.config,
            "config_hash": self.config_hash,
            "samples": list(self.samples),
        }


def config_hash(config: GeneratorConfig) -> str:
    payload = json.dumps(config.to_dict(), sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _atomic(path: Path, write):
    """Write via `write(temp_path)` then rename into place."""
    tmp = path.with_name(path.name + ".tmp")
    write(tmp)
    os.replace(tmp, path)


def _write_truth(sample_dir: Path, record: SampleTriplet) -> None:
    _atomic(sample_dir / "f12.flo",
            lambda p: write_flo_file(record.f12, p))
    _atomic(sample_dir / "f23.flo",
            lambda p: write_flo_file(record.f23, p))
    _atomic(sample_dir / "occ12.png",
            lambda p: write_mask_png(record.occlusion12, p))
    _atomic(sample_dir / "occ23.png",
            lambda p: write_mask_png(record.occlusion23, p))


def _write_frames(sample_dir: Path, record: SampleTriplet) -> None:
    for key in _FRAME_KEYS:
        _atomic(sample_dir / f"{key}.png",
                lambda p, f=getattr(record, key): write_frame_png(f, p))


def _sample_entry(index: int, source: Source) -> dict:
    name = f"{index:06d}"
    entry = {key: f"{name}/{key}.png" for key in _FRAME_KEYS}
    if source is Source.SYNTHETIC:
        entry["f12"] = f"{name}/f12.flo"
        entry["f23"] = f"{name}/f23.flo"
        entry["occ12"] = f"{name}/occ12.png"
        entry["occ23"] = f"{name}/occ23.png"
    else:
        entry["withheld"] = {
            "f12": f"{WITHHELD_DIR}/{name}/f12.flo",
            "f23": f"{WITHHELD_DIR}/{name}/f23.flo",
            "occ12": f"{WITHHELD_DIR}/{name}/occ12.png",
            "occ23": f"{WITHHELD_DIR}/{name}/occ23.png",
        }
    return entry


def build_dataset(config: GeneratorConfig, n: int, out) -> DatasetManifest:
    """Generate n samples under `out` and write the manifest."""
    if n < 1:
        raise InvalidSpecError("sample count must be >= 1")
    root = Path(out)
    try:
        root.mkdir(parents=True, exist_ok=True)
        entries = []
        for i in range(n):
            spec = random_scene_spec(config, i)
            sample_dir = root / f"{i:06d}"
            sample_dir.mkdir(parents=True, exist_ok=True)
            if config.source is Source.SYNTHETIC:
                record = generate_triplet(spec)
                _write_frames(sample_dir, record)
                _write_truth(sample_dir, record)
            else:
                sample, truth = generate_real_like_with_truth(spec)
                _write_frames(sample_dir, sample)
                withheld_dir = root / WITHHELD_DIR / f"{i:06d}"
                withheld_dir.mkdir(parents=True, exist_ok=True)
                _write_frames(withheld_dir, truth)
                _write_truth(withheld_dir, truth)
            entries.append(_sample_entry(i, config.source))
        manifest = DatasetManifest(
            root=root,
            sample_count=n,
            source=config.source,
            samples=tuple(entries),
            config=config.to_dict(),
            config_hash=config_hash(config),
        )
        payload = json.dumps(manifest.to_dict(), sort_keys=True, indent=1)
        _atomic(root / MANIFEST_NAME,
                lambda p: p.write_text(payload, encoding="utf-8"))
    except OSError as exc:
        raise DatasetIOError(f"failed to build dataset at {root}: {exc}") from exc
    return manifest


def load_manifest(path) -> DatasetManifest:
    """Read a manifest; `path` may be the dataset root or the file itself."""
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DatasetIOError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorruptFileError(f"manifest {path} is not valid JSON: {exc}") from exc
    if data.get("format_version") != FORMAT_VERSION:
        raise CorruptFileError(
            f"manifest format version {data.get('format_version')!r} "
            f"unsupported (expected {FORMAT_VERSION})")
    return DatasetManifest(
        root=path.parent,
        sample_count=int(data["sample_count"]),
        source=Source(data["source"]),
        samples=tuple(data["samples"]),
        config=data["config"],
        config_hash=data["config_hash"],
        format_version=int(data["format_version"]),
    )


def _check_index(manifest: DatasetManifest, index: int) -> None:
    if not 0 <= index < manifest.sample_count:
        raise IndexOutOfRangeError(
            f"index {index} outside [0, {manifest.sample_count})")


def _load_record(root: Path, entry: dict, source: Source,
                 with_truth: bool) -> SampleTriplet:
    try:
        frames = {key: read_frame_png(root / entry[key])
                  for key in _FRAME_KEYS}
        flows: dict[str, Optional[FlowField]] = {"f12": None, "f23": None}
        occs = {"occ12": None, "occ23": None}
        if with_truth:
            flows["f12"] = read_flo_file(root / entry["f12"])
            flows["f23"] = read_flo_file(root / entry["f23"])
            occs["occ12"] = read_mask_png(root / entry["occ12"])
            occs["occ23"] = read_mask_png(root / entry["occ23"])
    except FlowFormatError as exc:
        raise CorruptFileError(f"unreadable flow file: {exc}") from exc
    except OSError as exc:
        raise CorruptFileError(f"unreadable sample file: {exc}") from exc
    return SampleTriplet(
        i1=frames["i1"], i2=frames["i2"], i3=frames["i3"],
        f12=flows["f12"], f23=flows["f23"], source=source,
        occlusion12=occs["occ12"], occlusion23=occs["occ23"])


def load_triplet(manifest: DatasetManifest, index: int) -> SampleTriplet:
    """Load sample `index`; real-like samples come back without ground truth."""
    _check_index(manifest, index)
    entry = manifest.samples[index]
    with_truth = manifest.source is Source.SYNTHETIC
    return _load_record(manifest.root, entry, manifest.source, with_truth)


def load_withheld_truth(manifest: DatasetManifest, index: int) -> SampleTriplet:
    """Load the withheld ground-truth record of a real-like sample."""
    _check_index(manifest, index)
    if manifest.source is not Source.REAL:
        raise MissingGroundTruthError(
            "dataset carries ground truth inline; nothing is withheld")
    entry = dict(manifest.samples[index].get("withheld", {}))
    if not entry:
        raise MissingGroundTruthError(
            f"sample {index} has no withheld ground-truth record")
    name = f"{index:06d}"
    for key in _FRAME_KEYS:
        entry[key] = f"{WITHHELD_DIR}/{name}/{key}.png"
    return _load_record(manifest.root, entry, Source.SYNTHETIC, True)
