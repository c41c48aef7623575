"""Reading delimited EEG recordings, epoching, and dataset manifest assembly."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

EPOCH_LEN_DEFAULT = 256

NORMAL = "Normal"
FOCAL = "Focal"
TRAIN = "Train"
VALIDATION = "Validation"


class IngestError(ValueError):
    pass


@dataclass
class Signal:
    samples: np.ndarray
    sampling_rate_hz: float
    source_id: str
    channel_index: int = 0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.size == 0:
            raise IngestError("signal has no samples")
        if not np.all(np.isfinite(self.samples)):
            raise IngestError("signal contains non-finite samples")
        if self.sampling_rate_hz <= 0:
            raise IngestError("sampling_rate_hz must be positive")

    def __len__(self):
        return self.samples.size


@dataclass
class Epoch:
    samples: np.ndarray
    label: str
    parent_id: str
    start_index: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if not np.all(np.isfinite(self.samples)):
            raise IngestError("epoch contains non-finite samples")
        if self.label not in (NORMAL, FOCAL):
            raise IngestError(f"unknown label {self.label!r}")
        if self.start_index < 0:
            raise IngestError("start_index must be non-negative")

    def __len__(self):
        return self.samples.size


@dataclass
class ManifestEntry:
    source: str
    start_index: int
    label: str
    split: str


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry]
    epoch_len: int
    seed: int
    extra: dict = field(default_factory=dict)

    def split_entries(self, split: str) -> list[ManifestEntry]:
        return [e for e in self.entries if e.split == split]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for e in self.entries:
            key = f"{e.split.lower()}_{e.label.lower()}"
            out[key] = out.get(key, 0) + 1
        return out

    def to_json(self) -> str:
        doc = {
            "epoch_len": self.epoch_len,
            "seed": self.seed,
            "entries": [
                {
                    "source": e.source,
                    "start_index": e.start_index,
                    "label": e.label,
                    "split": e.split,
                }
                for e in self.entries
            ],
        }
        if self.extra:
            doc["extra"] = self.extra
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        doc = json.loads(text)
        entries = [
            ManifestEntry(d["source"], d["start_index"], d["label"], d["split"])
            for d in doc["entries"]
        ]
        return cls(entries, doc["epoch_len"], doc["seed"], doc.get("extra", {}))

    def save(self, path):
        with open(path, "w") as f:
            f.write(self.to_json())

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        with open(path) as f:
            return cls.from_json(f.read())


def read_record(path, delimiter: str = ",", channel_index: int = 0,
                sampling_rate_hz: float = 512.0) -> Signal:
    """Read one column of a delimited text recording into a Signal.

    One sample per row; rows must all have the same column count and every
    field must parse as a finite real (scientific notation accepted).
    """
    if not os.path.exists(path):
        raise IngestError(f"missing file: {path}")
    if channel_index < 0:
        raise IngestError("channel_index must be non-negative")
    samples = []
    ncols = None
    with open(path) as f:
        for row_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(delimiter)
            if ncols is None:
                ncols = len(fields)
            elif len(fields) != ncols:
                raise IngestError(
                    f"ragged row {row_no}: expected {ncols} columns, got {len(fields)}"
                )
            if channel_index >= len(fields):
                raise IngestError(
                    f"channel_index {channel_index} out of range for "
                    f"{len(fields)}-column file"
                )
            token = fields[channel_index].strip()
            try:
                value = float(token)
            except ValueError:
                raise IngestError(
                    f"non-numeric field at row {row_no}, column {channel_index + 1}: "
                    f"{token!r}"
                ) from None
            if not math.isfinite(value):
                raise IngestError(
                    f"non-finite value at row {row_no}, column {channel_index + 1}"
                )
            samples.append(value)
    if not samples:
        raise IngestError(f"no samples in {path}")
    source_id = os.path.splitext(os.path.basename(path))[0]
    return Signal(np.array(samples), sampling_rate_hz, source_id, channel_index)


def split_epochs(signal: Signal, epoch_len: int = EPOCH_LEN_DEFAULT,
                 label: str = NORMAL) -> list[Epoch]:
    """Cut a signal into non-overlapping consecutive epochs.

    The trailing remainder shorter than epoch_len is discarded.
    """
    if epoch_len < 2:
        raise IngestError("epoch_len must be >= 2")
    n = len(signal)
    if n < epoch_len:
        raise IngestError(
            f"signal length {n} shorter than epoch_len {epoch_len}"
        )
    epochs = []
    for start in range(0, n - epoch_len + 1, epoch_len):
        epochs.append(
            Epoch(signal.samples[start:start + epoch_len].copy(),
                  label, signal.source_id, start)
        )
    return epochs


def build_manifest(epochs_by_class: dict[str, list[Epoch]],
                   split_fraction: float, seed: int) -> DatasetManifest:
    """Stratified, seeded train/validation split over labeled epochs.

    Per class: shuffle with the seed, first round(split_fraction * n) go to
    Train, the rest to Validation. Deterministic for fixed inputs and seed.
    """
    if not (0.0 < split_fraction < 1.0):
        raise IngestError("split_fraction must be in (0, 1)")
    epoch_lens = {len(e) for eps in epochs_by_class.values() for e in eps}
    if len(epoch_lens) != 1:
        raise IngestError("epochs have inconsistent lengths")
    epoch_len = epoch_lens.pop()
    entries: list[ManifestEntry] = []
    rng = np.random.default_rng(seed)
    for label in sorted(epochs_by_class):
        eps = epochs_by_class[label]
        if len(eps) < 2:
            raise IngestError(f"class {label!r} has fewer than 2 epochs")
        order = rng.permutation(len(eps))
        n_train = int(math.floor(split_fraction * len(eps) + 0.5))
        n_train = min(max(n_train, 1), len(eps) - 1)
        for rank, idx in enumerate(order):
            split = TRAIN if rank < n_train else VALIDATION
            e = eps[idx]
            entries.append(ManifestEntry(e.parent_id, e.start_index, e.label, split))
    return DatasetManifest(entries, epoch_len, seed)
