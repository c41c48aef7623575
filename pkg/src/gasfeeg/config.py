"""Run configuration: a flat JSON key-value document with CLI overrides."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field

DATA_ROOT_ENV = "GASFEEG_DATA_ROOT"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    # data
    data_root: str = ""
    delimiter: str = ","
    channel_index: int = 0
    epoch_len: int = 256
    split_fraction: float = 0.8
    sampling_rate_hz: float = 512.0
    # encoding
    scaling_mode: str = "unit_signed"
    colormap: str = "jet"
    image_size: int = 224
    # cnn
    cnn_scale: float = 1.0
    # training
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-3
    optimizer: str = "Adam"
    monitor_epochs: int = 10
    augment: bool = False
    dtype: str = "float32"
    # transforms / texture
    stft_window: str = "hann"
    stft_window_len: int = 64
    stft_hop: int = 16
    wvd_window: str = "hann"
    wvd_window_len: int = 63
    set_window_len: int = 64
    set_hop: int = 16
    set_delta_bins: float = 1.0
    glcm_levels: int = 32
    feature_source: str = "transforms"
    # swarm
    particles: int = 20
    iterations: int = 50
    inertia: float = 0.7
    cognitive: float = 1.5
    social: float = 1.5
    v_max: float = 4.0
    folds: int = 5
    # ann
    ann_hidden: list = field(default_factory=lambda: [32, 16])
    # run
    out_dir: str = "runs/out"
    seed: int = 0
    threads: int = 1

    def validate(self, require_data=True):
        if require_data:
            if not self.data_root:
                raise ConfigError("data_root: not set (flag, config, or "
                                  f"{DATA_ROOT_ENV})")
            if not os.path.isdir(self.data_root):
                raise ConfigError(f"data_root: no such directory "
                                  f"{self.data_root!r}")
        if len(self.delimiter) != 1:
            raise ConfigError("delimiter: must be a single character")
        if self.channel_index < 0:
            raise ConfigError("channel_index: must be non-negative")
        if self.epoch_len < 2:
            raise ConfigError("epoch_len: must be >= 2")
        if not (0.0 < self.split_fraction < 1.0):
            raise ConfigError("split_fraction: must be in (0, 1)")
        if not (0.0 < self.cnn_scale <= 1.0):
            raise ConfigError("cnn_scale: must be in (0, 1]")
        if self.image_size < 16:
            raise ConfigError("image_size: must be >= 16")
        if self.threads < 1:
            raise ConfigError("threads: must be >= 1")
        if self.dtype not in ("float32", "float64"):
            raise ConfigError("dtype: must be float32 or float64")
        if self.feature_source not in ("transforms", "gasf"):
            raise ConfigError("feature_source: must be transforms or gasf")
        return self

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path) as f:
            doc = json.load(f)
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    def with_overrides(self, **overrides) -> "RunConfig":
        doc = dataclasses.asdict(self)
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in doc:
                raise ConfigError(f"unknown config key {key!r}")
            doc[key] = value
        return RunConfig(**doc)


def resolve_config(config_path=None, **overrides) -> RunConfig:
    """File config (if given) layered under flag overrides; the data-root
    environment variable fills data_root when nothing else sets it."""
    cfg = RunConfig.from_file(config_path) if config_path else RunConfig()
    cfg = cfg.with_overrides(**overrides)
    if not cfg.data_root and os.environ.get(DATA_ROOT_ENV):
        cfg = cfg.with_overrides(data_root=os.environ[DATA_ROOT_ENV])
    return cfg
