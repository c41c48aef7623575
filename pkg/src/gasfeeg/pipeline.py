"""Stage orchestration for the two classification pipelines.

GasfCnn:     ingest -> GASF images -> custom CNN -> metrics
FeatureAnn:  ingest -> T-F spectra -> texture features -> PSO -> ANN -> metrics
EncodeOnly / FeaturesOnly / EvalOnly run the matching prefix or suffix.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import gasf, metrics, pso, synth, texture
from .config import RunConfig
from .ingest import (DatasetManifest, FOCAL, NORMAL, TRAIN, VALIDATION,
                     build_manifest, read_record, split_epochs)
from . import nn

GASF_CNN = "GasfCnn"
FEATURE_ANN = "FeatureAnn"
ENCODE_ONLY = "EncodeOnly"
FEATURES_ONLY = "FeaturesOnly"
EVAL_ONLY = "EvalOnly"

PIPELINES = (GASF_CNN, FEATURE_ANN, ENCODE_ONLY, FEATURES_ONLY, EVAL_ONLY)

_LABEL_INDEX = {NORMAL: 0, FOCAL: 1}
_CLASS_DIRS = {"normal": NORMAL, "focal": FOCAL}


class PipelineError(RuntimeError):
    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _class_files(data_root) -> dict[str, list[str]]:
    out = {}
    for sub, label in _CLASS_DIRS.items():
        d = os.path.join(data_root, sub)
        if not os.path.isdir(d):
            raise FileNotFoundError(
                f"expected class directory {d!r} (data root layout: "
                "<root>/normal/*.csv and <root>/focal/*.csv)"
            )
        files = sorted(os.path.join(d, name) for name in os.listdir(d)
                       if not name.startswith("."))
        if not files:
            raise FileNotFoundError(f"no recordings in {d!r}")
        out[label] = files
    return out


def ingest_stage(cfg: RunConfig):
    """Read every recording, epoch it, and build the split manifest.
    Returns (manifest, epochs keyed by (source_id, start_index), digests)."""
    files = _class_files(cfg.data_root)
    epochs_by_class = {}
    epoch_map = {}
    digests = {}
    for label, paths in files.items():
        eps = []
        for path in paths:
            digests[os.path.relpath(path, cfg.data_root)] = _sha256(path)
            sig = read_record(path, cfg.delimiter, cfg.channel_index,
                              cfg.sampling_rate_hz)
            for e in split_epochs(sig, cfg.epoch_len, label):
                eps.append(e)
                epoch_map[(e.parent_id, e.start_index)] = e
        epochs_by_class[label] = eps
    manifest = build_manifest(epochs_by_class, cfg.split_fraction, cfg.seed)
    return manifest, epoch_map, digests


def _encode_one(epoch, cfg: RunConfig):
    m = gasf.encode_epoch(epoch.samples, cfg.scaling_mode)
    img = gasf.render_rgb(m, cfg.colormap)
    return gasf.resize_image(img, cfg.image_size, cfg.image_size)


def encode_stage(cfg: RunConfig, manifest: DatasetManifest, epoch_map,
                 image_dir=None):
    """GASF-encode every manifest entry; optionally write PNGs. Returns
    arrays (train_x, train_y, val_x, val_y) with pixels scaled to [0, 1]."""
    entries = list(manifest.entries)

    def work(entry):
        return _encode_one(epoch_map[(entry.source, entry.start_index)], cfg)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            images = list(pool.map(work, entries))
    else:
        images = [work(e) for e in entries]

    if image_dir is not None:
        os.makedirs(image_dir, exist_ok=True)
        for entry, img in zip(entries, images):
            name = f"{entry.source}_{entry.start_index}_{entry.label}.png"
            img.save_png(os.path.join(image_dir, name))

    split_data = {TRAIN: ([], []), VALIDATION: ([], [])}
    for entry, img in zip(entries, images):
        xs, ys = split_data[entry.split]
        xs.append(img.pixels.astype(np.float64) / 255.0)
        ys.append(_LABEL_INDEX[entry.label])
    (tx, ty), (vx, vy) = split_data[TRAIN], split_data[VALIDATION]
    return (np.stack(tx), np.array(ty, dtype=np.int64),
            np.stack(vx), np.array(vy, dtype=np.int64))


def augment_train_set(train_x, train_y, seed: int):
    """One jittered copy per training image (rotation, shift, shear)."""
    rng = np.random.default_rng(seed)
    extra = []
    for img in train_x:
        raster = gasf.RasterImage((img * 255.0).astype(np.uint8))
        out = gasf.augment_image(
            raster,
            rotation_deg=float(rng.uniform(-15, 15)),
            shift_px=(int(rng.integers(-2, 3)), int(rng.integers(-2, 3))),
            shear=float(rng.uniform(-0.05, 0.05)),
        )
        extra.append(out.pixels.astype(np.float64) / 255.0)
    return (np.concatenate([train_x, np.stack(extra)]),
            np.concatenate([train_y, train_y]))


def features_stage(cfg: RunConfig, manifest: DatasetManifest, epoch_map):
    """Ten-feature texture vector per manifest entry."""
    settings = texture.TextureSettings(
        glcm_levels=cfg.glcm_levels,
        stft_window=cfg.stft_window,
        stft_window_len=cfg.stft_window_len,
        stft_hop=cfg.stft_hop,
        wvd_window=cfg.wvd_window,
        wvd_window_len=cfg.wvd_window_len,
        set_window_len=cfg.set_window_len,
        set_hop=cfg.set_hop,
        set_delta_bins=cfg.set_delta_bins,
        feature_source=cfg.feature_source,
        scaling_mode=cfg.scaling_mode,
    )
    entries = list(manifest.entries)

    def work(entry):
        e = epoch_map[(entry.source, entry.start_index)]
        return texture.assemble_feature_vector(e.samples, settings)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            vectors = list(pool.map(work, entries))
    else:
        vectors = [work(e) for e in entries]
    return entries, vectors


def _feature_arrays(entries, vectors):
    split_data = {TRAIN: ([], []), VALIDATION: ([], [])}
    for entry, vec in zip(entries, vectors):
        xs, ys = split_data[entry.split]
        xs.append(vec.as_array())
        ys.append(_LABEL_INDEX[entry.label])
    (tx, ty), (vx, vy) = split_data[TRAIN], split_data[VALIDATION]
    return (np.stack(tx), np.array(ty, dtype=np.int64),
            np.stack(vx), np.array(vy, dtype=np.int64))


def _train_config(cfg: RunConfig, epochs=None) -> nn.TrainConfig:
    return nn.TrainConfig(
        epochs=epochs if epochs is not None else cfg.epochs,
        batch_size=cfg.batch_size,
        learning_rate=cfg.learning_rate,
        optimizer=cfg.optimizer,
        monitor_epochs=min(cfg.monitor_epochs,
                           epochs if epochs is not None else cfg.epochs),
        seed=cfg.seed,
    )


def _eval_reports(net, val_x, val_y, out_dir, model_name):
    _, _, scores = nn.evaluate(net, val_x, val_y)
    preds = [FOCAL if s >= 0.5 else NORMAL for s in scores]
    labels = [FOCAL if y == 1 else NORMAL for y in val_y]
    report = metrics.classification_report(preds, labels, scores=scores)
    metrics.write_metrics_json(os.path.join(out_dir, "metrics.json"), report)
    metrics.write_metrics_csv(os.path.join(out_dir, "metrics.csv"), report,
                              model_name)
    metrics.write_roc_csv(os.path.join(out_dir, "roc.csv"), report)
    return report


def run_pipeline(cfg: RunConfig, mode: str, checkpoint_path=None,
                 verbose=False) -> dict:
    """Execute the chosen pipeline, writing every intermediate artifact plus
    a run manifest under cfg.out_dir. Returns the run report."""
    if mode not in PIPELINES:
        raise ValueError(f"unknown pipeline {mode!r}; choose from {PIPELINES}")
    cfg.validate()
    nn.set_dtype(cfg.dtype)
    os.makedirs(cfg.out_dir, exist_ok=True)
    artifacts = {}
    timings = {}
    report = {"pipeline": mode}

    def timed(stage, fn, *args, **kw):
        t0 = time.perf_counter()
        try:
            result = fn(*args, **kw)
        except Exception as exc:
            raise PipelineError(stage, exc) from exc
        timings[stage] = time.perf_counter() - t0
        return result

    manifest, epoch_map, digests = timed("ingest", ingest_stage, cfg)
    manifest_path = os.path.join(cfg.out_dir, "manifest.json")
    manifest.save(manifest_path)
    artifacts["manifest"] = manifest_path
    report["epoch_counts"] = manifest.counts()

    if mode in (GASF_CNN, ENCODE_ONLY, EVAL_ONLY):
        image_dir = os.path.join(cfg.out_dir, "images")
        train_x, train_y, val_x, val_y = timed(
            "encode", encode_stage, cfg, manifest, epoch_map,
            image_dir if mode in (GASF_CNN, ENCODE_ONLY) else None)
        if mode in (GASF_CNN, ENCODE_ONLY):
            artifacts["images"] = image_dir

        if mode == GASF_CNN:
            if cfg.augment:
                train_x, train_y = timed("augment", augment_train_set,
                                         train_x, train_y, cfg.seed)
            net = nn.build_custom_cnn(
                (cfg.image_size, cfg.image_size, 3), cfg.cnn_scale, cfg.seed)

            def train_cnn():
                ckpt = nn.train(net, train_x, train_y, val_x, val_y,
                                _train_config(cfg), verbose=verbose)
                net.set_weights(ckpt.weights)
                return ckpt

            ckpt = timed("train", train_cnn)
            ckpt_path = os.path.join(cfg.out_dir, "checkpoint.gasfckpt")
            nn.save_checkpoint(ckpt_path, net, ckpt)
            artifacts["checkpoint"] = ckpt_path
            report["best_epoch"] = ckpt.epoch
            report["val_accuracy"] = ckpt.val_accuracy
            report["metrics"] = timed("eval", _eval_reports, net, val_x,
                                      val_y, cfg.out_dir, "Custom CNN")
        elif mode == EVAL_ONLY:
            if not checkpoint_path:
                raise PipelineError("eval", "EvalOnly requires a checkpoint")

            def eval_only():
                net, _ = nn.load_checkpoint(checkpoint_path)
                return _eval_reports(net, val_x, val_y, cfg.out_dir,
                                     "Custom CNN")

            report["metrics"] = timed("eval", eval_only)

    if mode in (FEATURE_ANN, FEATURES_ONLY):
        entries, vectors = timed("features", features_stage, cfg, manifest,
                                 epoch_map)
        features_path = os.path.join(cfg.out_dir, "features.csv")
        texture.write_feature_csv(features_path, vectors,
                                  [e.label for e in entries])
        artifacts["features"] = features_path

        if mode == FEATURE_ANN:
            train_x, train_y, val_x, val_y = _feature_arrays(entries, vectors)

            def select():
                swarm = pso.SwarmConfig(
                    particles=cfg.particles, iterations=cfg.iterations,
                    inertia=cfg.inertia, cognitive=cfg.cognitive,
                    social=cfg.social, v_max=cfg.v_max, seed=cfg.seed,
                    folds=cfg.folds)
                return pso.pso_select(train_x, train_y, swarm)

            selection = timed("select", select)
            selection_path = os.path.join(cfg.out_dir, "selection.json")
            with open(selection_path, "w") as f:
                f.write(selection.to_json())
            artifacts["selection"] = selection_path
            mask = selection.mask.bits

            def train_ann():
                mx = train_x[:, mask]
                vx = val_x[:, mask]
                mu, sd = mx.mean(axis=0), mx.std(axis=0)
                sd = np.where(sd > 0, sd, 1.0)
                net = nn.build_dense_ann(int(mask.sum()), cfg.ann_hidden,
                                         cfg.seed)
                ckpt = nn.train(net, (mx - mu) / sd, train_y,
                                (vx - mu) / sd, val_y,
                                _train_config(cfg), verbose=verbose)
                net.set_weights(ckpt.weights)
                return net, ckpt, (vx - mu) / sd

            net, ckpt, val_z = timed("train", train_ann)
            ckpt_path = os.path.join(cfg.out_dir, "checkpoint.gasfckpt")
            nn.save_checkpoint(ckpt_path, net, ckpt)
            artifacts["checkpoint"] = ckpt_path
            report["best_epoch"] = ckpt.epoch
            report["val_accuracy"] = ckpt.val_accuracy
            report["selected_features"] = [
                name for name, bit in zip(texture.FEATURE_NAMES, mask) if bit
            ]
            report["metrics"] = timed("eval", _eval_reports, net, val_z,
                                      val_y, cfg.out_dir, "Feature based ANN")

    run_manifest = {
        "pipeline": mode,
        "config": json.loads(cfg.to_json()),
        "seed": cfg.seed,
        "input_digests": digests,
        "artifacts": artifacts,
        "wall_clock_s": timings,
    }
    run_manifest_path = os.path.join(cfg.out_dir, "run_manifest.json")
    with open(run_manifest_path, "w") as f:
        f.write(json.dumps(run_manifest, indent=2, sort_keys=True))
    report["artifacts"] = artifacts
    report["run_manifest"] = run_manifest_path
    return report


def generate_synthetic(out_dir, records_per_class=10, epochs_per_record=25,
                       epoch_len=256, seed=0):
    return synth.generate_dataset(out_dir, records_per_class,
                                  epochs_per_record, epoch_len, seed)
