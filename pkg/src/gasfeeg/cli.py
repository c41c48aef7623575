"""Command-line interface.

Subcommands: synth, encode, tfr, features, select, train, eval, pipeline,
report. Global flags (--config, --seed, --out, --threads) may appear before
or after the subcommand; flag values override config-file values.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import metrics, pipeline, pso, texture, tfr
from .config import ConfigError, resolve_config
from .ingest import read_record


def _add_global_flags(p):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--threads", type=int, help="worker pool size")
    p.add_argument("--data-root", help="recordings root "
                   "(<root>/normal, <root>/focal)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gasfeeg",
        description="EEG epilepsy detection via GASF imaging and "
                    "time-frequency texture features")
    _add_global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the built-in synthetic dataset")
    _add_global_flags(p)
    p.add_argument("--records-per-class", type=int, default=10)
    p.add_argument("--epochs-per-record", type=int, default=25)

    for name, descr in (
        ("encode", "ingest + GASF images only"),
        ("features", "ingest + texture feature extraction only"),
        ("select", "feature extraction + PSO selection"),
        ("train", "full GASF -> CNN pipeline"),
        ("pipeline", "run a named pipeline end to end"),
    ):
        p = sub.add_parser(name, help=descr)
        _add_global_flags(p)
        if name == "pipeline":
            p.add_argument("mode", choices=pipeline.PIPELINES)
            p.add_argument("--checkpoint", help="checkpoint for EvalOnly")

    p = sub.add_parser("eval", help="evaluate a saved checkpoint")
    _add_global_flags(p)
    p.add_argument("--checkpoint", required=True)

    p = sub.add_parser("tfr", help="dump the four spectra of one recording's "
                       "first epoch")
    _add_global_flags(p)
    p.add_argument("record", help="delimited recording file")

    p = sub.add_parser("report", help="pretty-print a metrics JSON file")
    _add_global_flags(p)
    p.add_argument("metrics_json")

    return parser


def _config_from_args(args):
    return resolve_config(
        getattr(args, "config", None),
        seed=getattr(args, "seed", None),
        out_dir=getattr(args, "out", None),
        threads=getattr(args, "threads", None),
        data_root=getattr(args, "data_root", None),
    )


def _cmd_synth(args):
    cfg = _config_from_args(args)
    out = os.path.join(cfg.out_dir, "synth")
    paths = pipeline.generate_synthetic(out, args.records_per_class,
                                        args.epochs_per_record,
                                        cfg.epoch_len, cfg.seed)
    total = sum(len(v) for v in paths.values())
    print(f"wrote {total} synthetic recordings under {out}")
    print(f"use --data-root {out} for the pipelines")
    return 0


def _cmd_tfr(args):
    cfg = _config_from_args(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    sig = read_record(args.record, cfg.delimiter, cfg.channel_index,
                      cfg.sampling_rate_hz)
    x = sig.samples[:cfg.epoch_len]
    spectra = {
        "stft": tfr.stft(x, cfg.stft_window, cfg.stft_window_len, cfg.stft_hop),
        "stockwell": tfr.stockwell(x),
        "wvd": tfr.wigner_ville(x, cfg.wvd_window, cfg.wvd_window_len),
        "set": tfr.synchro_extract(x, cfg.set_window_len, cfg.set_hop,
                                   cfg.set_delta_bins),
    }
    for name, s in spectra.items():
        bin_path = os.path.join(cfg.out_dir, f"{sig.source_id}_{name}.spec")
        png_path = os.path.join(cfg.out_dir, f"{sig.source_id}_{name}.png")
        tfr.write_spectrum(s, bin_path)
        tfr.spectrum_to_image(s, levels=256).save_png(png_path)
        print(f"{name}: {s.values.shape[0]}x{s.values.shape[1]} -> "
              f"{bin_path}, {png_path}")
    return 0


def _cmd_select(args):
    cfg = _config_from_args(args)
    report = pipeline.run_pipeline(cfg, pipeline.FEATURES_ONLY,
                                   verbose=args.verbose)
    feats, labels = texture.read_feature_csv(report["artifacts"]["features"])
    y = np.array([1 if lb == "Focal" else 0 for lb in labels])
    swarm = pso.SwarmConfig(particles=cfg.particles, iterations=cfg.iterations,
                            inertia=cfg.inertia, cognitive=cfg.cognitive,
                            social=cfg.social, v_max=cfg.v_max,
                            seed=cfg.seed, folds=cfg.folds)
    selection = pso.pso_select(feats, y, swarm)
    path = os.path.join(cfg.out_dir, "selection.json")
    with open(path, "w") as f:
        f.write(selection.to_json())
    chosen = [n for n, b in zip(texture.FEATURE_NAMES, selection.mask.bits) if b]
    print(f"selected {chosen} (fitness {selection.mask.fitness:.4f}) -> {path}")
    return 0


def _cmd_report(args):
    with open(args.metrics_json) as f:
        report = json.load(f)
    print(f"{'class':<10}{'precision':>10}{'recall':>10}{'f1':>10}")
    for cls, m in report["per_class"].items():
        print(f"{cls:<10}{m['precision']:>10.4f}{m['recall']:>10.4f}"
              f"{m['f1']:>10.4f}")
    avg = report["average"]
    print(f"{'Average':<10}{avg['precision']:>10.4f}{avg['recall']:>10.4f}"
          f"{avg['f1']:>10.4f}")
    if "auc" in report:
        print(f"AUC: {report['auc']:.4f}")
    return 0


def _run_and_print(cfg, mode, checkpoint=None, verbose=False):
    report = pipeline.run_pipeline(cfg, mode, checkpoint_path=checkpoint,
                                   verbose=verbose)
    print(f"pipeline {mode} complete; artifacts:")
    for name, path in report["artifacts"].items():
        print(f"  {name}: {path}")
    if "metrics" in report:
        avg = report["metrics"]["average"]
        line = (f"average precision {avg['precision']:.4f}, "
                f"recall {avg['recall']:.4f}, f1 {avg['f1']:.4f}")
        if "auc" in report["metrics"]:
            line += f", auc {report['metrics']['auc']:.4f}"
        print(line)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "tfr":
            return _cmd_tfr(args)
        if args.command == "select":
            return _cmd_select(args)
        if args.command == "report":
            return _cmd_report(args)
        cfg = _config_from_args(args)
        if args.command == "encode":
            return _run_and_print(cfg, pipeline.ENCODE_ONLY,
                                  verbose=args.verbose)
        if args.command == "features":
            return _run_and_print(cfg, pipeline.FEATURES_ONLY,
                                  verbose=args.verbose)
        if args.command == "train":
            return _run_and_print(cfg, pipeline.GASF_CNN, verbose=args.verbose)
        if args.command == "eval":
            return _run_and_print(cfg, pipeline.EVAL_ONLY,
                                  checkpoint=args.checkpoint,
                                  verbose=args.verbose)
        if args.command == "pipeline":
            return _run_and_print(cfg, args.mode,
                                  checkpoint=getattr(args, "checkpoint", None),
                                  verbose=args.verbose)
        raise AssertionError(args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except pipeline.PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
