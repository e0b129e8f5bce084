"""Command-line front end: ``generate``, ``eval``, ``stats``, ``make-toy-assets``.

Exit codes: 0 success, 1 user error (bad config/arguments/files), 2 internal
error (including a failed scene, whose id and seed are printed for replay).
"""

import argparse
import json
import math
import sys

from .assets import make_toy_assets, write_asset_pack
from .errors import ConfigError, HandSynthError
from .metrics import evaluate_dataset
from .pipeline import GenerationConfig, dataset_stats, generate_dataset
from .sampling import SamplerConfig

_CONFIG_KEYS = {"assets", "branch", "n_scenes", "seed", "resolution", "supersample",
                "workers", "out", "bbox_pad", "store_vertices",
                "use_pose_correctives", "sampler"}
_SAMPLER_KEYS = {"fov_range_deg", "distance_means", "distance_std", "distance_floor",
                 "hue_range", "sat_range", "vivid_prob", "pose_source",
                 "include_forearm"}


def _load_generation_config(path, overrides):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    sampler_raw = raw.get("sampler", {})
    unknown = set(sampler_raw) - _SAMPLER_KEYS
    if unknown:
        raise ConfigError(f"unknown sampler keys: {sorted(unknown)}")
    sampler = SamplerConfig()
    if "fov_range_deg" in sampler_raw:
        lo, hi = sampler_raw["fov_range_deg"]
        sampler.fov_range = (math.radians(lo), math.radians(hi))
    for key in ("distance_means", "distance_std", "distance_floor", "hue_range",
                "sat_range", "vivid_prob", "pose_source", "include_forearm"):
        if key in sampler_raw:
            setattr(sampler, key, sampler_raw[key])

    out_dir = overrides.get("out") or raw.get("out")
    if not out_dir:
        raise ConfigError("no output directory (config 'out' or --out)")
    try:
        return GenerationConfig(
            out_dir=out_dir,
            n_scenes=int(raw.get("n_scenes", 4)),
            seed=int(overrides.get("seed", raw.get("seed", 0))),
            branch=raw.get("branch", "single"),
            assets=raw.get("assets", {"kind": "toy", "seed": 0}),
            resolution=tuple(raw.get("resolution", (256, 256))),
            supersample=int(raw.get("supersample", 2)),
            workers=int(overrides.get("workers", raw.get("workers", 1))),
            bbox_pad=int(raw.get("bbox_pad", 0)),
            store_vertices=bool(raw.get("store_vertices", True)),
            use_pose_correctives=bool(raw.get("use_pose_correctives", False)),
            sampler=sampler,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc


def _cmd_generate(args):
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out is not None:
        overrides["out"] = args.out
    config = _load_generation_config(args.config, overrides)
    manifest = generate_dataset(config)
    print(f"wrote {manifest['n_samples']} samples "
          f"({manifest['n_scenes']} scenes) to {config.out_dir}")
    return 0


def _cmd_eval(args):
    report = evaluate_dataset(args.dataset_dir, args.predictions,
                              auc_t_max=args.auc_tmax,
                              aligned_fscore=not args.no_aligned_fscore)
    print(report.to_text(units=args.units))
    json_out = args.json_out or args.predictions + ".report.json"
    with open(json_out, "w") as fh:
        json.dump(report.to_dict(units=args.units), fh, indent=2)
        fh.write("\n")
    print(f"report written to {json_out}")
    return 0


def _cmd_stats(args):
    stats = dataset_stats(args.dataset_dir)
    if args.json:
        print(json.dumps(stats, indent=2))
        return 0
    print(f"scenes          {stats['n_scenes']}")
    print(f"samples         {stats['n_samples']}")
    vps = stats["views_per_scene"]
    print(f"views/scene     {vps['min']}..{vps['max']}")
    print(f"branches        {stats['branches']}")
    print(f"light counts    {stats['light_count_histogram']}")
    print(f"fov (deg)       {stats['fov_deg']['min']:.2f}..{stats['fov_deg']['max']:.2f}")
    d = stats["cam_distance_m"]
    print(f"distance (m)    {d['min']:.3f}..{d['max']:.3f}  mean {d['mean']:.3f}")
    c = stats["mask_coverage"]
    print(f"mask coverage   min {c['min']:.4f}  mean {c['mean']:.4f}  max {c['max']:.4f}")
    return 0


def _cmd_make_toy_assets(args):
    pack, _ = make_toy_assets(args.seed)
    write_asset_pack(pack, args.out)
    print(f"toy asset pack (seed {args.seed}) written to {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="handsynth",
        description="Synthetic RGB-D hand dataset generation and evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a dataset from a JSON config")
    gen.add_argument("--config", required=True, help="path to generation config JSON")
    gen.add_argument("--seed", type=int, default=None, help="override config seed")
    gen.add_argument("--workers", type=int, default=None, help="override worker count")
    gen.add_argument("--out", default=None, help="override output directory")
    gen.set_defaults(func=_cmd_generate)

    ev = sub.add_parser("eval", help="score predictions against a dataset")
    ev.add_argument("dataset_dir")
    ev.add_argument("predictions", help="JSON array of {sample_id, joints, vertices?}")
    ev.add_argument("--units", choices=("mm", "cm"), default="mm")
    ev.add_argument("--auc-tmax", type=float, default=50.0,
                    help="PCK threshold upper bound in mm (default 50)")
    ev.add_argument("--no-aligned-fscore", action="store_true",
                    help="skip post-alignment F-scores")
    ev.add_argument("--json-out", default=None,
                    help="JSON report path (default <predictions>.report.json)")
    ev.set_defaults(func=_cmd_eval)

    st = sub.add_parser("stats", help="summarize a generated dataset")
    st.add_argument("dataset_dir")
    st.add_argument("--json", action="store_true", help="emit JSON instead of text")
    st.set_defaults(func=_cmd_stats)

    toy = sub.add_parser("make-toy-assets", help="write the procedural toy asset pack")
    toy.add_argument("--out", required=True)
    toy.add_argument("--seed", type=int, default=0)
    toy.set_defaults(func=_cmd_make_toy_assets)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HandSynthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # scene failures and genuine bugs
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
