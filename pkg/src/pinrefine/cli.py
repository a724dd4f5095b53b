"""Command-line entry point.

Every subcommand reads a flat key-value config file and accepts flag
overrides (flag beats config beats default). Exit codes: 0 on success,
1 on a validation or usage error, 2 on a stage failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__, pipeline
from .centrality import ALL_METHODS, ConvergenceError
from .ingest import ParseError
from .pipeline import ConfigError, PipelineConfig, PipelineStageError, TIERS

logger = logging.getLogger(__name__)

_STAGE_COMMANDS = ("refine", "cluster", "score-modules", "build-cm",
                   "centrality", "evaluate", "pipeline", "sweep")


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value settings file")
    parser.add_argument("--out", help="output directory for all artifacts")
    for key in ("edges", "expression", "localization", "homology", "essential"):
        parser.add_argument(f"--{key}", help=f"path to the {key} TSV file")
    parser.add_argument("--t", type=int, help="number of expression time points (default 36)")
    parser.add_argument("--th1", type=float, help="homology-correlation threshold")
    parser.add_argument("--th2", type=float, help="nucleus-rate threshold")
    parser.add_argument("--th3", type=float, help="edge-balance threshold")
    parser.add_argument("--dmnc-exponent", type=float, dest="dmnc_exponent")
    parser.add_argument("--tp-sigma", type=float, dest="tp_sigma")
    parser.add_argument("--damping", type=float)
    parser.add_argument("--tolerance", type=float)
    parser.add_argument("--max-iter", type=int, dest="max_iter")
    parser.add_argument("--topk", help="comma-separated top-k cutoffs")
    parser.add_argument("--baseline", help="report against a named reference snapshot (dip, biogrid)")
    parser.add_argument("--plots", action="store_const", const="true",
                        help="also write SVG line plots")
    parser.add_argument("--log-level", default="INFO",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pinrefine",
        description="Refine a protein interaction network through four tiers and "
                    "benchmark ten centrality measures against an essential-protein list.",
    )
    parser.add_argument("--version", action="version", version=f"pinrefine {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    helps = {
        "refine": "build the static, co-activity, and co-localization tiers",
        "cluster": "cluster the co-localization tier's maximal component into modules",
        "score-modules": "score every module (corr, nsl, tf)",
        "build-cm": "select critical modules and build the module-filtered tier",
        "centrality": "rank nodes with the ten centrality measures",
        "evaluate": "evaluate rankings against the essential-protein list",
        "pipeline": "run every stage in order",
        "sweep": "evaluate a grid of threshold combinations",
    }
    for command in _STAGE_COMMANDS:
        sub = subparsers.add_parser(command, help=helps[command])
        _add_common_options(sub)
        if command in ("centrality", "evaluate"):
            sub.add_argument("--networks", help=f"comma-separated tiers from {','.join(TIERS)}")
            sub.add_argument("--methods", help=f"comma-separated methods from {','.join(ALL_METHODS)}")
        if command == "sweep":
            sub.add_argument("--th1-list", required=True, help="comma-separated th1 values")
            sub.add_argument("--th2-list", required=True, help="comma-separated th2 values")
            sub.add_argument("--th3-list", required=True, help="comma-separated th3 values")
            sub.add_argument("--method", default="LID",
                             help="centrality method evaluated per combination (default LID)")
    return parser


def _merge_config(args: argparse.Namespace) -> PipelineConfig:
    raw = pipeline.load_config_file(args.config) if args.config else {}
    for key in ("out", "edges", "expression", "localization", "homology", "essential",
                "t", "th1", "th2", "th3", "dmnc_exponent", "tp_sigma", "damping",
                "tolerance", "max_iter", "topk", "baseline", "plots"):
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = str(value)
    return pipeline.make_config(raw)


def _float_list(text: str, name: str) -> list[float]:
    values = [v.strip() for v in text.split(",") if v.strip()]
    if not values:
        raise ConfigError(f"{name} must contain at least one value")
    try:
        return [float(v) for v in values]
    except ValueError:
        raise ConfigError(f"{name} must be comma-separated numbers, got {text!r}") from None


def _name_list(text: str | None, allowed: tuple[str, ...], name: str) -> list[str] | None:
    if text is None:
        return None
    values = [v.strip() for v in text.split(",") if v.strip()]
    bad = [v for v in values if v not in allowed]
    if bad or not values:
        raise ConfigError(f"{name} must be drawn from {','.join(allowed)}")
    return values


def _run(args: argparse.Namespace) -> int:
    cfg = _merge_config(args)
    cfg.out.mkdir(parents=True, exist_ok=True)
    if args.command == "pipeline":
        pipeline.run_pipeline(cfg)
    elif args.command == "sweep":
        pipeline.sweep_thresholds(
            cfg,
            _float_list(args.th1_list, "--th1-list"),
            _float_list(args.th2_list, "--th2-list"),
            _float_list(args.th3_list, "--th3-list"),
            method=args.method,
        )
    else:
        pipeline.clear_failure_marker(cfg.out)
        if args.command == "refine":
            pipeline.stage_refine(cfg)
        elif args.command == "cluster":
            pipeline.stage_cluster(cfg)
        elif args.command == "score-modules":
            pipeline.stage_score_modules(cfg)
        elif args.command == "build-cm":
            pipeline.stage_build_cm(cfg)
        elif args.command == "centrality":
            pipeline.stage_centrality(
                cfg,
                tiers=_name_list(args.networks, TIERS, "--networks"),
                methods=_name_list(args.methods, ALL_METHODS, "--methods"),
            )
        elif args.command == "evaluate":
            pipeline.stage_evaluate(
                cfg,
                tiers=_name_list(args.networks, TIERS, "--networks"),
                methods=_name_list(args.methods, ALL_METHODS, "--methods"),
            )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (ConfigError, ParseError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return 1
    except PipelineStageError as exc:
        logger.error("%s", exc)
        return 2
    except ConvergenceError as exc:
        logger.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
