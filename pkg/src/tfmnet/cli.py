"""Command-line entry point.

    tfmnet run --config cfg.toml            # full pipeline
    tfmnet run --config cfg.toml --stage metrics
    tfmnet metrics --config cfg.toml        # one stage against prior artifacts
    tfmnet cdf --config cfg.toml            # print the distance CDF table

Exit codes: 0 success, 2 configuration error, 3 stage failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import pipeline
from .config import SUBSETS, load_config
from .errors import ConfigError, TfmnetError
from .network import distance_cdf

log = logging.getLogger("tfmnet")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STAGE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tfmnet",
        description="Forma mentis network pipeline: transcripts to explained predictions.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
        p.add_argument("--config", required=True, help="TOML pipeline configuration")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument(
            "--subset",
            choices=SUBSETS,
            default=None,
            help="restrict to one feature subset",
        )
        p.add_argument(
            "--permute", type=int, default=None, metavar="N",
            help="override the number of target-permutation repetitions",
        )
        return p

    run_p = add("run", "execute the full pipeline")
    run_p.add_argument(
        "--stage",
        choices=pipeline.STAGES,
        default=None,
        help="stop after this stage",
    )
    for name, help_text in (
        ("ingest", "parse the transcript corpus"),
        ("build", "construct the networks"),
        ("metrics", "compute graph metrics"),
        ("emotions", "compute emotion z-scores"),
        ("train", "assemble features and cross-validate the models"),
        ("explain", "attributions, feature elimination, permutation baseline"),
        ("cdf", "print the dependency-distance CDF table"),
        ("report", "compile result tables and figures"),
    ):
        add(name, help_text)
    return parser


def _apply_overrides(cfg, args):
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.subset is not None:
        cfg = replace(cfg, subsets=(args.subset,))
    if args.permute is not None:
        if args.permute < 0:
            raise ConfigError("--permute must be >= 0")
        cfg = replace(cfg, n_perm=args.permute)
    return cfg


def _cmd_cdf(cfg) -> None:
    transcripts = pipeline.load_transcripts(Path(cfg.out_dir))
    cdf = distance_cdf([transcripts[t] for t in sorted(transcripts)])
    print("k\tcumulative_fraction")
    for k in sorted(cdf):
        print(f"{k}\t{cdf[k]:.4f}")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _apply_overrides(load_config(args.config), args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    try:
        if args.command == "run":
            pipeline.run(cfg, upto=args.stage)
        elif args.command == "cdf":
            _cmd_cdf(cfg)
        else:
            pipeline._STAGE_FUNCS[args.command](cfg)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except TfmnetError as exc:
        log.error("%s", exc)
        return EXIT_STAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
