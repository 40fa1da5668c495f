"""Command line entry point: ``python -m relay_coding.cli <command> --config cfg.json``"""

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from utils.runer import run_command

from .config import COMMANDS, parse_config
from .exceptions import ConfigurationError, RelayCodingError
from .helper.log import level_from_flags, setup_logging

log = logging.getLogger(__name__)

FLOAT_FORMAT = '%.9g'


def write_csv(frame: pd.DataFrame, path: Path) -> None:
    """Write through a temporary file in the target directory, then rename"""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=str(path.parent))
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def output_paths(command: str, out: Path) -> Dict[str, Path]:
    if command != "curves":
        return {command: out}
    stem = out.with_suffix("") if out.suffix == ".csv" else out
    return {
        "error_vs_rate": stem.parent / f"{stem.name}_error_vs_rate.csv",
        "epscap_vs_snr": stem.parent / f"{stem.name}_epscap_vs_snr.csv",
    }


def _error_line(err: Exception) -> str:
    return json.dumps({
        "error": type(err).__name__,
        "message": str(err),
        "violations": [list(item) for item in getattr(err, "violations", [])],
    })


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        description="Relay network coding rates, gaps, outage and epsilon-capacity"
    )
    parser.add_argument(
        'command',
        choices=COMMANDS,
        help='Computation to run.'
    )
    parser.add_argument(
        '--config',
        required=True,
        action='store',
        help='JSON run configuration.'
    )
    parser.add_argument(
        '--out',
        required=False,
        action='store',
        default=None,
        help='Output CSV path (curves: file stem). Defaults to the config value or <command>.csv.'
    )
    parser.add_argument(
        '--seed',
        required=False,
        action='store',
        default=None,
        type=int,
        help='Master Monte Carlo seed.'
    )
    parser.add_argument(
        '--samples',
        required=False,
        action='store',
        default=None,
        type=int,
        help='Monte Carlo sample count.'
    )
    parser.add_argument(
        '--threads',
        required=False,
        action='store',
        default=None,
        type=int,
        help='Worker processes for chunked Monte Carlo.'
    )
    parser.add_argument(
        '--debug',
        action='store_true',
        help='Print debugging information.'
    )
    parser.add_argument(
        '--info',
        action='store_true',
        help='Print progress information.'
    )
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the process exit status"""
    args = parse_args(argv)
    setup_logging(level_from_flags(args.debug, args.info))

    written: List[Path] = []
    try:
        overrides = {"command": args.command}
        mc = {key: value for key, value in
              (("seed", args.seed), ("samples", args.samples), ("threads", args.threads))
              if value is not None}
        if mc:
            overrides["mc"] = mc
        try:
            document = Path(args.config).read_text(encoding="utf-8")
        except OSError as err:
            raise ConfigurationError(f"cannot read config {args.config}: {err}",
                                     [("--config", str(err))]) from err
        config = parse_config(document, overrides)
        out = Path(args.out or config.out or f"{args.command}.csv")

        result = run_command(config)
        frames = result if isinstance(result, dict) else {args.command: result}
        paths = output_paths(args.command, out)
        for name, frame in frames.items():
            write_csv(frame, paths[name])
            written.append(paths[name])
            log.info("wrote %d rows to %s", len(frame), paths[name])
    except (RelayCodingError, OSError) as err:
        log.error("%s failed: %s", args.command, err)
        for path in written:
            if path.exists():
                path.unlink()
        print(_error_line(err), file=sys.stderr)
        return 2 if isinstance(err, ConfigurationError) else 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
