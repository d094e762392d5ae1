"""Command-line front end.

    pulsepath synthesize [--config FILE] [--set KEY=VALUE ...] [--out DIR]
    pulsepath propagate  [...] [--frame exact|rwa|both]
    pulsepath sweep      [...] --alphas 0.01,0.05 [--jobs N]
    pulsepath preset fig1|fig2 [...]

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import runs
from .dynamics import IntegrationError
from .fileio import PRESETS, ConfigError, build_manifest, format_keyed, parse_alphas, read_keyed
from .synthesis import SingularityError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="keyed text file of 'key = value' lines")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a configuration key (repeatable)")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--frame", choices=("exact", "rwa", "both"), help="propagation frame(s)")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp header line")
    p.add_argument("--emit-gnuplot", action="store_true", help="also write a gnuplot script")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulsepath",
        description="Synthesize resonant pulses for prescribed two-level population paths "
                    "and check them against the full dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("synthesize", help="write the sampled pulse"))
    _common(sub.add_parser("propagate", help="propagate and write trajectory + summary"))
    sw = sub.add_parser("sweep", help="scan alpha and tabulate RWA-breakdown metrics")
    _common(sw)
    sw.add_argument("--alphas", help="comma-separated alpha values")
    sw.add_argument("--jobs", type=int, default=1, help="concurrent rows")
    pr = sub.add_parser("preset", help="reproduce a built-in parameter set")
    pr.add_argument("name", choices=sorted(PRESETS))
    _common(pr)
    return parser


def _values(args) -> dict[str, str]:
    values: dict[str, str] = {}
    if getattr(args, "name", None):
        values.update(PRESETS[args.name])
    if args.config is not None:
        try:
            values.update(read_keyed(args.config))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc.strerror}") from None
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        values[key.strip()] = value.strip()
    if args.frame is not None:
        values["frame"] = args.frame
    return values


def _print_summary(summary: dict):
    sys.stdout.write(format_keyed(summary))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        manifest = build_manifest(_values(args), out_dir=args.out,
                                  timestamp=not args.no_timestamp,
                                  emit_gnuplot=args.emit_gnuplot)
        if args.command == "synthesize":
            _, written = runs.synthesize(manifest)
        elif args.command in ("propagate", "preset"):
            written = []
            if args.command == "preset":
                written += runs.synthesize(manifest)[1]
            result = runs.run_propagation(manifest)
            written += runs.write_propagation(result)
            _print_summary(result.summary)
        else:
            alphas = parse_alphas(args.alphas, "--alphas") if args.alphas else manifest.alphas
            if not alphas:
                raise ConfigError("no alpha values given (use --alphas or the 'alphas' key)", "alphas")
            if args.jobs < 1:
                raise ConfigError("must be >= 1", "--jobs")
            rows = runs.run_sweep(manifest, alphas, args.jobs)
            written = [runs.write_sweep(manifest, rows)]
            for row in rows:
                _print_summary(row)
                sys.stdout.write("\n")
    except ConfigError as exc:
        print(f"pulsepath: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, SingularityError) as exc:
        where = f" (t = {exc.t:.12g})" if isinstance(exc, IntegrationError) else ""
        print(f"pulsepath: numerical failure{where}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in written:
        logging.getLogger(__name__).info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
