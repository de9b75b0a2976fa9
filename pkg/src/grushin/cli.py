"""Command-line runner: execute experiment families and grade their contracts.

Each run writes its CSV artifacts plus a summary.json (written last) and
exits 0 exactly when every graded contract passed.
"""

import argparse
import json
import os
import sys
import tempfile
import time

from . import __version__
from .experiments import (
    CONFIG_SCHEMA,
    FAMILY_ORDER,
    ConfigError,
    run_families,
    validate_config,
)

KIND_TO_FAMILIES = {
    "spectrum": ("spectrum",),
    "observe": ("observe",),
    "asymptotics": ("asymptotics",),
    "beam-sweep": ("beam_sweep",),
    "normalform": ("normalform",),
    "all": FAMILY_ORDER,
}

_KIND_HELP = {
    "spectrum": "per-mode eigenvalue table, comparison and counting checks",
    "observe": "random-field coercivity and conservation checks",
    "asymptotics": "large-frequency gap and profile asymptotics",
    "beam-sweep": "wave-packet observability sweep across scales",
    "normalform": "odd extension and averaging-correction residuals",
    "all": "every family; the summary grades all acceptance contracts",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grushin",
        description="Spectral experiments for the degenerate Schrodinger flow on a strip.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True, metavar="KIND")
    for kind in KIND_TO_FAMILIES:
        p = sub.add_parser(kind, help=_KIND_HELP[kind])
        p.add_argument("--config", metavar="PATH", help="JSON config; omitted fields use defaults")
        p.add_argument("--out", metavar="DIR", help="output directory (default from config)")
        p.add_argument("--seed", type=int, metavar="U64", help="override the config seed")
        p.add_argument(
            "--threads",
            type=int,
            default=1,
            metavar="INT",
            help="experiment-level parallelism; 0 = one worker per family",
        )
    return parser


def _write_summary(path: str, summary: dict) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            json.dump(summary, handle, indent=2)
            handle.write("\n")
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    raw = {}
    if args.config is not None:
        try:
            with open(args.config) as handle:
                raw = json.load(handle)
        except OSError as err:
            print(f"config error: cannot read {args.config}: {err}", file=sys.stderr)
            return 2
        except json.JSONDecodeError as err:
            print(f"config error: {args.config} is not valid JSON: {err}", file=sys.stderr)
            return 2
    try:
        config = validate_config(raw)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("seed: must fit in an unsigned 64-bit integer")
            config["seed"] = args.seed
        if args.threads < 0:
            raise ConfigError("threads: must be >= 0")
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2

    out_dir = args.out if args.out is not None else config["out"]
    os.makedirs(out_dir, exist_ok=True)
    start = time.perf_counter()
    outputs = []
    error = None
    try:
        outputs = run_families(config, KIND_TO_FAMILIES[args.kind], out_dir, args.threads)
    except Exception as err:
        error = f"{type(err).__name__}: {err}"

    contracts = sorted(
        (c for out in outputs for c in out.contracts), key=lambda c: int(c.cid[1:])
    )
    all_passed = error is None and bool(contracts) and all(c.passed for c in contracts)
    summary = {
        "schema_version": CONFIG_SCHEMA,
        "defaults_version": CONFIG_SCHEMA,
        "kind": args.kind,
        "seed": config["seed"],
        "out": out_dir,
        "config": config,
        "experiments": [
            {"kind": out.kind, "files": out.files, "seconds": out.seconds} for out in outputs
        ],
        "contracts": [
            {
                "id": c.cid,
                "name": c.name,
                "passed": c.passed,
                "measured": c.measured,
                "seconds": c.seconds,
            }
            for c in contracts
        ],
        "all_passed": all_passed,
        "wall_seconds": time.perf_counter() - start,
    }
    if error is not None:
        summary["error"] = error
    _write_summary(os.path.join(out_dir, "summary.json"), summary)

    for c in contracts:
        print(f"{c.cid} {'PASS' if c.passed else 'FAIL'} {c.name} ({c.seconds:.1f}s)")
    if error is not None:
        print(f"error: {error}", file=sys.stderr)
        return 1
    return 0 if all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
