"""Command line front end.

    adiavac validate --config FILE
    adiavac run --config FILE [--suite NAME] [--out DIR]

`run` executes the requested suite (or every suite whose section appears
in the config), writes CSV tables plus a manifest.json with a sha256 per
artifact, and prints one PASS/FAIL line per assertion. Exit codes: 0 all
assertions passed, 1 at least one failed, 2 the config was rejected.

ADIAVAC_THREADS sets the number of worker threads for batched mode
integrations. Work is split into fixed chunks regardless of the thread
count, so the results are bit-identical for any setting.
"""

from __future__ import annotations

import argparse
import os
import sys

from ._version import __version__
from .config import KNOWN_SUITES, load_config
from .errors import ConfigInvalid
from .reporting import ensure_outdir, write_manifest
from .suites import run_suites


def _threads_from_env() -> int:
    raw = os.environ.get("ADIAVAC_THREADS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigInvalid(f"ADIAVAC_THREADS must be an integer, got {raw!r}")
    if workers < 1:
        raise ConfigInvalid(f"ADIAVAC_THREADS must be at least 1, got {workers}")
    return workers


def _cmd_validate(args) -> int:
    cfg = load_config(args.config)
    enabled = [name for name in KNOWN_SUITES if getattr(cfg, name) is not None]
    print(f"config OK: label={cfg.label!r}, suites: {', '.join(enabled) or 'none'}")
    return 0


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    workers = _threads_from_env()
    if args.suite == "all":
        names = [name for name in KNOWN_SUITES if getattr(cfg, name) is not None]
        if not names:
            raise ConfigInvalid("config enables no suites")
    else:
        if args.suite not in KNOWN_SUITES:
            raise ConfigInvalid(
                f"unknown suite {args.suite!r}; choose from {', '.join(KNOWN_SUITES)} or 'all'"
            )
        names = [args.suite]
    outdir = ensure_outdir(args.out if args.out else cfg.outdir)

    results = run_suites(cfg, names, outdir, workers)

    for name in names:
        res = results[name]
        for a in res.assertions:
            tag = "PASS" if a.passed else "FAIL"
            print(f"[{tag}] {name}: {a.name} ({a.detail})")

    payload = {
        "package": "adiavac",
        "version": __version__,
        "label": cfg.label,
        "seed": cfg.seed,
        "threads": workers,
        "suites_run": names,
        "config": cfg.raw,
        "suites": {name: results[name].as_dict() for name in names},
        "all_passed": all(results[name].passed for name in names),
    }
    manifest_path = os.path.join(outdir, "manifest.json")
    write_manifest(manifest_path, payload)

    failed = sum(
        1 for name in names for a in results[name].assertions if not a.passed
    )
    if failed:
        print(f"{failed} assertion(s) failed; manifest: {manifest_path}")
        return 1
    print(f"all assertions passed; manifest: {manifest_path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="adiavac",
        description="adiabatic vacuum experiments for the Klein-Gordon field "
        "on Robertson-Walker backgrounds with three-sphere sections",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run experiment suites from a config file")
    p_run.add_argument("--config", required=True, help="TOML config file")
    p_run.add_argument(
        "--suite", default="all",
        help="suite name, or 'all' for every suite configured (default)",
    )
    p_run.add_argument("--out", default=None, help="output directory override")

    p_val = sub.add_parser("validate", help="check a config file without running")
    p_val.add_argument("--config", required=True, help="TOML config file")

    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_run(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
