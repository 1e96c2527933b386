"""``fsmcmc sample|sweep|tune|compare|twin|validate --config <path> [--seed N] [--out DIR]``.

Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback

from .config import EXPERIMENT_KINDS, ConfigError, load_config, parse_config

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fsmcmc", description="Function-space MCMC experiments.")
    p.add_argument("command", choices=EXPERIMENT_KINDS)
    p.add_argument("--config", help="JSON experiment document (optional for validate)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--suite", help="validate: suite name (overrides the config)")
    return p


def _error(kind: str, message: str, errors=None, out_dir=None) -> None:
    report = {"status": "error", "kind": kind, "message": message}
    if errors:
        report["errors"] = [{"path": p, "message": m} for p, m in errors]
    text = json.dumps(report, indent=2)
    print(text, file=sys.stderr)
    if out_dir:
        try:
            os.makedirs(out_dir, exist_ok=True)
            with open(os.path.join(out_dir, "error.json"), "w") as fh:
                fh.write(text + "\n")
        except OSError:
            pass


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.config is not None:
            config = load_config(args.config)
        elif args.command == "validate":
            config = parse_config({"kind": "validate", "seed": 0, "suite": args.suite or "all"})
        else:
            raise ConfigError([("", "--config is required")])
        update = {}
        if args.seed is not None:
            update["seed"] = args.seed
        if args.suite is not None:
            update["suite"] = args.suite
        if update:
            # re-validate so overrides obey the same rules as the document
            config = parse_config({**config.model_dump(mode="json"), **update})
        if config.kind != args.command:
            raise ConfigError([("kind", f"config kind {config.kind!r} does not match command {args.command!r}")])
    except ConfigError as exc:
        _error("config", str(exc), exc.errors)
        return EXIT_CONFIG
    out_dir = args.out or config.output_dir
    from .runner import run
    try:
        result = run(config, out_dir)
    except Exception as exc:  # reported, not swallowed: exit code 3 plus a traceback in error.json
        _error("runtime", f"{type(exc).__name__}: {exc}", [("", traceback.format_exc())], out_dir)
        return EXIT_RUNTIME
    print(json.dumps({"status": "ok", "output_dir": result.output_dir, "result": result.report["result"]},
                     indent=2, default=str))
    return result.status


if __name__ == "__main__":
    sys.exit(main())
