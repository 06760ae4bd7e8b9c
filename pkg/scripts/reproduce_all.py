#!/usr/bin/env python3
"""Run every vzbw subcommand against the default configuration.

Writes the canonical config file, then drives validate, evolve,
sweep-ell, limits, and density in process, collecting all CSV output
under one directory (default: reproduction/).  Stops at the first
nonzero exit code and exits with it, so a failed invariant or a
numerical failure is visible to the calling shell.

    python3 scripts/reproduce_all.py [--root reproduction]
"""

import argparse
import os
import sys

from vortexzbw.cli import main as vzbw_main
from vortexzbw.config import RunConfig, render_config

SUBCOMMANDS = ("validate", "evolve", "sweep-ell", "limits", "density")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--root", default="reproduction", help="output directory root")
    args = ap.parse_args()

    root = os.path.abspath(args.root)
    os.makedirs(root, exist_ok=True)
    cfg = RunConfig(out_dir=os.path.join(root, "out"))
    cfg_path = os.path.join(root, "run.cfg")
    with open(cfg_path, "w", encoding="utf-8") as fh:
        fh.write(render_config(cfg))
    print(f"config written to {cfg_path}")

    for name in SUBCOMMANDS:
        print(f"\n=== vzbw {name} ===")
        code = vzbw_main([name, "--config", cfg_path])
        if code != 0:
            print(f"{name} exited with code {code}", file=sys.stderr)
            return code
    print(f"\nall subcommands finished; outputs under {cfg.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
