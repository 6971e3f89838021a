"""``giant-ssh`` command-line driver.

Exit codes: 0 success, 1 validation/config failure, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields

from giant_ssh import commands
from giant_ssh.errors import InputError, NumericError
from giant_ssh.io import RunConfig, write_tables

log = logging.getLogger("giant_ssh")

_BOOL = {"probe_enabled", "absolute_units"}
_LISTS = {"d_list": int, "k_list": str}


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key-value YAML recipe")
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name in _BOOL:
            p.add_argument(flag, dest=f.name, action=argparse.BooleanOptionalAction, default=None)
        elif f.name in _LISTS:
            p.add_argument(flag, dest=f.name, nargs="+", type=_LISTS[f.name], default=None)
        elif f.name in ("L", "n", "m", "theta_points", "t_points", "workers", "probe_cell"):
            p.add_argument(flag, dest=f.name, type=int, default=None)
        elif f.name in ("boundary", "kind", "probe_sublattice", "target", "output_dir", "output_format"):
            p.add_argument(flag, dest=f.name, default=None)
        elif f.name in RunConfig._angles:
            p.add_argument(flag, dest=f.name, default=None, help="number or e.g. 0.8pi")
        else:
            p.add_argument(flag, dest=f.name, type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="giant-ssh", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("spectrum", "energy spectrum versus theta"),
        ("distribution", "photon distribution of one level, numeric and closed form"),
        ("effective", "atom-mode couplings and effective photon couplings"),
        ("probe", "probe-atom Rabi dynamics"),
        ("validate", "analytic-vs-numeric cross-checks"),
    ):
        _add_overrides(sub.add_parser(name, help=help_))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = {f.name: getattr(args, f.name) for f in fields(RunConfig)}
    try:
        cfg = RunConfig.load(args.config, overrides)
        ok = True
        if args.command == "validate":
            tables, ok = commands.cmd_validate(cfg)
        else:
            tables = getattr(commands, f"cmd_{args.command}")(cfg)
        for path in write_tables(tables, cfg.output_dir, cfg.output_format):
            print(path)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 2
    if not ok:
        print("validation failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
