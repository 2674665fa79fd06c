"""Command line front end for the pipeline stages.

Thin argparse wrapper: every subcommand resolves a RunConfig (INI file plus
flag overrides) and calls the matching library function.  Exit codes: 0 on
success, 2 for configuration problems, 3 when the verification suite finds
a failing invariant.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .pipeline import run_all, run_green, run_ground, run_spectra
from .verify import verify, write_report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcpt",
        description="Hubbard-cluster Green's functions from simulated "
                    "quantum circuits, with cluster perturbation theory "
                    "on top.")
    parser.add_argument("--version", action="version",
                        version="%(prog)s " + __import__(
                            "qcpt").__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "ground": "sweep the interaction strength and write the energy "
                  "table (raw, mitigated, exact)",
        "green": "measure the retarded Green's function on the quadrature "
                 "grid and transform to frequency",
        "spectra": "build lattice excitation spectra from the green stage "
                   "outputs",
        "all": "run ground, green, and spectra in order",
        "verify": "run the invariant checks and write a JSON report",
    }
    for name, help_text in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", default=None,
                       help="INI config file (defaults apply when omitted)")
        p.add_argument("--seed", type=int, default=None,
                       help="master seed override")
        p.add_argument("--out", metavar="DIR", default=None,
                       help="output directory override")
        p.add_argument("--mode", choices=("exact", "sampled"), default=None,
                       help="expectation values: exact or shot-sampled")
        p.add_argument("--noise", type=float, default=None, metavar="P",
                       help="depolarizing probability per gate per qubit")
        p.add_argument("--jobs", type=int, default=None,
                       help="worker processes for the green stage")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, seed=args.seed, out_dir=args.out,
                             mode=args.mode, noise_p=args.noise,
                             jobs=args.jobs)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.command == "verify":
        report = verify(config)
        print(report.summary())
        out = Path(config.out_dir)
        write_report(report, out / "verify_report.json")
        print(f"report: {out / 'verify_report.json'}")
        return 0 if report.passed else 3
    stage = {"ground": run_ground, "green": run_green,
             "spectra": run_spectra, "all": run_all}[args.command]
    try:
        stage(config)
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return 2
    print(f"{args.command}: outputs in {config.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
