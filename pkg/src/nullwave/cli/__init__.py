"""``nullwave`` command line.

    nullwave <experiment> --config <path-or-name> [--out DIR] [--dx V] [--dt V] [--seed N]

Exit status: 0 on success, 1 on a configuration error, 2 when a checked
inequality fails or a run diverges unexpectedly.  ``NULLWAVE_THREADS``
caps the number of transport solves run concurrently.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .. import __version__
from ..exceptions import ConfigError, NullwaveError
from .config import EXPERIMENTS, load_config, shipped_configs
from .experiments import RUNNERS
from .output import emit_convergence_table, write_outputs

__all__ = ["main", "run", "emit_convergence_table"]

EXIT_OK, EXIT_CONFIG, EXIT_VIOLATED = 0, 1, 2

logger = logging.getLogger("nullwave")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nullwave",
        description="Run a verification experiment for 1D semilinear hyperbolic systems "
                    "with null quadratic coupling.",
        epilog="Shipped configs: " + ", ".join(shipped_configs()))
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True,
                        help="path to a JSON config, or the name of a shipped config")
    parser.add_argument("--out", default="nullwave-out", help="output directory")
    parser.add_argument("--dx", type=float, help="override grid.dx")
    parser.add_argument("--dt", type=float, help="override grid.dt")
    parser.add_argument("--seed", type=int, help="override the sweep seed")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def run(cfg):
    """Run a parsed config; returns ``(report dict, Outcome)``."""
    outcome = RUNNERS[cfg.experiment](cfg)
    report = {
        "experiment": cfg.experiment,
        "config": cfg.raw,
        "result": outcome.result,
        "checks": outcome.checks,
        "status": "ok" if outcome.ok else "violated",
        "exit_code": EXIT_OK if outcome.ok else EXIT_VIOLATED,
        "version": __version__,
    }
    return report, outcome


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.experiment,
                          {"dx": args.dx, "dt": args.dt, "seed": args.seed})
        report, outcome = run(cfg)
    except ConfigError as exc:
        print(f"nullwave: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NullwaveError as exc:
        # bad input that only shows up once the solver looks at it
        print(f"nullwave: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = write_outputs(args.out, report, outcome.tables, outcome.fields,
                        cfg.section("output")["field_stride"])
    for chk in outcome.checks:
        print(f"{'PASS' if chk['holds'] else 'FAIL'} {chk['name']}: {chk['lhs']!r} vs {chk['rhs']!r}")
    print(f"{cfg.experiment}: {report['status']} -> {out}")
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
