"""Command-line entry point.

Exit status: 0 when every selected suite passed, 1 when any suite failed or
hit a precondition error, 2 for configuration or resource errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import SUITES, ConfigError, load_config
from .exceptions import ResourceLimitError
from .hilbert import enumerate_basis
from .operators import build
from .report import emit_report, run
from .spectral import spectrum

SUBCOMMAND_SUITES = {
    "report": None,
    "closure": ("rank",),
    "verify": ("charge", "symmetry", "identities", "complementarity"),
    "recurrence": ("recurrence",),
    "graph": ("graph_reduction",),
}


def _parse_tol(items):
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects SUITE=VALUE, got {item!r}")
        try:
            out[name] = float(value)
        except ValueError:
            raise ConfigError(f"--tol {name}: {value!r} is not a number") from None
        if not out[name] > 0:
            raise ConfigError(f"--tol {name}: must be positive")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jchcontrol",
                                     description="Certify controllability conditions of truncated JCH models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, suites=True):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--tol", action="append", metavar="SUITE=VALUE",
                       help="override a suite tolerance (repeatable)")
        if suites:
            p.add_argument("--suite", action="append", choices=SUITES,
                           help="run only this suite (repeatable)")

    common(sub.add_parser("report", help="run the configured suites"))
    common(sub.add_parser("closure", help="block-wise Lie closure (rank suite)"), suites=False)
    common(sub.add_parser("verify", help="charge, symmetry, identities and complementarity"),
           suites=False)
    common(sub.add_parser("recurrence", help="recurrence times of the drift family"), suites=False)
    common(sub.add_parser("graph", help="spanning tree, leaf order and edge reduction"), suites=False)

    sp = sub.add_parser("spectrum", help="eigenvalue table of one Hamiltonian")
    sp.add_argument("--config", required=True)
    sp.add_argument("--operator", default="drift",
                    help="descriptor or sum of descriptors, e.g. 'drift + hop_sum'")
    sp.add_argument("--block", type=int, help="restrict to one charge block")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _spectrum_command(args, config) -> int:
    space = enumerate_basis(config.M, config.K, config.max_states)
    total = None
    for part in args.operator.split("+"):
        op = build(part.strip(), config.params, space, edges=config.graph)
        total = op if total is None else total + op
    blocks = [args.block] if args.block is not None else range(config.K + 1)
    table = {}
    for n in blocks:
        if not total.commutes_with_N and args.block is not None:
            raise ConfigError(f"{total.name} mixes charge blocks; omit --block")
        if total.commutes_with_N:
            sl = space.block_slice(n)
            table[n] = np.linalg.eigvalsh(np.asarray(total.matrix)[sl, sl]).tolist()
    if not total.commutes_with_N:
        table = {"all": spectrum(total).tolist()}
    if args.format == "json":
        text = json.dumps({"operator": total.name, "eigenvalues": {str(k): v for k, v in table.items()}},
                          sort_keys=True, indent=2) + "\n"
    else:
        lines = [f"{total.name}"]
        for key, vals in table.items():
            lines.append(f"  n={key}: " + " ".join(f"{v:.10g}" for v in vals))
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.command == "spectrum":
            return _spectrum_command(args, config)
        suites = SUBCOMMAND_SUITES[args.command] or getattr(args, "suite", None)
        config = config.with_overrides(suites=suites, tolerances=_parse_tol(args.tol),
                                       output_path=args.out)
        report = run(config)
    except (ValueError, ResourceLimitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = emit_report(report, args.format, config.output_path)
    if config.output_path is None:
        sys.stdout.write(text)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
