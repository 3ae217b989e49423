"""Command-line entry point: ``lowergap analyze | scan | show-spectrum``.

Exit codes: 0 all certified checks pass, 1 some check failed, 2 the instance
was rejected by validation (directed, disconnected, bipartite, ...), 3 the
input or the command line is malformed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .certify import DEFAULT_TOLERANCE, CertifyOptions, certify_instance
from .errors import (
    ClosureExceedsLimit,
    InstanceFormatError,
    InvalidInstance,
    InvalidPermutation,
    NotInvariant,
    NotTransitive,
    NotUndirected,
)
from .groups import MAX_GROUP_ORDER
from .instances import load_family_spec, load_instance
from .invariants import EXACT_BIPARTITENESS_MAX_N, EXACT_CHEEGER_MAX_N
from .scan import DEFAULT_MAX_INSTANCES, scan_family
from .serialize import serialize_report, serialize_scan
from .spectral import bottom_eigenfunction

EXIT_OK, EXIT_FAILED, EXIT_REJECTED, EXIT_MALFORMED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2, which means "rejected" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_MALFORMED, f"{self.prog}: error: {message}\n")


def _unit_interval(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"xi must lie in [0, 1], got {x}")
    return x


def _positive_int(text: str) -> int:
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if x < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {x}")
    return x


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {x}")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lowergap", description="Certify lower spectral gap inequalities on group-defined graphs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, certify=True):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        p.add_argument("--max-group-order", type=_positive_int, default=MAX_GROUP_ORDER)
        if certify:
            p.add_argument("--xi", type=_unit_interval, default=None,
                           help="dichotomy parameter (default 4/5 when nu = 1, else 123/1000)")
            p.add_argument("--tolerance", type=_positive_float, default=DEFAULT_TOLERANCE)
            p.add_argument("--max-exact-bipartiteness", type=_positive_int, default=EXACT_BIPARTITENESS_MAX_N)
            p.add_argument("--max-exact-cheeger", type=_positive_int, default=EXACT_CHEEGER_MAX_N)
            p.add_argument("--simple-group", choices=("yes", "no"), default=None,
                           help="assert simplicity of the group when it is too large to test")

    p = sub.add_parser("analyze", help="certify one instance file")
    p.add_argument("instance")
    common(p)
    p = sub.add_parser("scan", help="certify every instance of a family spec")
    p.add_argument("family")
    common(p)
    p.add_argument("--max-instances", type=_positive_int, default=DEFAULT_MAX_INSTANCES)
    p.add_argument("--parallel", type=_positive_int, default=1, help="worker processes")
    p = sub.add_parser("show-spectrum", help="print eigenvalues, mu, mu2, kappa and the eigenfunction")
    p.add_argument("instance")
    common(p, certify=False)
    return parser


def _options(args) -> CertifyOptions:
    return CertifyOptions(
        xi=args.xi, tolerance=args.tolerance,
        max_exact_bipartiteness=args.max_exact_bipartiteness, max_exact_cheeger=args.max_exact_cheeger,
        simple_group=None if args.simple_group is None else args.simple_group == "yes",
    )


def _emit(data: bytes, output: Optional[str]) -> None:
    if output:
        with open(output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _load(args):
    return load_instance(args.instance, args.max_group_order)


def run_analyze(args) -> int:
    inst = _load(args)
    if not inst.flags.valid:
        print(f"rejected: {', '.join(inst.flags.reasons)}", file=sys.stderr)
        return EXIT_REJECTED
    report = certify_instance(inst, _options(args))
    print(report.hypothesis_summary(), file=sys.stderr)
    _emit(serialize_report(report, args.format), args.output)
    return EXIT_OK if report.overall else EXIT_FAILED


def run_scan(args) -> int:
    spec = load_family_spec(args.family)
    summary = scan_family(spec, _options(args), args.max_instances, args.parallel)
    best = summary.min_row
    print(
        f"{len(summary.rows)} instances, {len(summary.certified)} certified, "
        f"{len(summary.failed_instances)} failed, skipped {summary.skipped or 'none'}"
        + (f"; min C1 ratio {best.c1_ratio:.6g} at {best.label}" if best else ""),
        file=sys.stderr,
    )
    _emit(serialize_scan(summary, args.format), args.output)
    return EXIT_OK if summary.ok else EXIT_FAILED


def run_show_spectrum(args) -> int:
    inst = _load(args)
    if not inst.flags.undirected:
        print("rejected: directed", file=sys.stderr)
        return EXIT_REJECTED
    prof = bottom_eigenfunction(inst, strict=False)
    if args.format == "json":
        body = {
            "instance": inst.label, "n": inst.n, "d": inst.d,
            "eigenvalues": [float(x) for x in prof.eigenvalues],
            "mu": prof.mu, "mu2": prof.mu2,
            "kappa": prof.kappa if prof.mu2 != 1.0 else None,
            "f": [float(x) for x in prof.f], "conditioned": prof.conditioned,
            "validation": {"undirected": inst.flags.undirected, "connected": inst.flags.connected,
                           "nonbipartite": inst.flags.nonbipartite},
        }
        _emit((json.dumps(body, indent=2) + "\n").encode(), args.output)
    else:
        lines = ["index,eigenvalue"] + [f"{i},{float(x)!r}" for i, x in enumerate(prof.eigenvalues)]
        _emit(("\n".join(lines) + "\n").encode(), args.output)
    return EXIT_OK


COMMANDS = {"analyze": run_analyze, "scan": run_scan, "show-spectrum": run_show_spectrum}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InstanceFormatError, InvalidPermutation, ClosureExceedsLimit) as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except NotUndirected as exc:
        print(f"rejected: directed ({exc})", file=sys.stderr)
        return EXIT_REJECTED
    except (NotInvariant, NotTransitive, InvalidInstance) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED


if __name__ == "__main__":
    sys.exit(main())
