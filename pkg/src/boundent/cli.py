"""Command-line front end.

Subcommands: ``measures`` (entanglement of one family), ``sweep`` (the
GenShifts parameter sweep as CSV), ``basis`` (the explicit minimal
bases), ``certify`` (the certification report).

Exit codes: 0 success, 1 usage error, 2 certification failure.  The
``QENT_SEED`` environment variable overrides ``--seed`` when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import certify as certify_mod
from . import measures as measures_mod
from .measures import MeasureKind, rho_q_entanglement, support_basis
from .optimize import OptimizerOptions, min_product_overlap, minimize_concurrence_on_sphere
from .tensor import ket_to_pairs
from .upb import (
    DEGENERACY_TOL,
    QubitKet,
    concurrence_min_basis,
    concurrence_min_coords,
    genshifts_upb,
    geometric_min_basis,
    q_basis,
    rho_q,
    shifts_upb,
)

_MEASURE_FLAGS = {"eg": MeasureKind.GEOMETRIC, "ec": MeasureKind.CONCURRENCE}


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="boundent", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--restarts", type=int, default=64, help="multistart restarts")
        p.add_argument("--seed", type=int, default=42, help="master seed (QENT_SEED overrides)")

    p = sub.add_parser("measures", help="entanglement of one family's mixture")
    p.add_argument("--family", choices=["shifts", "genshifts"], required=True)
    p.add_argument("--overlap", type=float, default=0.5, help="|<0|phi>|^2 for genshifts")
    p.add_argument("--measure", choices=["eg", "ec", "both"], default="both")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    common(p)

    p = sub.add_parser("sweep", help="GenShifts sweep over the overlap parameter")
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--measures", default="eg,ec", help="comma list from {eg,ec}")
    p.add_argument("--out", default="-", help="output path, - for stdout")
    common(p)

    p = sub.add_parser("basis", help="emit a closed-form minimally-entangled basis")
    p.add_argument("--measure", choices=["eg", "ec"], required=True)

    p = sub.add_parser("certify", help="structural certification of one family")
    p.add_argument("--family", choices=["shifts", "genshifts"], required=True)
    p.add_argument("--overlap", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=1e-8, help="unextendibility threshold")
    p.add_argument(
        "--bisep-resolution",
        default="721x1441",
        help="Bloch grid for the biseparable scan, e.g. 181x361",
    )
    common(p)
    return parser


def _resolve_seed(args) -> int:
    env = os.environ.get("QENT_SEED")
    if env is not None:
        return int(env)
    return args.seed


def _make_family(args):
    if args.family == "shifts":
        return shifts_upb()
    if not 0.0 <= args.overlap <= 1.0:
        raise SystemExit(1)
    return genshifts_upb(QubitKet.from_overlap(args.overlap))


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def cmd_measures(args) -> int:
    family = _make_family(args)
    opts = OptimizerOptions(restarts=args.restarts, seed=_resolve_seed(args))
    kinds = (
        list(_MEASURE_FLAGS.values())
        if args.measure == "both"
        else [_MEASURE_FLAGS[args.measure]]
    )
    reports = [rho_q_entanglement(kind, family, opts) for kind in kinds]
    parameters = {
        "overlap": None if args.family == "shifts" else args.overlap,
        "restarts": opts.restarts,
        "seed": opts.seed,
    }
    docs = [
        {"family": args.family, "parameters": parameters, **rep.to_dict()}
        for rep in reports
    ]
    if args.format == "json":
        payload = docs[0] if len(docs) == 1 else docs
        print(json.dumps(payload, indent=2))
    else:
        print("measure,value,degenerate,certified")
        for rep in reports:
            print(
                f"{rep.kind.value},{_fmt(rep.value)},"
                f"{str(rep.degenerate).lower()},{str(rep.certified).lower()}"
            )
    failed = any(not rep.certified and not rep.degenerate for rep in reports)
    return 2 if failed else 0


def cmd_sweep(args) -> int:
    requested = [token.strip() for token in args.measures.split(",") if token.strip()]
    unknown = [token for token in requested if token not in _MEASURE_FLAGS]
    if unknown or not requested:
        sys.stderr.write(f"unknown measures: {unknown}\n")
        return 1
    opts = OptimizerOptions(restarts=args.restarts, seed=_resolve_seed(args))
    lines = ["overlap,e_geometric,e_concurrence,degenerate"]
    for s in np.linspace(0.0, 1.0, args.points):
        family = genshifts_upb(QubitKet.from_overlap(float(s)))
        eg_value = min_product_overlap(family.projector_p(), opts).value
        degenerate = eg_value < DEGENERACY_TOL
        cells = [_fmt(s)]
        cells.append(_fmt(eg_value) if "eg" in requested else "")
        if "ec" in requested:
            ec_value = minimize_concurrence_on_sphere(support_basis(family), opts).value
            cells.append(_fmt(ec_value))
        else:
            cells.append("")
        cells.append(str(degenerate).lower())
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            sys.stderr.write(f"cannot write {args.out}: {exc}\n")
            return 1
    return 0


def cmd_basis(args) -> int:
    target = rho_q(shifts_upb()).entries
    if args.measure == "eg":
        basis = geometric_min_basis()
        doc = {"measure": "eg"}
    else:
        basis = concurrence_min_basis()
        doc = {
            "measure": "ec",
            "q_coordinates": [[float(x) for x in row] for row in concurrence_min_coords()],
        }
    doc["members"] = [ket_to_pairs(member) for member in basis]
    recon = np.abs(basis.projector().entries / 4.0 - target).max()
    gram = basis.gram_matrix(basis.members)
    doc["reconstruction_check"] = bool(recon < 1e-12)
    doc["max_pairwise_overlap"] = float(np.abs(gram - np.eye(len(basis))).max())
    print(json.dumps(doc, indent=2))
    return 0


def cmd_certify(args) -> int:
    try:
        res_t, res_chi = (int(x) for x in args.bisep_resolution.lower().split("x"))
    except ValueError:
        sys.stderr.write("--bisep-resolution must look like 721x1441\n")
        return 1
    family = _make_family(args)
    opts = OptimizerOptions(restarts=args.restarts, seed=_resolve_seed(args))
    report = certify_mod.full_certification(family, opts, (res_t, res_chi))
    failures = report.failures(args.tol)
    doc = report.to_dict()
    doc["parameters"] = {
        "overlap": None if args.family == "shifts" else args.overlap,
        "restarts": opts.restarts,
        "seed": opts.seed,
        "tol": args.tol,
    }
    doc["failures"] = failures
    print(json.dumps(doc, indent=2))
    return 2 if failures else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "measures": cmd_measures,
        "sweep": cmd_sweep,
        "basis": cmd_basis,
        "certify": cmd_certify,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
