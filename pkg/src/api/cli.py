"""QuadTorsion Command Line
Classification queries, smallest fields, Jacobian orders, torsion certificates,
density scans and the golden verification, with table or JSON output
"""

import argparse
import json
import sys
from typing import Any, List, Optional

import pandas as pd
from loguru import logger

from src.analysis.classify import ClassificationStatus, classify, smallest_field
from src.analysis.density import density_scan
from src.analysis.evaluator import SystemEvaluator
from src.analysis.fixtures import load_fixtures, resolve_radical
from src.core.config import get_settings, setup_logging
from src.core.errors import QuadTorsionError, UsageError
from src.curves.ellcurve import QUADRATIC_TORSION_GROUPS, TorsionGroup, torsion_certify
from src.curves.genus2 import (count_hyper_points, jacobian_order, jacobian_order_ext,
                               zeta_numerator)
from src.fields.qfield import QuadField, squarefree_reduce
from src.modular.catalog import catalog, get_record
from src.modular.ledger import get_ledger

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def field_from_arg(d: int) -> QuadField:
    """Q(sqrt(d)) after removing square factors from d"""
    if d == 0:
        raise UsageError("d must be nonzero")
    reduced, c = squarefree_reduce(d)
    if reduced == 1:
        raise UsageError(f"d = {d} is a square; Q(sqrt({d})) = Q is not quadratic")
    if reduced != d:
        logger.warning(f"d = {d} = {c}^2 * {reduced}; using Q(sqrt({reduced}))")
    return QuadField(reduced)


def _emit(args, payload: Any, table: str):
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
    else:
        print(table)


def _status_table(statuses: List[ClassificationStatus]) -> str:
    frame = pd.DataFrame([{
        "d": s.d,
        "group": str(s.group),
        "verdict": s.label,
        "evidence": len(s.evidence),
    } for s in statuses])
    return frame.to_string(index=False)


def _evidence_lines(status: ClassificationStatus) -> str:
    lines = []
    for i, step in enumerate(status.evidence, 1):
        lines.append(f"  {i}. [{step.source}] {step.signal.value}: {step.detail}")
    return "\n".join(lines)


def cmd_classify(args) -> int:
    K = field_from_arg(args.d)
    if args.all:
        groups = sorted(QUADRATIC_TORSION_GROUPS, key=lambda g: (g.m, g.n))
        statuses = [classify(K, T) for T in groups]
        _emit(args, [s.to_dict() for s in statuses], _status_table(statuses))
        return EXIT_OK
    if not args.group:
        raise UsageError("classify needs --group or --all")
    status = classify(K, TorsionGroup.parse(args.group))
    table = f"{status.group} over {K}: {status.label}\n{_evidence_lines(status)}"
    _emit(args, status.to_dict(), table)
    return EXIT_OK


def cmd_smallest(args) -> int:
    T = TorsionGroup.parse(args.group)
    result = smallest_field(T, args.max_disc)
    if result.exhausted:
        table = f"{T}: no field with |disc| <= {args.max_disc or get_settings().primes.max_abs_disc}"
    else:
        table = f"{T}: smallest field Q(sqrt({result.d})), {result.status.label}"
        if result.conditional:
            table += f"\n  conditional on UNKNOWN fields d = {[s.d for s in result.skipped]}"
    _emit(args, result.to_dict(), table)
    return EXIT_OK if not result.exhausted else EXIT_FAILURE


def cmd_jacobian_order(args) -> int:
    rec = get_record(args.curve)
    if rec.genus != 2:
        raise UsageError(f"{rec.curve_id} has genus {rec.genus}; jacobian-order needs genus 2")
    if args.ext not in (1, 2):
        raise UsageError("--ext must be 1 or 2")
    C = rec.hyper
    order = jacobian_order(C, args.p) if args.ext == 1 else jacobian_order_ext(C, args.p)
    zeta = zeta_numerator(C, args.p)
    payload = {
        "curve": rec.curve_id,
        "p": args.p,
        "ext": args.ext,
        "count": count_hyper_points(C.at(args.p), args.ext),
        "c1": zeta.c1,
        "c2": zeta.c2,
        "jacobian_order": order,
    }
    _emit(args, payload, str(order))
    return EXIT_OK


def cmd_torsion(args) -> int:
    if bool(args.curve_file) == bool(args.fixture):
        raise UsageError("torsion needs exactly one of --curve-file or --fixture")
    records = load_fixtures(args.curve_file) if args.curve_file else load_fixtures()
    if args.fixture:
        records = [r for r in records if r.name == args.fixture]
        if not records:
            raise UsageError(f"no fixture named {args.fixture!r}")

    payload, lines = [], []
    for record in records:
        E = record.build_curve()
        reading = None
        if record.ambiguous:
            reading = resolve_radical(record).chosen
        points = record.build_points(reading) if reading in (None, record.d) else []
        certificate = torsion_certify(E, points, search=not args.no_search)
        payload.append({"name": record.name, "d": record.d, **certificate.to_dict()})
        upper = certificate.upper_order if certificate.upper_order is not None else "?"
        lines.append(f"{record.name}: torsion contains {certificate.lower}, order divides {upper}"
                     f"{' (exact)' if certificate.exact else ''}")
    _emit(args, payload if len(payload) > 1 else payload[0], "\n".join(lines))
    return EXIT_OK


def cmd_density(args) -> int:
    t = args.t or get_settings().density.default_t
    result = density_scan(t)
    table = (f"t = {result.t}: N_t = {result.n_t}, A_t = {result.a_t}, ratio = {result.ratio:.6f}\n"
             f"{result.breakdown_frame().to_string(index=False)}")
    _emit(args, result.to_dict(), table)
    return EXIT_OK


def cmd_verify_paper(args) -> int:
    evaluator = SystemEvaluator(include_slow=not args.quick, quiet=args.json)
    passed = evaluator.evaluate_system()
    if args.json:
        print(evaluator.to_json())
    return EXIT_OK if passed else EXIT_FAILURE


def cmd_catalog(args) -> int:
    records = catalog()
    frame = pd.DataFrame([{
        "curve": r.curve_id,
        "genus": r.genus,
        "equation": r.equation,
        "cusps": r.cusp_poly_str(),
        "flags": ",".join(r.flags) or "-",
    } for r in records])
    _emit(args, [r.to_dict() for r in records], frame.to_string(index=False))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Emit JSON instead of a table.")
    common.add_argument("--ledger", type=str, default=None, help="Facts ledger path (overrides config).")
    common.add_argument("--verbose", action="store_true", help="Debug logging.")

    parser = argparse.ArgumentParser(
        prog="quadtorsion",
        description="Torsion of elliptic curves over quadratic fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="Classify a torsion group over Q(sqrt(d)).")
    p.add_argument("--d", type=int, required=True, help="Field parameter d (reduced to its squarefree part).")
    p.add_argument("--group", type=str, help="Group spec: '11' or '2x12'.")
    p.add_argument("--all", action="store_true", help="Classify all 26 groups.")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("smallest", parents=[common], help="Smallest field over which a group appears.")
    p.add_argument("--group", type=str, required=True)
    p.add_argument("--max-disc", type=int, default=None, dest="max_disc", help="Largest |disc| scanned.")
    p.set_defaults(handler=cmd_smallest)

    p = sub.add_parser("jacobian-order", parents=[common], help="|J(F_p)| or |J(F_p^2)| of a genus 2 X1(N).")
    p.add_argument("--curve", type=str, required=True, help="Curve key, e.g. X1_13.")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--ext", type=int, default=1)
    p.set_defaults(handler=cmd_jacobian_order)

    p = sub.add_parser("torsion", parents=[common], help="Certify the torsion of a fixture curve.")
    p.add_argument("--curve-file", type=str, default=None, dest="curve_file", help="Fixture JSON file.")
    p.add_argument("--fixture", type=str, default=None, help="Name of a shipped fixture.")
    p.add_argument("--no-search", action="store_true", dest="no_search", help="Use only the listed points.")
    p.set_defaults(handler=cmd_torsion)

    p = sub.add_parser("density", parents=[common], help="Kenku-Momose density over psi^-1(1..t).")
    p.add_argument("--t", type=int, default=None)
    p.set_defaults(handler=cmd_density)

    p = sub.add_parser("verify-paper", parents=[common], help="Run every golden check.")
    p.add_argument("--quick", action="store_true", help="Skip smallest-field and density checks.")
    p.set_defaults(handler=cmd_verify_paper)

    p = sub.add_parser("catalog", parents=[common], help="List the cataloged modular curves.")
    p.set_defaults(handler=cmd_catalog)

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    settings = get_settings()
    setup_logging(settings, "DEBUG" if args.verbose else None)

    try:
        if args.ledger:
            settings.data.ledger_path = args.ledger
            get_ledger(settings.ledger_file)
        return args.handler(args)
    except UsageError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except QuadTorsionError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
