import argparse
import logging
import sys
from typing import List, Optional, Sequence

from ..common.errors import EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, CliffHierError
from ..common.settings import ComponentSettings
from ..common.settings_manager import SettingsManager
from ..config.path import cache_dir
from ..core.affine_classify.affine_classify import check_class_membership, classify_cells, count_ae_classes_full, \
    extend_classification, resolve_workers, verify_4q_representatives
from ..core.gates.circuit_io import load_circuit
from ..core.gates.gates import canonical_notation, circuit_to_monomial, circuit_to_permutation, permutation_order, \
    to_cycle_structure, wire_mismatch
from ..core.hierarchy.hierarchy import DiagGroupSpec, DiagKind, diag_group_order, generate_diag_group, \
    is_semi_clifford, level
from ..core.search_ch3.search_ch3 import ALL_SEMI_CLIFFORD, algorithm1, full_space, target_space
from ..utils import json_util
from .tables import CONVENTION, CYCLE_TABLE_SHAPES, ClassDatabase, cell_text, emit_table, parse_shape

logger = logging.getLogger("CLI")


def _header():
    print(f"# {CONVENTION}")


def _progress(args) -> bool:
    return not args.no_progress and sys.stderr.isatty()


def _database() -> ClassDatabase:
    return ClassDatabase(cache_dir(ComponentSettings.CLI.get_value("CacheDirEnv")))


#region Commands
def cmd_level(args) -> int:
    circuit = load_circuit(args.circuit)
    verdict = level(circuit_to_monomial(circuit), cap=args.cap)
    _header()
    print(verdict)
    return EXIT_OK


def cmd_semiclifford(args) -> int:
    u = circuit_to_monomial(load_circuit(args.circuit))
    verdict = level(u, cap=args.cap)
    _header()
    print(verdict)
    print("semi-Clifford" if is_semi_clifford(u) else "not semi-Clifford")
    return EXIT_OK


def cmd_cycles(args) -> int:
    circuit = load_circuit(args.circuit)
    cs = to_cycle_structure(circuit_to_permutation(circuit))
    _header()
    if cs.cycles:
        for row in cs.to_matrix().to_lists():
            print(" ".join(str(b) for b in row))
    print(f"notation: {canonical_notation(cs)}")
    print(f"shape: {cs.shape}")
    print(f"order: {permutation_order(cs)}")
    print(f"wire mismatch: {wire_mismatch(circuit)}")
    return EXIT_OK


def cmd_classify_perms(args) -> int:
    report = count_ae_classes_full(args.qubits, progress=_progress(args))
    _database().save_census(report)
    _header()
    print(f"{len(report.classes)} classes, {report.in_ch_count} in CH")
    for r in report.classes:
        print(f"  {r.notation}  size={r.size}  {r.level}  semi-Clifford={r.semi_clifford}")
    if args.sample_members:
        offenders = check_class_membership(report.classes)
        print(f"sampled members agree: {not offenders}")
        if offenders:
            return EXIT_MISMATCH
    return EXIT_OK


def _shapes_for(n: int, text: str) -> List[tuple]:
    if text == "all":
        return [shape for _, shape in CYCLE_TABLE_SHAPES if shape and sum(shape) <= 1 << n]
    return [parse_shape(part) for part in text.split(";")]


def cmd_classify_cycles(args) -> int:
    n = args.qubits
    db = _database()
    shapes = _shapes_for(n, args.shape)
    cells = classify_cells([(n, s) for s in shapes], workers=args.threads, progress=_progress(args))
    _header()
    for s in shapes:
        records = cells[(n, s)]
        db.save_cell(n, s, records)
        print(f"n={n} {s}: {cell_text(records)}")

    if args.extend_to is None:
        return EXIT_OK
    if args.extend_to <= n:
        raise CliffHierError(f"--extend-to must exceed --qubits ({n})")
    if n < 2:
        raise CliffHierError("extension starts from at least 2 qubits")
    status = EXIT_OK
    for s in shapes:
        records = cells[(n, s)]
        for m in range(n, args.extend_to):
            if sum(s) > m + 2:
                logger.warning("shape %s has more than %d states; not extended past n=%d", s, m + 2, m)
                break
            report = extend_classification(records, progress=_progress(args))
            db.save_extension(report)
            records = report.records
            flag = "" if report.resolved else f"  ({len(report.unresolved_pairs)} unresolved pairs)"
            print(f"n={m + 1} {s}: {cell_text(records)}{flag}")
            if not report.resolved:
                status = EXIT_MISMATCH
    return status


def cmd_verify_4q(args) -> int:
    report = verify_4q_representatives(raise_on_failure=False)
    _header()
    for name, v, k, sc, p in zip(report.names, report.levels, report.expected, report.semi_clifford,
                                 report.profiles):
        print(f"{name}: {v} (expected Level {k}), semi-Clifford={sc}, degrees={dict(p.degree_spectrum)}")
    print(f"levels match: {report.levels_match}")
    print(f"profiles distinct: {report.profiles_distinct}")
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_sweep_ch3(args) -> int:
    space = full_space() if args.full_space else target_space()
    workers = resolve_workers(args.threads)
    report = algorithm1(space=space, use_filters=not args.no_filters, workers=workers, progress=_progress(args))
    out = report.to_dict()
    ok = report.consistent and not report.cross_check_mismatches
    if args.both:
        other = algorithm1(space=space, use_filters=args.no_filters, workers=workers, progress=_progress(args))
        out["other_mode_verdict"] = other.verdict
        ok = ok and other.verdict == report.verdict
    if args.output:
        json_util.dump(out, args.output)
    sys.stdout.write(json_util.dumps(out))
    if args.expect == "all-semi-clifford":
        ok = ok and report.verdict == ALL_SEMI_CLIFFORD
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_diag_order(args) -> int:
    kind = DiagKind(args.kind)
    order = diag_group_order(args.qubits, args.level, kind)
    _header()
    print(order)
    if args.closure:
        closed = len(generate_diag_group(DiagGroupSpec(args.qubits, args.level, kind)))
        print(f"closure: {closed}")
        if closed != order:
            return EXIT_MISMATCH
    return EXIT_OK


def cmd_table(args) -> int:
    fmt = args.format or ComponentSettings.CLI.get_value("DefaultFormat")
    sys.stdout.write(emit_table(args.which, fmt, _database()))
    return EXIT_OK
#endregion


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cliffhier",
                                     description="Clifford hierarchy levels and affine classes of permutation gates")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    parser.add_argument("--profile", default=None, help="settings profile (Default, Quick)")
    parser.add_argument("--threads", type=int, default=None, help="worker processes (0 = all cores)")
    parser.add_argument("--no-progress", action="store_true", help="hide progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("level", help="Clifford hierarchy level of a circuit")
    p.add_argument("circuit")
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(func=cmd_level)

    p = sub.add_parser("semiclifford", help="semi-Clifford test of a circuit")
    p.add_argument("circuit")
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(func=cmd_semiclifford)

    p = sub.add_parser("cycles", help="cycle structure of a circuit")
    p.add_argument("circuit")
    p.set_defaults(func=cmd_cycles)

    p = sub.add_parser("classify-perms", help="affine equivalence classes of all permutations")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--sample-members", action="store_true",
                   help="check CH membership on random members of each class")
    p.set_defaults(func=cmd_classify_perms)

    p = sub.add_parser("classify-cycles", help="affine classes of cycle structures of one shape")
    p.add_argument("--shape", required=True, help="e.g. 2,2 or 4,2;3,3 or all")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--extend-to", type=int, default=None)
    p.add_argument("--budget", type=int, default=None, help="alignment budget per pair when extending")
    p.set_defaults(func=cmd_classify_cycles)

    p = sub.add_parser("verify-4q", help="levels of the five four-qubit representatives")
    p.set_defaults(func=cmd_verify_4q)

    p = sub.add_parser("sweep-ch3", help="third-level sweep over diagonal classes")
    p.add_argument("--full-space", action="store_true", help="all 2**20 classes instead of 4096")
    p.add_argument("--no-filters", action="store_true")
    p.add_argument("--both", action="store_true", help="also run the other filter mode and compare")
    p.add_argument("--expect", choices=["all-semi-clifford"], default=None)
    p.add_argument("--output", default=None, help="also write the report to this file")
    p.set_defaults(func=cmd_sweep_ch3)

    p = sub.add_parser("diag-order", help="order of a diagonal group")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--kind", choices=[k.value for k in DiagKind], default=DiagKind.D.value)
    p.add_argument("--closure", action="store_true", help="also count by closure of the generators")
    p.set_defaults(func=cmd_diag_order)

    p = sub.add_parser("table", help="emit a class-count table from the database")
    p.add_argument("--which", type=int, choices=[2, 3], required=True)
    p.add_argument("--format", choices=["csv", "json", "md"], default=None)
    p.set_defaults(func=cmd_table)
    return parser


def _configure_logging(verbosity: int):
    level_ = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level_)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    _configure_logging(args.verbose)

    manager = SettingsManager.get_instance()
    if args.profile:
        manager.set_profile(args.profile)
    if args.threads is not None:
        manager.override("Workers", args.threads)
    if getattr(args, "budget", None) is not None:
        manager.override("AlignmentBudget", args.budget)

    try:
        return args.func(args)
    except CliffHierError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
