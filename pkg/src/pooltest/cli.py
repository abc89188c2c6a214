"""Command-line frontend.

Commands: ``design``, ``table``, ``generate``, ``answer``, ``decode``,
``verify``, ``simulate``. Reporting commands take ``--format csv|json``;
CSV is the default for pipelines and starts with the schema comment
``# pooltest-csv v1``.

File formats:

* matrix — GTM1 text (see ``pooltest.core``);
* answers — a single line of m characters, each '0' or '1';
* defectives — whitespace-separated 1-based item indices.

Exit codes: 0 success, 1 domain or parse error, 2 work budget exceeded.
``POOLTEST_SEED`` provides the default master seed where ``--seed`` is
omitted. All commands are deterministic given their flags; timing fields
are reported only with ``--timings`` and are excluded from that guarantee.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import design as design_mod
from .core import (
    BudgetExceededError,
    InputError,
    ParseError,
    TestMatrix,
    answer_vector,
    dumps_gtm1,
    read_gtm1,
    validate_items,
    write_gtm1,
)
from .decode import (
    AMBIGUOUS,
    DECODED,
    decode_disjunct,
    decode_semidisjunct,
    decode_separable_bruteforce,
)
from .randgen import gen_rid, gen_rrsd
from .simulate import TrialConfig, run_trials
from .verify import is_semidisjunct, non_disjunct_items, separability_witness

CSV_SCHEMA_COMMENT = "# pooltest-csv v1"

_PROPERTY_ALIASES = {
    "disjunct": "disjunct",
    "separable": "separable",
    "semi": "semidisjunct",
    "semidisjunct": "semidisjunct",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _normalize_property(value: str) -> str:
    prop = _PROPERTY_ALIASES.get(value.lower())
    if prop is None:
        raise InputError(f"property must be one of {sorted(_PROPERTY_ALIASES)}, got {value!r}")
    return prop


def _default_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("POOLTEST_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"POOLTEST_SEED must be an integer, got {env!r}") from None


def _emit_csv(columns: list[str], rows: list[list[str]], out) -> None:
    print(CSV_SCHEMA_COMMENT, file=out)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)


def _emit(args, columns: list[str], rows: list[list[str]], records: list[dict], out) -> None:
    if args.format == "json":
        payload = records[0] if len(records) == 1 else records
        print(json.dumps(payload, indent=2), file=out)
    else:
        _emit_csv(columns, rows, out)


def _read_matrix(path: str) -> TestMatrix:
    return read_gtm1(path)


def _read_items(args, n: int) -> tuple[int, ...]:
    if getattr(args, "items", None) is not None:
        parsed = []
        for tok in args.items.split():
            try:
                parsed.append(int(tok))
            except ValueError:
                raise InputError(f"invalid item index {tok!r} in --items") from None
        return validate_items(parsed, n)
    if getattr(args, "defectives", None) is None:
        raise InputError("one of --defectives or --items is required")
    parsed = []
    text = Path(args.defectives).read_text(encoding="ascii")
    for lineno, line in enumerate(text.split("\n"), start=1):
        for tok in line.split():
            try:
                parsed.append(int(tok))
            except ValueError:
                raise ParseError(
                    f"invalid item index {tok!r} in {args.defectives}", line=lineno
                ) from None
    return validate_items(parsed, n)


def format_answer_line(answers) -> str:
    return "".join("1" if int(a) else "0" for a in answers)


def parse_answer_file(text: str, expected_m: int) -> np.ndarray:
    """Parse a one-line answer file; diagnostics carry line and column."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != 1:
        raise ParseError(
            f"answer file must hold exactly one line, found {len(lines)}",
            line=max(2, len(lines)),
        )
    raw = lines[0]
    if len(raw) != expected_m:
        raise ParseError(
            f"expected {expected_m} answer characters, got {len(raw)}", line=1,
            column=min(len(raw) + 1, expected_m + 1),
        )
    for col, ch in enumerate(raw, start=1):
        if ch not in "01":
            raise ParseError(f"invalid answer character {ch!r}", line=1, column=col)
    return np.frombuffer(raw.encode("ascii"), dtype=np.uint8) - ord("0")


def _write_text(path: str | None, text: str, out) -> None:
    if path is None:
        out.write(text)
    else:
        Path(path).write_text(text, encoding="ascii")


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def _cmd_design(args, out) -> int:
    prop = _normalize_property(args.property)
    spec = design_mod.make_design(args.n, args.d, args.delta, prop, args.model)
    if prop == "disjunct":
        coefficient = design_mod.disjunct_coefficient(spec.d)
    elif prop == "separable":
        coefficient = design_mod.disjunct_coefficient(spec.d - 1)
    else:
        coefficient = design_mod.semidisjunct_coefficient(spec.d)
    zero = f"{spec.zero_prob:.4f}" if spec.zero_prob is not None else ""
    one = f"{1.0 - spec.zero_prob:.4f}" if spec.zero_prob is not None else ""
    weight = str(spec.row_weight) if spec.row_weight is not None else ""
    columns = ["n", "d", "delta", "property", "model", "m", "zero_prob", "one_prob",
               "row_weight", "log_n_coefficient"]
    row = [str(spec.n), str(spec.d), f"{spec.delta:g}", prop, spec.model, str(spec.m),
           zero, one, weight, f"{coefficient:.4f}"]
    record = {
        "n": spec.n, "d": spec.d, "delta": spec.delta, "property": prop,
        "model": spec.model, "m": spec.m, "zero_prob": spec.zero_prob,
        "one_prob": None if spec.zero_prob is None else 1.0 - spec.zero_prob,
        "row_weight": spec.row_weight, "log_n_coefficient": coefficient,
    }
    _emit(args, columns, [row], [record], out)
    return 0


def _cmd_table(args, out) -> int:
    rows = design_mod.coefficient_table(args.d_max)
    columns = ["d", "disjunct", "separable", "semidisjunct"]
    csv_rows = [
        [str(r.d), f"{r.disjunct:.4f}", f"{r.separable:.4f}", f"{r.semidisjunct:.4f}"]
        for r in rows
    ]
    records = [
        {"d": r.d, "disjunct": r.disjunct, "separable": r.separable,
         "semidisjunct": r.semidisjunct}
        for r in rows
    ]
    if args.format == "json":
        print(json.dumps(records, indent=2), file=out)
    else:
        _emit_csv(columns, csv_rows, out)
    return 0


def _cmd_generate(args, out) -> int:
    seed = _default_seed(args.seed)
    if args.m is not None:
        if args.model == "rid":
            if args.zero_prob is None:
                raise InputError("--zero-prob is required with --m for the rid model")
            matrix = gen_rid(args.m, args.n, args.zero_prob, seed)
        else:
            if args.row_weight is None:
                raise InputError("--row-weight is required with --m for the rrsd model")
            matrix = gen_rrsd(args.m, args.n, args.row_weight, seed)
    else:
        if args.d is None or args.delta is None or args.property is None:
            raise InputError("either --m or all of --d/--delta/--property are required")
        prop = _normalize_property(args.property)
        spec = design_mod.make_design(args.n, args.d, args.delta, prop, args.model)
        if spec.model == "rid":
            matrix = gen_rid(spec.m, spec.n, spec.zero_prob, seed)
        else:
            matrix = gen_rrsd(spec.m, spec.n, spec.row_weight, seed)
    if args.out is None:
        out.write(dumps_gtm1(matrix))
    else:
        write_gtm1(matrix, args.out)
    return 0


def _cmd_answer(args, out) -> int:
    matrix = _read_matrix(args.matrix)
    items = _read_items(args, matrix.n)
    line = format_answer_line(answer_vector(matrix, items)) + "\n"
    _write_text(args.out, line, out)
    return 0


def _cmd_decode(args, out) -> int:
    matrix = _read_matrix(args.matrix)
    answers = parse_answer_file(Path(args.answers).read_text(encoding="ascii"), matrix.m)
    if args.decoder == "disjunct":
        outcome = decode_disjunct(matrix, answers)
    elif args.decoder == "semi":
        if args.d is None:
            raise InputError("--d is required for the semi decoder")
        outcome = decode_semidisjunct(matrix, answers, args.d, args.max_subset_tests)
    else:
        if args.d is None:
            raise InputError("--d is required for the brute decoder")
        outcome = decode_separable_bruteforce(matrix, answers, args.d)
    if outcome.status == DECODED:
        _write_text(args.out, " ".join(str(i) for i in outcome.items) + "\n", out)
        return 0
    if outcome.status == AMBIGUOUS:
        print(f"error: ambiguous answers: {outcome.consistent_count} consistent sets",
              file=sys.stderr)
        return 1
    print("error: no candidate set is consistent with the answers", file=sys.stderr)
    return 1


def _cmd_verify(args, out) -> int:
    matrix = _read_matrix(args.matrix)
    items = _read_items(args, matrix.n)
    prop = _normalize_property(args.property)
    threshold = ""
    if prop == "disjunct":
        unwitnessed = non_disjunct_items(matrix, items)
        holds = len(unwitnessed) == 0
        witness: tuple[int, ...] | None = unwitnessed if not holds else None
    elif prop == "separable":
        if args.d is None:
            raise InputError("--d is required for the separable property")
        unwitnessed = non_disjunct_items(matrix, items)
        witness = separability_witness(matrix, items, args.d)
        holds = witness is None
    else:
        if args.d is None:
            raise InputError("--d is required for the semidisjunct property")
        report = is_semidisjunct(matrix, items, args.d)
        holds, witness, unwitnessed = report.holds, report.witness, report.non_disjunct_items
        threshold = f"{report.threshold:.4f}"
    columns = ["property", "holds", "witness", "non_disjunct_count", "non_disjunct_items",
               "threshold"]
    row = [prop, str(holds).lower(), " ".join(map(str, witness or ())),
           str(len(unwitnessed)), " ".join(map(str, unwitnessed)), threshold]
    record = {
        "property": prop, "holds": holds,
        "witness": list(witness) if witness else None,
        "non_disjunct_count": len(unwitnessed),
        "non_disjunct_items": list(unwitnessed),
        "threshold": float(threshold) if threshold else None,
    }
    _emit(args, columns, [row], [record], out)
    return 0


def _cmd_simulate(args, out) -> int:
    prop = _normalize_property(args.property)
    spec = design_mod.make_design(args.n, args.d, args.delta, prop, args.model)
    decoder = args.decoder
    if decoder is None:
        decoder = {"disjunct": "disjunct", "separable": "bruteforce",
                   "semidisjunct": "semidisjunct"}[prop]
    defect_mode = {"exactly": "exactly_d", "atmost": "at_most_d"}[args.defect_mode]
    cfg = TrialConfig(
        design=spec,
        trials=args.trials,
        master_seed=_default_seed(args.seed),
        decoder=decoder,
        defect_mode=defect_mode,
    )
    report = run_trials(cfg)
    param = f"{spec.zero_prob:.4f}" if spec.model == "rid" else str(spec.row_weight)
    columns = ["n", "d", "delta", "property", "model", "m", "param", "decoder",
               "defect_mode", "trials", "successes", "failures", "refusals",
               "success_rate", "wilson_low", "wilson_high", "mean_residual",
               "mean_non_disjunct"]
    row = [str(spec.n), str(spec.d), f"{spec.delta:g}", prop, spec.model, str(spec.m),
           param, decoder, defect_mode, str(report.trials), str(report.successes),
           str(report.failures), str(report.refusals), f"{report.success_rate:.6f}",
           f"{report.wilson_low:.6f}", f"{report.wilson_high:.6f}",
           "" if report.mean_residual is None else f"{report.mean_residual:.4f}",
           "" if report.mean_non_disjunct is None else f"{report.mean_non_disjunct:.4f}"]
    record = {
        "n": spec.n, "d": spec.d, "delta": spec.delta, "property": prop,
        "model": spec.model, "m": spec.m,
        "param": spec.zero_prob if spec.model == "rid" else spec.row_weight,
        "decoder": decoder, "defect_mode": defect_mode, "trials": report.trials,
        "successes": report.successes, "failures": report.failures,
        "refusals": report.refusals, "success_rate": report.success_rate,
        "wilson_low": report.wilson_low, "wilson_high": report.wilson_high,
        "mean_residual": report.mean_residual,
        "mean_non_disjunct": report.mean_non_disjunct,
    }
    if args.timings:
        columns += ["mean_seconds", "max_seconds"]
        row += [f"{report.mean_seconds:.6f}", f"{report.max_seconds:.6f}"]
        record["mean_seconds"] = report.mean_seconds
        record["max_seconds"] = report.max_seconds
    _emit(args, columns, [row], [record], out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pooltest", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("design", help="compute test count and cell parameters")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--property", required=True)
    p.add_argument("--model", choices=("rid", "rrsd"), default="rid")
    add_format(p)
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("table", help="per-ln-n coefficient table for d = 2..K")
    p.add_argument("--d-max", type=int, required=True)
    add_format(p)
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("generate", help="write a seeded random matrix as GTM1")
    p.add_argument("--model", choices=("rid", "rrsd"), default="rid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--zero-prob", type=float)
    p.add_argument("--row-weight", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--property")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("answer", help="answer bits of a matrix for a defective set")
    p.add_argument("--matrix", required=True)
    p.add_argument("--defectives")
    p.add_argument("--items")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_answer)

    p = sub.add_parser("decode", help="recover the defective set from answers")
    p.add_argument("--matrix", required=True)
    p.add_argument("--answers", required=True)
    p.add_argument("--decoder", choices=("disjunct", "semi", "brute"), default="semi")
    p.add_argument("--d", type=int)
    p.add_argument("--max-subset-tests", type=int, default=10**8)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("verify", help="check a matrix property for a defective set")
    p.add_argument("--matrix", required=True)
    p.add_argument("--defectives")
    p.add_argument("--items")
    p.add_argument("--property", required=True)
    p.add_argument("--d", type=int)
    add_format(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("simulate", help="seeded Monte Carlo decode-success report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--property", required=True)
    p.add_argument("--model", choices=("rid", "rrsd"), default="rid")
    p.add_argument("--decoder", choices=("disjunct", "semidisjunct", "bruteforce"))
    p.add_argument("--defect-mode", choices=("exactly", "atmost"), default="exactly")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--timings", action="store_true")
    add_format(p)
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, sys.stdout)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
