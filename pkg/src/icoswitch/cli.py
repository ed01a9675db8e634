"""Command-line front end.

Every subcommand builds a :class:`ReportDocument` and renders it as text,
JSON or CSV. JSON output uses sorted keys so identical invocations produce
byte-identical reports.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import verification
from .bounds import LoccBoundInput, bell_bound, bound_floor, locc_bound
from .bsa import decode, deterministic_confusion, iterate_switch, sample, target_support
from .gravity import verify_correspondence
from .linalg import TOL_STATE, fidelity
from .states import BellIndex, bell_basis, bell_label, bell_state, control_alias, control_label
from .switch import DENSE_MAX_D, apply_branchwise, canonical_config, decompose_control, switch_input

SCHEMA_VERSION = "1"
BRANCHWISE_MAX_D = 16

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


@dataclass
class ReportDocument:
    command: str
    parameters: dict[str, Any]
    results: Any
    passed: bool | None = None
    schema_version: str = SCHEMA_VERSION
    # rows for CSV and text rendering; not serialized
    rows: list[dict[str, Any]] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.rows:
            writer = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(self.rows)
        return buf.getvalue()


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _check_dim(d: int, cap: int) -> None:
    if d < 2:
        raise UsageError(f"dimension must be >= 2, got {d}")
    if d > cap:
        raise UsageError(f"dimension {d} exceeds the cap of {cap}; pass --max-dim-override to raise it")


def _relation(d: int, offset: int) -> str:
    return "j_B = j_A" if offset == 0 else f"j_B = (j_A + {offset}) mod {d}"


def _control_text(d: int, l: int) -> str:
    alias = control_alias(d, l)
    return control_label(d, l) + (f" ({alias})" if alias else "")


# --------------------------------------------------------------------------- table


def cmd_table(dim: int, cap: int = BRANCHWISE_MAX_D) -> ReportDocument:
    """Discrimination table: one row per input Bell state, derived by simulation."""
    _check_dim(dim, cap)
    d = dim
    cfg = canonical_config(d)
    basis = np.stack([b.amplitudes for b in bell_basis(d)])
    rows = []
    for i in range(d):
        for j in range(d):
            idx = BellIndex(d, i, j)
            dec = decompose_control(apply_branchwise(cfg, switch_input(d, bell_state(idx))))
            target = dec.projected_target()
            offsets = sorted({(b - a) % d for a, b in target_support(target)})
            out_idx = BellIndex.from_flat(d, int(np.argmax(np.abs(basis.conj() @ target.amplitudes))))
            offset = offsets[0]
            round_trip = decode(d, dec.dominant, 0, offset) == idx
            rows.append(
                {
                    "input": str(idx),
                    "input_state": bell_label(idx),
                    "control_outcome": dec.dominant,
                    "control_label": control_label(d, dec.dominant),
                    "control_alias": control_alias(d, dec.dominant) or "",
                    "relation": _relation(d, offset),
                    "offset": offset,
                    "output": str(out_idx),
                    "output_state": bell_label(out_idx),
                    "control_residual": dec.residual,
                    "round_trip": bool(round_trip and len(offsets) == 1),
                }
            )
    return ReportDocument(
        command="table",
        parameters={"dim": d},
        results={"rows": rows},
        passed=all(r["round_trip"] for r in rows),
        rows=rows,
    )


def _text_table(rep: ReportDocument) -> str:
    d = rep.parameters["dim"]
    lines = [f"Bell-state discrimination with the {d}-switch (control prepared in D_0)", ""]
    header = ("Control outcome", "(j_A, j_B) relation", "Output Bell state", "Input Bell state")
    body = [
        (_control_text(d, r["control_outcome"]), r["relation"], r["output_state"], r["input_state"])
        for r in rep.rows
    ]
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines.append(fmt.format(*header).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    prev = None
    for row, r in zip(body, rep.rows):
        if prev is not None and r["control_outcome"] != prev:
            lines.append("")
        prev = r["control_outcome"]
        lines.append(fmt.format(*row).rstrip())
    lines.append("")
    lines.append(f"round trip through decode: {'ok' if rep.passed else 'FAILED'}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- verify


def cmd_verify(dim_lo: int, dim_hi: int, tol: float = TOL_STATE, cap: int = DENSE_MAX_D) -> ReportDocument:
    if dim_lo > dim_hi:
        raise UsageError(f"empty dimension range {dim_lo}..{dim_hi}")
    _check_dim(dim_lo, cap)
    _check_dim(dim_hi, cap)
    dims = [verification.run_dimension(d, tol, dense_max_d=cap) for d in range(dim_lo, dim_hi + 1)]
    rows = [
        {"d": r["d"], "suite": name, "pass": s["pass"]}
        for r in dims
        for name, s in r["suites"].items()
    ]
    passed = all(r["pass"] for r in dims)
    return ReportDocument(
        command="verify",
        parameters={"dim_lo": dim_lo, "dim_hi": dim_hi, "tol": tol},
        results={
            "dimensions": dims,
            "suites_run": len(rows),
            "suites_failed": sum(not r["pass"] for r in rows),
        },
        passed=passed,
        rows=rows,
    )


def _text_verify(rep: ReportDocument) -> str:
    lines = []
    for r in rep.results["dimensions"]:
        status = "PASS" if r["pass"] else "FAIL"
        lines.append(f"d={r['d']}: {status}" + (f"  [{r['note']}]" if "note" in r else ""))
        for name, s in r["suites"].items():
            extra = f" ({s['skipped']})" if "skipped" in s else ""
            lines.append(f"    {name:<18} {'pass' if s['pass'] else 'FAIL'}{extra}")
    res = rep.results
    lines.append("")
    lines.append(f"{res['suites_run'] - res['suites_failed']}/{res['suites_run']} suites passed: "
                 + ("ALL PASS" if rep.passed else "FAILURES"))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- simulate


def _parse_bell(dim: int, i: int, j: int) -> BellIndex:
    try:
        return BellIndex(dim, i, j)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(dim: int, i: int, j: int, shots: int, seed: int,
                 cap: int = BRANCHWISE_MAX_D) -> ReportDocument:
    _check_dim(dim, cap)
    true = _parse_bell(dim, i, j)
    if shots < 1:
        raise UsageError(f"shots must be >= 1, got {shots}")
    if not 0 <= seed < 2**64:
        raise UsageError(f"seed must be a 64-bit unsigned integer, got {seed}")
    records = sample(dim, true, canonical_config(dim), shots, seed)
    decoded = Counter(str(r.decoded) for r in records)
    controls = Counter(r.control_outcome for r in records)
    outcomes = Counter((r.control_outcome, r.alice_outcome, r.bob_outcome) for r in records)
    correct = decoded.get(str(true), 0)
    accuracy = correct / shots
    rows = [
        {"control": l, "j_A": a, "j_B": b, "decoded": str(decode(dim, l, a, b)), "count": n}
        for (l, a, b), n in sorted(outcomes.items())
    ]
    return ReportDocument(
        command="simulate",
        parameters={"dim": dim, "i": i, "j": j, "shots": shots, "seed": seed},
        results={
            "accuracy": accuracy,
            "correct": correct,
            "decoded_histogram": dict(sorted(decoded.items())),
            "control_counts": {control_label(dim, l): n for l, n in sorted(controls.items())},
            "outcome_counts": rows,
        },
        passed=accuracy == 1.0,
        rows=rows,
    )


def _text_simulate(rep: ReportDocument) -> str:
    p = rep.parameters
    res = rep.results
    d = p["dim"]
    lines = [
        f"true state {bell_label(BellIndex(d, p['i'], p['j']))}, {p['shots']} shots, seed {p['seed']}",
        f"accuracy: {res['accuracy']:.6f} ({res['correct']}/{p['shots']})",
        "control outcomes: " + ", ".join(f"{k}: {v}" for k, v in res["control_counts"].items()),
        "decoded: " + ", ".join(f"{k}: {v}" for k, v in res["decoded_histogram"].items()),
        "",
        "control  j_A  j_B  decoded  count",
    ]
    for r in rep.rows:
        lines.append(f"{control_label(d, r['control']):<7}  {r['j_A']:>3}  {r['j_B']:>3}  {r['decoded']:<7}  {r['count']:>5}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- gravity


def cmd_gravity(dim: int, cap: int = BRANCHWISE_MAX_D) -> ReportDocument:
    _check_dim(dim, cap)
    rep = verify_correspondence(dim)
    rows = [
        {
            "branch": b.branch,
            "control_ket": b.control_ket,
            "configuration": b.label,
            "alice_signals": b.alice_signals,
            "bob_signals": b.bob_signals,
            "alice_operation": b.alice_factor,
            "bob_operation": b.bob_product,
            "alice_exp_raw": b.alice_exp_raw,
            "alice_exp_mod_d": b.alice_exp_mod_d,
            "bob_exp_raw": b.bob_exp_raw,
            "bob_exp_mod_d": b.bob_exp_mod_d,
            "matrix_match": b.matrix_match,
            "exponent_match": b.exponent_match,
        }
        for b in rep.branches
    ]
    return ReportDocument(
        command="gravity",
        parameters={"dim": dim},
        results={"branches": rows},
        passed=rep.passed,
        rows=rows,
    )


def _power(raw: int, reduced: int) -> str:
    return f"shift^{raw}" if raw == reduced else f"shift^{raw} = shift^{reduced}"


def _text_gravity(rep: ReportDocument) -> str:
    d = rep.parameters["dim"]
    lines = [f"Event-ordering construction of the {d}-switch", ""]
    for r in rep.rows:
        verdict = "match" if r["matrix_match"] and r["exponent_match"] else "MISMATCH"
        lines += [
            f"|{r['control_ket']}>_c  {r['configuration']}",
            f"    {r['alice_signals']}  ->  Alice applies {r['alice_operation']} = "
            + _power(r["alice_exp_raw"], r["alice_exp_mod_d"]),
            f"    {r['bob_signals']}  ->  Bob applies {r['bob_operation']} = "
            + _power(r["bob_exp_raw"], r["bob_exp_mod_d"]),
            f"    vs canonical (U_{r['branch'] + 1}, V_{r['branch'] + 1}): {verdict}",
        ]
    lines.append("")
    lines.append("all branches match" if rep.passed else "MISMATCHES FOUND")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- bound


def cmd_bound(d1: int, d2: int, schmidt: Sequence[float] | None = None, maximal: bool = False,
              cap: int = BRANCHWISE_MAX_D) -> ReportDocument:
    if maximal == (schmidt is not None):
        raise UsageError("give exactly one of --schmidt or --maximal")
    try:
        if maximal:
            if d1 != d2:
                raise UsageError("--maximal needs d1 == d2")
            inp = LoccBoundInput.maximal(d1)
        else:
            inp = LoccBoundInput(d1, d2, tuple(schmidt))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    value = locc_bound(inp)
    results: dict[str, Any] = {"bound": value, "floor": bound_floor(value), "schmidt": list(inp.schmidt)}
    passed = None
    if maximal:
        d = d1
        results["bell_bound"] = bell_bound(d)
        if d <= cap:
            distinguished = int(np.trace(deterministic_confusion(d, canonical_config(d)).counts))
            results["ico_distinguished"] = distinguished
            results["contrast"] = f"ICO protocol distinguishes {distinguished} states (d^2 = {d * d})"
            passed = distinguished == d * d
    row = {"d1": d1, "d2": d2, "bound": value, "floor": results["floor"],
           "ico_distinguished": results.get("ico_distinguished", "")}
    return ReportDocument(
        command="bound",
        parameters={"d1": d1, "d2": d2, "maximal": maximal, "schmidt": None if maximal else list(inp.schmidt)},
        results=results,
        passed=passed,
        rows=[row],
    )


def _text_bound(rep: ReportDocument) -> str:
    p, r = rep.parameters, rep.results
    lines = [
        f"LOCC bound for d1={p['d1']}, d2={p['d2']}: N <= {r['bound']:.12g} (floor {r['floor']})",
    ]
    if "contrast" in r:
        lines.append(r["contrast"])
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- iterate


def cmd_iterate(dim: int, i: int, j: int, rounds: int, tol: float = TOL_STATE,
                cap: int = BRANCHWISE_MAX_D) -> ReportDocument:
    _check_dim(dim, cap)
    true = _parse_bell(dim, i, j)
    if rounds < 1:
        raise UsageError(f"rounds must be >= 1, got {rounds}")
    res = iterate_switch(dim, true, canonical_config(dim), rounds)
    expected_ctrl = (dim - i) % dim
    expected = BellIndex(dim, i, (j + rounds) % dim)
    fid = fidelity(res.target, bell_state(expected))
    rows = [
        {
            "round": r + 1,
            "control_outcome": c.dominant,
            "control_label": control_label(dim, c.dominant),
            "probability": c.probabilities[c.dominant],
            "residual": c.residual,
        }
        for r, c in enumerate(res.controls)
    ]
    passed = fid >= 1 - tol and all(c.dominant == expected_ctrl for c in res.controls)
    return ReportDocument(
        command="iterate",
        parameters={"dim": dim, "i": i, "j": j, "rounds": rounds, "tol": tol},
        results={
            "rounds": rows,
            "expected_control": expected_ctrl,
            "expected_target": str(expected),
            "target_fidelity": fid,
            "target_amplitudes": [_complex_pair(z) for z in res.target.amplitudes],
        },
        passed=passed,
        rows=rows,
    )


def _text_iterate(rep: ReportDocument) -> str:
    p, r = rep.parameters, rep.results
    d = p["dim"]
    lines = [f"{p['rounds']} round(s) on {bell_label(BellIndex(d, p['i'], p['j']))}"]
    for row in rep.rows:
        lines.append(f"  round {row['round']}: control {_control_text(d, row['control_outcome'])}"
                     f"  (residual {row['residual']:.1e})")
    exp = BellIndex(d, *map(int, r["expected_target"].strip("()").split(",")))
    lines.append(f"final target vs {bell_label(exp)}: fidelity {r['target_fidelity']:.15f}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- entry point

_TEXT = {
    "table": _text_table,
    "verify": _text_verify,
    "simulate": _text_simulate,
    "gravity": _text_gravity,
    "bound": _text_bound,
    "iterate": _text_iterate,
}


def render(rep: ReportDocument, fmt: str) -> str:
    if fmt == "json":
        return rep.to_json()
    if fmt == "csv":
        return rep.to_csv()
    return _TEXT[rep.command](rep)


def _dim_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--max-dim-override", type=int, default=None, metavar="N",
                        help="raise the dimension cap to N (dense operators grow as d^6)")

    parser = argparse.ArgumentParser(prog="icoswitch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", parents=[common], help="discrimination table for one dimension")
    p.add_argument("--dim", type=int, required=True)

    p = sub.add_parser("verify", parents=[common], help="run every check suite over a dimension range")
    p.add_argument("--dim-range", type=_dim_range, default=(2, 10), metavar="LO..HI")
    p.add_argument("--dim", type=int, default=None, help="shorthand for --dim-range D..D")
    p.add_argument("--tol", type=float, default=TOL_STATE)

    p = sub.add_parser("simulate", parents=[common], help="seeded Born-rule simulation of the analyzer")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gravity", parents=[common], help="event-ordering correspondence ledger")
    p.add_argument("--dim", type=int, required=True)

    p = sub.add_parser("bound", parents=[common], help="LOCC discrimination upper bound")
    p.add_argument("--dim", type=int, default=None, help="shorthand for --d1 D --d2 D")
    p.add_argument("--d1", type=int, default=None)
    p.add_argument("--d2", type=int, default=None)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--schmidt", type=_float_list, help="comma-separated Schmidt coefficients")
    grp.add_argument("--maximal", action="store_true", help="maximally entangled spectrum")

    p = sub.add_parser("iterate", parents=[common], help="repeat the switch on one Bell pair")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--rounds", type=int, default=2)
    p.add_argument("--tol", type=float, default=TOL_STATE)
    return parser


def run(args: argparse.Namespace) -> ReportDocument:
    override = args.max_dim_override
    if override is not None:
        print(f"warning: dimension cap raised to {override}; dense verification needs O(d^6) memory",
              file=sys.stderr)
    branch_cap = BRANCHWISE_MAX_D if override is None else override
    dense_cap = DENSE_MAX_D if override is None else override

    if args.command == "table":
        return cmd_table(args.dim, cap=branch_cap)
    if args.command == "verify":
        lo, hi = (args.dim, args.dim) if args.dim is not None else args.dim_range
        return cmd_verify(lo, hi, args.tol, cap=dense_cap)
    if args.command == "simulate":
        return cmd_simulate(args.dim, args.i, args.j, args.shots, args.seed, cap=branch_cap)
    if args.command == "gravity":
        return cmd_gravity(args.dim, cap=branch_cap)
    if args.command == "bound":
        d1 = args.d1 if args.d1 is not None else args.dim
        d2 = args.d2 if args.d2 is not None else args.dim
        if d1 is None or d2 is None:
            raise UsageError("give --dim or both --d1 and --d2")
        return cmd_bound(d1, d2, schmidt=args.schmidt, maximal=args.maximal, cap=branch_cap)
    if args.command == "iterate":
        return cmd_iterate(args.dim, args.i, args.j, args.rounds, args.tol, cap=branch_cap)
    raise UsageError(f"unknown command {args.command}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep = run(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render(rep, args.format))
    if args.command == "verify" and not rep.passed:
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
