"""Command-line interface: ``flowbch {bch,flow,verify,sweep}``.

Exit codes: 0 success, 1 oracle mismatch or failed verification, 2 usage
error, 3 numeric-domain error (branch, overflow, divergence), 4 I/O error.
Coefficient lists follow each algebra's basis order; a value that starts
with ``-`` must be attached with ``=``, e.g. ``--b=-1,2,0``.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from .algebra import BASIS_LABELS, QCA, QSA, SU2C, AlgebraElement, AlgebraId, dimension
from .bch import bch
from .errors import NumericDomainError
from .flows import exact_flow, rk4_flow, state_kind
from .oracle import bch_matrix_oracle, generator_extraction_oracle, relative_error
from .splitting import (
    PERMUTATIONS,
    default_tau_grid,
    distance_sweep,
    minimal_distance_summary,
    write_sweep_csv,
)
from .verify import SUITES, VerifyConfig, all_passed, format_csv, format_json, format_plain, run

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# parsing and formatting


def parse_scalar(text: str, complex_ok: bool = False):
    text = text.strip()
    try:
        if complex_ok and ":" in text:
            re_part, im_part = text.split(":")
            return complex(float(re_part), float(im_part))
        value = float(text)
    except ValueError:
        raise UsageError(f"cannot parse number {text!r}") from None
    return complex(value) if complex_ok else value


def parse_list(text: str, expected: int | None = None, complex_ok: bool = False, what: str = "list"):
    values = [parse_scalar(part, complex_ok) for part in text.split(",")]
    if expected is not None and len(values) != expected:
        raise UsageError(f"{what} expects {expected} comma-separated values, got {len(values)}")
    return values


def parse_element(algebra: AlgebraId, text: str, what: str) -> AlgebraElement:
    values = parse_list(text, dimension(algebra), complex_ok=algebra is SU2C, what=what)
    try:
        return AlgebraElement(algebra, np.array(values))
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from None


def format_number(x) -> str:
    """Shortest round-trip decimal; integral values lose ``.0`` and ``-0`` prints as ``0``."""
    if isinstance(x, complex):
        return f"{format_number(x.real)}:{format_number(x.imag)}"
    x = float(x)
    if x == 0:
        return "0"
    text = repr(x)
    return text[:-2] if text.endswith(".0") else text


def _values(array) -> list:
    return [complex(v) if np.iscomplexobj(array) else float(v) for v in array]


def _record_values(array) -> list:
    if np.iscomplexobj(array):
        return [[float(v.real), float(v.imag)] for v in array]
    return [float(v) for v in array]


def render_vector(values, labels: Sequence[str], fmt: str, extra: dict | None = None) -> str:
    values = _values(values)
    if fmt == "json":
        payload = dict(extra or {})
        payload["coeffs"] = _record_values(np.array(values))
        return json.dumps(payload) + "\n"
    if fmt == "csv":
        return ",".join(labels) + "\n" + ",".join(format_number(v) for v in values) + "\n"
    return ",".join(format_number(v) for v in values) + "\n"


# ---------------------------------------------------------------------------
# commands


def _algebra(args) -> AlgebraId:
    try:
        return AlgebraId.parse(args.algebra)
    except ValueError:
        choices = ", ".join(a.value for a in AlgebraId)
        raise UsageError(f"unknown algebra {args.algebra!r}; expected one of {choices}") from None


def cmd_bch(args, out) -> int:
    algebra = _algebra(args)
    A = parse_element(algebra, args.a, "--a")
    B = parse_element(algebra, args.b, "--b")
    Z = bch(A, B)
    labels = BASIS_LABELS[algebra]
    if not args.check_oracle:
        out.write(render_vector(Z.coeffs, labels, args.format, {"algebra": algebra.value}))
        return EXIT_OK

    oracle = generator_extraction_oracle if algebra is QCA else bch_matrix_oracle
    R = oracle(A, B)
    deviation = relative_error(Z, R)
    ok = deviation <= args.tolerance
    if args.format == "json":
        payload = {
            "algebra": algebra.value,
            "coeffs": _record_values(Z.coeffs),
            "oracle": _record_values(R.coeffs),
            "max_relative_deviation": deviation,
            "within_tolerance": ok,
        }
        out.write(json.dumps(payload) + "\n")
    elif args.format == "csv":
        out.write("source," + ",".join(labels) + "\n")
        out.write("closed_form," + ",".join(format_number(v) for v in _values(Z.coeffs)) + "\n")
        out.write("oracle," + ",".join(format_number(v) for v in _values(R.coeffs)) + "\n")
        out.write(f"# max_relative_deviation={deviation:.17g}\n")
    else:
        out.write(",".join(format_number(v) for v in _values(Z.coeffs)) + "\n")
        out.write("oracle: " + ",".join(format_number(v) for v in _values(R.coeffs)) + "\n")
        out.write(f"max relative deviation: {deviation:.3e} ({'ok' if ok else 'MISMATCH'})\n")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_flow(args, out) -> int:
    algebra = _algebra(args)
    H = parse_element(algebra, args.h, "--h")
    kind = state_kind(algebra)
    n_state = 2 if algebra in (QSA, SU2C) else 3
    x0 = kind(*parse_list(args.x0, n_state, complex_ok=algebra is SU2C, what="--x0"))
    if args.method == "exact":
        x = exact_flow(H, x0, args.t)
    else:
        if args.steps < 1:
            raise UsageError("--steps must be >= 1")
        x = rk4_flow(H, x0, args.t, args.steps)
    labels = ("u", "v") if algebra is SU2C else ("q", "p", "s")[:n_state]
    out.write(render_vector(x.to_array(), labels, args.format, {"algebra": algebra.value}))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    try:
        config = VerifyConfig(seed=args.seed, trials=args.trials, tolerance=args.tolerance)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    reports = run(args.suite, config)
    render = {"plain": format_plain, "json": format_json, "csv": format_csv}[args.format]
    out.write(render(reports))
    return EXIT_OK if all_passed(reports) else EXIT_MISMATCH


def cmd_sweep(args, out) -> int:
    gammas = parse_list(args.gammas, what="--gammas")
    perms = [p.strip().upper() for p in args.perms.split(",")]
    unknown = [p for p in perms if p not in PERMUTATIONS]
    if unknown:
        raise UsageError(f"unknown permutations {unknown}; expected a subset of {PERMUTATIONS}")
    try:
        taus = default_tau_grid(args.n_points, args.tau_min, args.tau_max)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    records = distance_sweep(gammas, taus, perms, order=args.order)
    if args.out == "-":
        write_sweep_csv(records, out)
        summary_stream = sys.stderr
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            write_sweep_csv(records, handle)
        summary_stream = out
    for gamma, (perm, share) in minimal_distance_summary(records).items():
        summary_stream.write(
            f"gamma={format_number(gamma)}: minimal distance {perm} ({100 * share:.1f}% of tau points)\n"
        )
    failed = sum(r.status != "ok" for r in records)
    if failed:
        summary_stream.write(f"{failed} rows outside the convergence region (status column)\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    common.add_argument("--tolerance", type=float, default=1e-9, help="oracle tolerance (default 1e-9)")
    common.add_argument("--trials", type=int, default=1000, help="randomized trials (default 1000)")
    common.add_argument("--format", choices=("json", "csv", "plain"), default="plain")

    parser = _Parser(prog="flowbch", description="Closed-form BCH maps, contact flows and splitting analysis.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    algebras = ", ".join(a.value for a in AlgebraId)

    p = sub.add_parser("bch", parents=[common], help="evaluate Z(A, B) = log(e^A e^B)")
    p.add_argument("--algebra", required=True, help=f"one of {algebras}")
    p.add_argument("--a", required=True, help="coefficients of A in basis order")
    p.add_argument("--b", required=True, help="coefficients of B in basis order")
    p.add_argument("--check-oracle", action="store_true", help="compare against an independent oracle")
    p.set_defaults(handler=cmd_bch)

    p = sub.add_parser("flow", parents=[common], help="flow a state along a Hamiltonian")
    p.add_argument("--algebra", required=True, help=f"one of {algebras}")
    p.add_argument("--h", required=True, help="Hamiltonian coefficients in basis order")
    p.add_argument("--x0", required=True, help="initial state q,p,s (q,p for qsa; u,v as re:im for su2c)")
    p.add_argument("--t", type=float, required=True, help="flow time")
    p.add_argument("--method", choices=("exact", "rk4"), default="exact")
    p.add_argument("--steps", type=int, default=1000, help="RK4 steps (default 1000)")
    p.set_defaults(handler=cmd_flow)

    p = sub.add_parser("verify", parents=[common], help="run property suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="modified-Hamiltonian distance sweep (CSV)")
    p.add_argument("--gammas", default="0.5,2,4")
    p.add_argument("--tau-min", type=float, default=1e-2)
    p.add_argument("--tau-max", type=float, default=1.0)
    p.add_argument("--n-points", type=int, default=200)
    p.add_argument("--perms", default=",".join(PERMUTATIONS))
    p.add_argument("--order", type=int, choices=(1, 2), default=1)
    p.add_argument("--out", default="sweep.csv", help="output CSV path, '-' for stdout")
    p.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args, out)
    except UsageError as exc:
        sys.stderr.write(f"flowbch {args.command}: usage error: {exc}\n")
        return EXIT_USAGE
    except NumericDomainError as exc:
        sys.stderr.write(f"flowbch {args.command}: {exc}\n")
        return EXIT_DOMAIN
    except OSError as exc:
        sys.stderr.write(f"flowbch {args.command}: I/O error: {exc}\n")
        return EXIT_IO


def run_main() -> None:
    raise SystemExit(main())

