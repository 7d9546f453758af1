"""Command-line front end: compute norms, evaluate bounds, verify, sweep.

Exit codes: 0 success, 1 verification failures, 2 malformed input or I/O
error, 3 flag-range violation or inapplicable theorem.  Scalar output is
printed with 9 significant digits; JSON payloads carry full doubles.
All output is a pure function of the input files and flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds as bnd
from .blocks import SymbolFunctionPair, assemble, block_from_json, build_R_diag, build_R_est6, build_R_est7, build_S
from .errors import AlphaNormError, MatrixFormatError, ParameterError, ShapeError
from .harness import SUITES, default_specs, run_suite
from .linalg import matrix_from_json, matrix_to_json
from .norms import alpha_norm, check_alpha, numerical_radius, operator_norm, spectral_radius

_QUANTITIES = ("opnorm", "specrad", "numrad", "alphanorm")
_THEOREMS = ("est1", "est6", "est7", "est8", "est9", "cor_w", "cor_opnorm")
_SWEEPABLE = ("est6", "est7", "est8", "est9")


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _dump_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2)


def _load_json_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise MatrixFormatError(f"cannot read JSON from {path}: {exc}") from exc


def _write_text(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def parse_grid(spec: str) -> list[float]:
    """Grid syntax: 'start:stop:step' (inclusive of both ends when step
    divides the range) or a comma list of values."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ParameterError(f"grid must be start:stop:step, got {spec!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError as exc:
            raise ParameterError(f"non-numeric grid component in {spec!r}") from exc
        if step <= 0 or not np.isfinite(step) or stop < start:
            raise ParameterError(f"grid requires stop >= start and step > 0, got {spec!r}")
        count = int(np.floor((stop - start) / step + 1e-9))
        return [start + k * step for k in range(count + 1)]
    try:
        return [float(p) for p in spec.split(",") if p.strip() != ""]
    except ValueError as exc:
        raise ParameterError(f"non-numeric grid value in {spec!r}") from exc


def _validate_flags(args) -> None:
    """Range checks run before any file is read or matrix built."""
    if getattr(args, "alpha", None) is not None:
        check_alpha(args.alpha)
    if getattr(args, "p", None) is not None and args.p < 1.0:
        raise ParameterError(f"p must be >= 1, got {args.p}")
    if getattr(args, "s", None) is not None and not 0.0 <= args.s <= 1.0:
        raise ParameterError(f"s must lie in [0, 1], got {args.s}")
    if getattr(args, "trials", None) is not None and args.trials < 1:
        raise ParameterError(f"trials must be >= 1, got {args.trials}")
    if getattr(args, "tol", None) is not None and args.tol <= 0.0:
        raise ParameterError(f"tol must be positive, got {args.tol}")
    if getattr(args, "width", None) is not None and args.width <= 0.0:
        raise ParameterError(f"width must be positive, got {args.width}")


def _cmd_compute(args) -> int:
    _validate_flags(args)
    m = matrix_from_json(_load_json_file(args.input))
    if args.quantity == "opnorm":
        print(_fmt(operator_norm(m)))
    elif args.quantity == "specrad":
        print(_fmt(spectral_radius(m)))
    elif args.quantity == "numrad":
        print(_fmt(numerical_radius(m, args.tol if args.tol else 1e-8)))
    else:
        if args.alpha is None:
            raise ParameterError("alphanorm requires --alpha")
        res = alpha_norm(m, args.alpha, args.width)
        print(_fmt(res.value))
        detail = {
            "value": res.value,
            "lower": res.lower,
            "upper": res.upper,
            "iterations": res.iterations,
            "witness": matrix_to_json(res.witness.reshape(-1, 1)),
        }
        print(_dump_json(detail))
    return 0


def _pair_for(args) -> SymbolFunctionPair:
    return SymbolFunctionPair.power(0.5 if args.s is None else args.s)


def _minimized_report(t, theorem: str, fg, p: float, strict: bool) -> bnd.BoundReport:
    """Minimize the bound family over alpha (convex combined-norm objective)."""
    s_mat = build_S(t)
    if theorem == "est6":
        r_mat = build_R_est6(t)
    elif theorem == "est7":
        r_mat = build_R_est7(t, fg, strict=strict)
    else:
        r_mat = build_R_diag(t, fg, strict=strict)
    alpha_star, sq = bnd.minimize_over_alpha(lambda a: bnd.combined_norm(r_mat, s_mat, a, p))
    value = float(sq ** (1.0 / (2.0 * p)))
    reference = alpha_norm(assemble(t), alpha_star).value
    return bnd.BoundReport(
        theorem, value, alpha_star, reference,
        value / reference if reference > 0 else None,
        p=p if theorem == "est8" else None,
        s=fg.s if theorem in ("est7", "est8", "est9") else None,
    )


def _cmd_bound(args) -> int:
    _validate_flags(args)
    if args.theorem in ("est6", "est7", "est8", "est9", "est1") and (
        args.alpha is None and not args.minimize
    ):
        raise ParameterError(f"theorem {args.theorem} requires --alpha or --minimize")
    t = block_from_json(_load_json_file(args.input))

    fg = _pair_for(args)
    p = 1.0 if args.p is None else args.p
    if args.theorem == "est1":
        if args.minimize:
            raise ParameterError("est1 reports fixed-alpha bounds; --minimize is inapplicable")
        if t.n != 2:
            raise ParameterError("est1 requires a 2 x 2 block matrix")
        if np.any(t.block(0, 1)) or np.any(t.block(1, 0)):
            raise ParameterError("est1 requires zero off-diagonal blocks")
        lower, u1, u2, u3 = bnd.diag_block_bounds(t.block(0, 0), t.block(1, 1), args.alpha)
        payload = {
            "theorem": "est1",
            "alpha": args.alpha,
            "lower": lower,
            "upper_i": u1,
            "upper_ii": u2,
            "upper_iii": u3,
            "reference": alpha_norm(assemble(t), args.alpha).value,
        }
    elif args.theorem == "cor_w":
        rep = bnd.corollary_w_bound(t, args.builder, None if args.builder == "est6" else fg,
                                    strict=args.strict)
        payload = rep.to_json()
    elif args.theorem == "cor_opnorm":
        payload = bnd.corollary_opnorm_bound(t).to_json()
    elif args.minimize:
        payload = _minimized_report(t, args.theorem, fg, p, args.strict).to_json()
    else:
        if args.theorem == "est6":
            rep = bnd.bound_est6(t, args.alpha)
        elif args.theorem == "est7":
            rep = bnd.bound_est7(t, args.alpha, fg, strict=args.strict)
        elif args.theorem == "est8":
            rep = bnd.bound_est8(t, args.alpha, fg, p, strict=args.strict)
        else:
            rep = bnd.bound_est9(t, args.alpha, fg, strict=args.strict)
        payload = rep.to_json()

    text = _dump_json(payload)
    print(text)
    if args.out:
        _write_text(args.out, text + "\n")
    return 0


def _cmd_verify(args) -> int:
    _validate_flags(args)
    if args.suite not in SUITES:
        raise ParameterError(f"unknown suite {args.suite!r}")
    specs = default_specs(args.seed, args.trials)
    report = run_suite(specs, SUITES[args.suite])
    summary = report.summary()
    print(f"suite={args.suite} checks={summary['total']} "
          f"passed={summary['passed']} failed={summary['failed']}")
    if args.out:
        _write_text(args.out, report.to_json_str())
    if args.csv is not None:
        csv_path = args.csv
        if csv_path == "":
            if not args.out:
                raise ParameterError("--csv without a path requires --out to derive one")
            csv_path = str(Path(args.out).with_suffix(".csv"))
        _write_text(csv_path, report.to_csv_str())
    return 0 if report.failed == 0 else 1


def _sweep_rows(t, theorem, alphas, ps, ss):
    s_mat = build_S(t)
    r_cache: dict[float | None, np.ndarray] = {}
    ref_cache: dict[float, float] = {}

    def r_for(s):
        if s not in r_cache:
            if theorem == "est6":
                r_cache[s] = build_R_est6(t)
            elif theorem == "est7":
                r_cache[s] = build_R_est7(t, SymbolFunctionPair.power(s))
            else:
                r_cache[s] = build_R_diag(t, SymbolFunctionPair.power(s))
        return r_cache[s]

    def ref_for(a):
        if a not in ref_cache:
            ref_cache[a] = alpha_norm(assemble(t), a).value
        return ref_cache[a]

    rows = []
    for a in alphas:
        for p in ps:
            for s in ss:
                value = float(bnd.combined_norm(r_for(s), s_mat, a, p) ** (1.0 / (2.0 * p)))
                ref = ref_for(a)
                rows.append({
                    "theorem": theorem,
                    "alpha": a,
                    "p": p if theorem == "est8" else None,
                    "s": s,
                    "value": value,
                    "reference": ref,
                    "tightness": value / ref if ref > 0 else None,
                })
    return rows


def _cmd_sweep(args) -> int:
    _validate_flags(args)
    if args.theorem not in _SWEEPABLE:
        raise ParameterError(f"sweep supports {_SWEEPABLE}, got {args.theorem!r}")
    alphas = parse_grid(args.alpha_grid)
    for a in alphas:
        check_alpha(a)
    if args.theorem == "est8":
        ps = parse_grid(args.p_grid) if args.p_grid else [1.0]
    else:
        if args.p_grid:
            raise ParameterError(f"--p-grid is only applicable to est8")
        ps = [1.0]
    if args.theorem == "est6":
        if args.s_grid:
            raise ParameterError("--s-grid is not applicable to est6")
        ss = [None]
    else:
        ss = parse_grid(args.s_grid) if args.s_grid else [0.5]
        for s in ss:
            if not 0.0 <= s <= 1.0:
                raise ParameterError(f"s must lie in [0, 1], got {s}")
    for p in ps:
        if p < 1.0:
            raise ParameterError(f"p must be >= 1, got {p}")

    t = block_from_json(_load_json_file(args.input))
    rows = _sweep_rows(t, args.theorem, alphas, ps, ss)
    argmin = min(range(len(rows)), key=lambda i: rows[i]["value"])

    def cell(v):
        return "" if v is None else repr(float(v))

    lines = ["theorem,alpha,p,s,value,reference,tightness,is_argmin"]
    for i, row in enumerate(rows + [rows[argmin]]):
        is_argmin = 1 if i == len(rows) else 0
        lines.append(",".join([
            row["theorem"], cell(row["alpha"]), cell(row["p"]), cell(row["s"]),
            cell(row["value"]), cell(row["reference"]), cell(row["tightness"]),
            str(is_argmin),
        ]))
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alphanorm",
        description="Alpha-norms, numerical radii, and block-matrix bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="compute a norm of a matrix")
    c.add_argument("--input", required=True, help="matrix JSON file")
    c.add_argument("--quantity", required=True, choices=_QUANTITIES)
    c.add_argument("--alpha", type=float)
    c.add_argument("--tol", type=float, help="numerical radius tolerance")
    c.add_argument("--width", type=float, help="alpha-norm enclosure width")

    b = sub.add_parser("bound", help="evaluate a bound on a block matrix")
    b.add_argument("--input", required=True, help="block-matrix JSON file")
    b.add_argument("--theorem", required=True, choices=_THEOREMS)
    b.add_argument("--alpha", type=float)
    b.add_argument("--minimize", action="store_true", help="minimize over alpha")
    b.add_argument("--p", type=float)
    b.add_argument("--s", type=float)
    b.add_argument("--builder", choices=("est6", "est7", "est9"), default="est6",
                   help="auxiliary-matrix family for cor_w")
    b.add_argument("--strict", action="store_true",
                   help="require all blocks square of equal dimension")
    b.add_argument("--out", help="also write the report JSON here")

    v = sub.add_parser("verify", help="run a verification suite on random ensembles")
    v.add_argument("--suite", required=True, choices=sorted(SUITES))
    v.add_argument("--trials", type=int, required=True)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="write the report JSON here")
    v.add_argument("--csv", nargs="?", const="", default=None,
                   help="also write CSV (default: --out with .csv suffix)")

    w = sub.add_parser("sweep", help="tabulate a bound over parameter grids")
    w.add_argument("--input", required=True, help="block-matrix JSON file")
    w.add_argument("--theorem", required=True, choices=_THEOREMS)
    w.add_argument("--alpha-grid", required=True)
    w.add_argument("--p-grid")
    w.add_argument("--s-grid")
    w.add_argument("--out", help="CSV output path (default: stdout)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "compute": _cmd_compute,
        "bound": _cmd_bound,
        "verify": _cmd_verify,
        "sweep": _cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except (ParameterError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (MatrixFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AlphaNormError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
