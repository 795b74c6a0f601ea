"""Command line front end.

Every command prints one JSON report (sorted keys, 12 significant digits) and
exits with 0 on success, 2 on invalid input, 3 on a convergence failure, 4 on
an unmet precondition and 5 when a verification fails.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import config
from .combination import IntCombination
from .config import SeriesConfig
from .eisenstein import gmzv_to_mzv, gmzv_to_polylog
from .errors import ConvergenceError, GmzvError, GraphValidationError, PreconditionError
from .graph import build_graph
from .mzv import evaluate_combination
from .numfield import HeckeParams, field, green_period_check, hecke_formula_check, hecke_quadrature, hecke_rhs
from .series import TorsionDecoration, higher_green_numeric

EXIT_OK, EXIT_VALIDATION, EXIT_CONVERGENCE, EXIT_PRECONDITION, EXIT_VERIFY = 0, 2, 3, 4, 5


class VerificationFailed(Exception):
    pass


def _num(x):
    if isinstance(x, complex):
        if x.imag == 0:
            return _num(x.real)
        return {"re": _num(x.real), "im": _num(x.imag)}
    if isinstance(x, float):
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.12g}")
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    return _num(obj)


def dump_report(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2)


def _parse_decorations(items) -> dict[str, Fraction]:
    out = {}
    for it in items or []:
        if "=" not in it:
            raise GraphValidationError(f"decoration {it!r} must look like NAME=FRACTION")
        k, v = it.split("=", 1)
        out[k.strip()] = Fraction(v.strip())
    return out


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(","))


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(","))


def _load(path: str):
    raw = Path(path).read_bytes()
    try:
        record = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise GraphValidationError(f"{path}: not valid JSON ({exc})") from None
    return build_graph(record), raw


def _hash(raw: bytes, args: dict) -> str:
    h = hashlib.sha256(raw)
    h.update(json.dumps(_clean(args), sort_keys=True).encode())
    return h.hexdigest()


def _cfg(args) -> SeriesConfig:
    return SeriesConfig(n_max=args.nmax, tail_mode=args.tail_mode, eta=getattr(args, "eta", 0.0))


# ---------------------------------------------------------------- commands


def cmd_eval(args) -> dict:
    g, raw = _load(args.graph)
    x = _parse_decorations(args.x)
    cfg = _cfg(args)
    res = higher_green_numeric(g, TorsionDecoration.of(x), cfg, restrict_signs=not args.unrestricted)
    echo = {"graph": args.graph, "nmax": cfg.n_max, "tail_mode": cfg.tail_mode, "eta": cfg.eta,
            "x": x, "unrestricted": args.unrestricted}
    return {
        "command": "eval",
        "args": echo,
        "input_hash": _hash(raw, echo),
        "value": res.value,
        "residual": res.residual,
        "empty_sum": res.empty,
        "method": res.method,
        "n_max_used": res.n_max,
    }


def _reduce(g, x: dict, fmt: str) -> IntCombination:
    if fmt == "polylog" or x:
        return gmzv_to_polylog(g, x)
    return gmzv_to_mzv(g)


def cmd_reduce(args) -> dict:
    g, raw = _load(args.graph)
    x = _parse_decorations(args.x)
    comb = _reduce(g, x, args.format)
    echo = {"graph": args.graph, "format": args.format, "x": x}
    return {
        "command": "reduce",
        "args": echo,
        "input_hash": _hash(raw, echo),
        "combination": comb.to_records(),
        "text": str(comb),
        "terms": len(comb),
    }


def cmd_verify(args) -> dict:
    g, raw = _load(args.graph)
    x = _parse_decorations(args.x)
    cfg = _cfg(args)
    if args.combination:
        data = json.loads(Path(args.combination).read_text())
        records = data["combination"] if isinstance(data, dict) else data
        comb = IntCombination.from_records(records)
        raw += Path(args.combination).read_bytes()
    else:
        comb = _reduce(g, x, "polylog" if x else "mzv")
    reduced = evaluate_combination(comb, cfg)
    direct = higher_green_numeric(g, TorsionDecoration.of(x), cfg)
    diff = reduced.value - direct.value
    passed = abs(diff) <= args.tol
    echo = {"graph": args.graph, "nmax": cfg.n_max, "tol": args.tol, "x": x,
            "combination_file": args.combination, "tail_mode": cfg.tail_mode}
    report = {
        "command": "verify",
        "args": echo,
        "input_hash": _hash(raw, echo),
        "combination": comb.to_records(),
        "reduced_value": reduced.value,
        "reduced_residual": reduced.residual,
        "direct_value": direct.value,
        "direct_residual": direct.residual,
        "signed_residual": diff,
        "verdict": "PASS" if passed else "FAIL",
    }
    if not passed:
        raise VerificationFailed(report)
    return report


def cmd_hecke(args) -> dict:
    if args.which == "transform":
        x = _floats(args.x)
        p = _ints(args.p) if args.p else (0,) * len(x)
        if len(x) != args.r:
            raise GraphValidationError(f"--x has {len(x)} entries, --r is {args.r}")
        hp = HeckeParams(x, args.s, p)
        lhs = hecke_quadrature(hp, args.quad_tol)
        rhs = hecke_rhs(hp)
        echo = {"r": args.r, "s": args.s, "x": list(x), "p": list(p), "quad_tol": args.quad_tol}
        out = {"lhs": lhs, "rhs": rhs, "relative_error": abs(lhs - rhs) / abs(rhs)}
    elif args.which == "formula":
        rep = hecke_formula_check(field(args.D), args.s, args.bound)
        echo = {"D": args.D, "s": args.s, "bound": args.bound}
        out = rep.as_dict()
    else:
        x = tuple(Fraction(t) for t in args.x.split(",")) if args.x else None
        rep = green_period_check(field(args.D), args.delta, _ints(args.nu), x, args.bound)
        echo = {"D": args.D, "delta": args.delta, "nu": args.nu, "x": list(x) if x else None,
                "bound": args.bound}
        out = rep.as_dict()
    return {"command": f"hecke {args.which}", "args": echo,
            "input_hash": _hash(b"", echo), **out}


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gmzv", description=__doc__.splitlines()[0])
    ap.add_argument("--timing", action="store_true", help="print wall time to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def series_flags(p):
        p.add_argument("--nmax", type=int, default=config.N_MAX)
        p.add_argument("--tail-mode", default="fit", choices=["none", "richardson", "fit"])
        p.add_argument("--x", action="append", metavar="VERTEX=FRACTION", help="boundary decoration")

    p = sub.add_parser("eval", help="evaluate the constrained series of a graph")
    p.add_argument("graph")
    series_flags(p)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--unrestricted", action="store_true", help="sum over all nonzero labels")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("reduce", help="reduce a tree to multiple zeta values / polylogarithms")
    p.add_argument("graph")
    p.add_argument("--format", default="mzv", choices=["mzv", "polylog"])
    p.add_argument("--x", action="append", metavar="VERTEX=FRACTION")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="compare the reduction with the direct series")
    p.add_argument("graph")
    series_flags(p)
    p.add_argument("--tol", type=float, default=config.TOL)
    p.add_argument("--combination", help="JSON file with a combination to test instead")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("hecke", help="Hecke transform and torus-integral checks")
    hs = p.add_subparsers(dest="which", required=True)
    t = hs.add_parser("transform")
    t.add_argument("--r", type=int, required=True)
    t.add_argument("--s", type=float, required=True)
    t.add_argument("--x", required=True, help="comma separated nonzero reals")
    t.add_argument("--p", default=None, help="comma separated integers")
    t.add_argument("--quad-tol", type=float, default=config.QUAD_TOL)
    f = hs.add_parser("formula")
    f.add_argument("--D", type=int, default=5)
    f.add_argument("--s", type=float, default=2.0)
    f.add_argument("--bound", type=float, default=1e4)
    gr = hs.add_parser("green")
    gr.add_argument("--D", type=int, default=5)
    gr.add_argument("--delta", type=float, default=2.0)
    gr.add_argument("--nu", default="0,0")
    gr.add_argument("--x", default=None, help="torsion point, e.g. 1/3,0")
    gr.add_argument("--bound", type=float, default=1e4)
    for q in (t, f, gr):
        q.set_defaults(func=cmd_hecke)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    code = EXIT_OK
    try:
        report = args.func(args)
        report["status"] = "ok"
    except VerificationFailed as exc:
        report, code = exc.args[0], EXIT_VERIFY
        report["status"] = "verification-failed"
    except (GraphValidationError, ValueError, KeyError, FileNotFoundError) as exc:
        report, code = {"status": "invalid-input", "error": type(exc).__name__, "message": str(exc)}, EXIT_VALIDATION
    except ConvergenceError as exc:
        report, code = {"status": "convergence", "error": type(exc).__name__, "message": str(exc)}, EXIT_CONVERGENCE
    except (PreconditionError, GmzvError) as exc:
        report, code = {"status": "precondition", "error": type(exc).__name__, "message": str(exc)}, EXIT_PRECONDITION
    report["exit_code"] = code
    report["defaults"] = {"n_max": config.N_MAX, "tol": config.TOL, "quad_tol": config.QUAD_TOL}
    print(dump_report(report))
    if code:
        print(f"{report.get('error', 'verification failed')}: {report.get('message', '')}", file=sys.stderr)
    if args.timing:
        print(f"elapsed {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
