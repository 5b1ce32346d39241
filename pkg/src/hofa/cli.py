"""Command-line front end: one subcommand per module, JSON or CSV output.

Every run writes a provenance header (schema, tool version, config hash, seed).
Floats are printed with 12 significant digits and keys are sorted, so a config
re-run reproduces its output byte for byte.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .arith import (FunctionTable, archimedean, build_sieve, next_prime, parse_spec,
                    standard_family, tabulate)
from .correlations import LinearFormSet, chowla_average
from .errors import HofaError, InvalidArgument
from .gowers import default_nstar, gowers_norm_cyclic, gowers_norm_interval
from .katai import constant_h, katai_zd_sums, mult_correlation_sup, pair_correlations, tk_statistics
from .nil import HeisenbergElement, daboussi_check, equidistribution_diagnostic, orbit
from .parreg import (PARTITIONS, QuadraticForm3, dilation_defect, discriminants, is_eligible,
                     mult_density, parametrize, residue_partition, search_monochromatic)
from .quadfield import enumerate_ball, prime_elements, units
from .structure import KernelParams, decompose, structured_kernel, three_term_decompose

SCHEMA = "hofa-result/1"


# ---------------------------------------------------------------- serialization


def _round(x: float) -> float:
    if not math.isfinite(x):
        return x
    return float(f"{x:.12g}")


def _clean(obj):
    """Make results JSON-ready: 12-digit floats, complex as {re, im}, numpy to Python."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = _round(float(obj))
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    return obj


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def config_of(args: argparse.Namespace) -> dict:
    skip = {"func", "output", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def config_hash(config: dict) -> str:
    blob = json.dumps(_clean(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def provenance(args: argparse.Namespace) -> dict:
    cfg = config_of(args)
    return {"schema": SCHEMA, "version": __version__, "command": args.command,
            "config": _clean(cfg), "config_hash": config_hash(cfg), "seed": args.seed}


class Output:
    """What a subcommand produced: a JSON payload and optionally a table."""

    def __init__(self, result: dict, columns=None, rows=None, default_format: str = "json",
                 table_in_json: bool = True, exact_csv: bool = False):
        self.result = result
        self.exact_csv = exact_csv
        self.columns = columns
        self.rows = rows
        self.default_format = default_format
        self.table_in_json = table_in_json

    def render(self, args: argparse.Namespace) -> str:
        fmt = args.format or self.default_format
        prov = provenance(args)
        if fmt == "csv":
            if self.columns is None:
                raise InvalidArgument(f"command {args.command!r} has no tabular output")
            buf = io.StringIO()
            buf.write(f"# {json.dumps(prov, sort_keys=True, separators=(',', ':'))}\n")
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.columns)
            fmt_v = (lambda v: repr(float(v)) if isinstance(v, (float, np.floating)) else _fmt(v)) \
                if self.exact_csv else _fmt
            for r in self.rows:
                w.writerow([fmt_v(v) for v in r])
            return buf.getvalue()
        doc = {"provenance": prov, "result": _clean(self.result)}
        if self.columns is not None and self.table_in_json:
            doc["table"] = {"columns": list(self.columns), "rows": _clean([list(r) for r in self.rows])}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------- helpers


def _table(args) -> FunctionTable:
    """Values f(1..N) from --input CSV or from --spec."""
    if getattr(args, "input", None):
        text = Path(args.input).read_text()
        t = FunctionTable.from_csv(text, label=Path(args.input).stem)
        if args.N is not None:
            if args.N > t.N:
                raise InvalidArgument(f"input has only {t.N} values, N={args.N} requested")
            t = FunctionTable(args.N, t.values[:args.N], label=t.label)
        return t
    if args.N is None:
        raise InvalidArgument("--N is required with --spec")
    return tabulate(parse_spec(args.spec), args.N)


def _family(text: str):
    if text == "std":
        return standard_family()
    if text == "nil":
        return standard_family() + [archimedean(1.0)]
    return [parse_spec(s) for s in text.split(";") if s.strip()]


def _positive(name: str, v) -> None:
    if v is not None and v < 1:
        raise InvalidArgument(f"{name} must be positive")


# ---------------------------------------------------------------- commands


def cmd_tabulate(args) -> Output:
    t = _table(args)
    rows = [(n, v.real, v.imag) for n, v in enumerate(t.values, start=1)]
    return Output({"N": t.N, "label": t.label}, ("n", "re", "im"), rows, default_format="csv",
                  exact_csv=True)


def cmd_gowers(args) -> Output:
    _positive("--s", args.s)
    t = _table(args)
    if args.mode == "cyclic":
        # a(n) at residue n mod N
        norm = gowers_norm_cyclic(np.roll(t.values, 1), args.s)
        nstar = None
    else:
        nstar = args.nstar if args.nstar is not None else default_nstar(t.N)
        norm = gowers_norm_interval(t.values, args.s, nstar)
    return Output({"norm": norm, "s": args.s, "N": t.N, "mode": args.mode, "nstar": nstar,
                   "function": t.label})


def cmd_decompose(args) -> Output:
    t = _table(args)
    Nt = args.ntilde if args.ntilde is not None else next_prime(max(2 * t.N, 2 * args.W))
    k1 = structured_kernel(KernelParams(Nt, args.Q, args.W, args.theta))
    if args.three_term:
        if args.Q2 is None or args.W2 is None:
            raise InvalidArgument("--three-term needs --Q2 and --W2")
        k2 = structured_kernel(KernelParams(Nt, args.Q2, args.W2, args.theta))
        dec = three_term_decompose(t, k1, k2)
    else:
        dec = decompose(t, k1)
    r = dec.report
    out = {"Ntilde": Nt, "Q": args.Q, "W": args.W, "spectrumSize": r.spectrum_size,
           "spectrumContained": r.spectrum_contained, "deficitR": r.almost_period_deficit,
           "deficitBound": r.deficit_bound, "u2Uniform": r.u2_uniform, "u2Total": r.u2_total,
           "reconstructionError": r.reconstruction_error, "function": t.label}
    if args.three_term:
        out["l2Error"] = float(np.sqrt(np.mean(np.abs(dec.fer) ** 2)))
    return Output(out)


def cmd_katai(args) -> Output:
    t = _table(args)
    rep = pair_correlations(t.values, args.K)
    fam = _family(args.family)
    sup, per = mult_correlation_sup(t.values, fam, build_sieve(max(t.N, 2)))
    rows = [(p, q, v) for (p, q), v in sorted(rep.entries.items())]
    return Output({"K": args.K, "N": t.N, "maxEntry": rep.max_entry, "sup": sup,
                   "supByFunction": per, "function": t.label}, ("p", "q", "value"), rows)


def cmd_katai_zd(args) -> Output:
    from .quadfield import build_P, zeta_for_form
    _positive("--norm-limit", args.norm_limit)
    forms = LinearFormSet.parse(args.forms)
    zetas = [zeta_for_form(k, l, args.d) for k, l in forms.forms]
    P = build_P(args.d, zetas, args.P_norm_limit)
    tk = tk_statistics(args.d, P, args.norm_limit)
    sums = katai_zd_sums(parse_spec(args.spec), args.r, constant_h, P, args.norm_limit, args.d,
                         pair=args.pair)
    return Output({"d": args.d, "x": args.norm_limit, "Psize": len(P), "A": tk.A,
                   "meanDeviation": tk.mean_deviation, "points": tk.count, "S": sums.S,
                   "C": sums.C, "boundTerms": sums.bound_terms(),
                   "normalizedS2": abs(sums.S / args.norm_limit) ** 2},
                  ("m", "n", "norm", "ramified"),
                  [(p.z.m, p.z.n, p.norm, p.ramified) for p in P])


def cmd_quadfield(args) -> Output:
    if args.action == "primes":
        ps = prime_elements(args.d, args.limit)
        rows = [(p.z.m, p.z.n, p.norm, p.ramified) for p in ps]
        return Output({"d": args.d, "limit": args.limit, "count": len(ps)},
                      ("m", "n", "norm", "ramified"), rows, default_format="csv")
    if args.action == "units":
        us = units(args.d)
        return Output({"d": args.d, "count": len(us)}, ("m", "n"), [(u.m, u.n) for u in us])
    b = enumerate_ball(args.N, args.d)
    return Output({"d": args.d, "N": args.N, "count": b.count, "R": b.R,
                   "sandwichOk": b.sandwich_ok, "ratio": b.count / args.N ** 2})


def cmd_chowla(args) -> Output:
    matrix = [int(v) for v in args.matrix.split(",")]
    if len(matrix) != 4:
        raise InvalidArgument("--matrix needs four integers")
    res = chowla_average(parse_spec(args.spec), args.d, matrix, args.r,
                         LinearFormSet.parse(args.forms), args.N, args.region)
    return Output({"avgRe": res.value.real, "avgIm": res.value.imag, "abs": abs(res.value),
                   "count": res.count})


def _density_set(name: str):
    if name == "odd":
        return lambda n: n % 2 == 1
    if name == "even":
        return lambda n: n % 2 == 0
    if name == "all":
        return lambda n: True
    if name.startswith("res:"):
        try:
            k, r = (int(v) for v in name[4:].split(":"))
        except ValueError as exc:
            raise InvalidArgument(f"bad set {name!r}; use res:<k>:<r>") from exc
        return lambda n: n % k == r % k
    raise InvalidArgument(f"unknown set {name!r}")


def _partition(name: str):
    if name in PARTITIONS:
        return PARTITIONS[name]
    if name.startswith("mod"):
        try:
            return residue_partition(int(name[3:]))
        except ValueError as exc:
            raise InvalidArgument(f"bad partition {name!r}") from exc
    raise InvalidArgument(f"unknown partition {name!r}")


def cmd_density(args) -> Output:
    out = {"set": args.set, "M": args.M, "density": mult_density(_density_set(args.set), args.M)}
    if args.dilation:
        try:
            num, den = (int(v) for v in args.dilation.split("/"))
        except ValueError as exc:
            raise InvalidArgument("--dilation takes r_num/r_den") from exc
        out["dilationDefect"] = dilation_defect(num, den, args.M)
    return Output(out)


def cmd_parreg(args) -> Output:
    if args.action == "density":
        return cmd_density(args)
    form = QuadraticForm3.parse(args.form)
    if args.action == "eligible":
        return Output({"form": str(form), "eligible": is_eligible(form),
                       "discriminants": list(discriminants(form))})
    if args.action == "parametrize":
        fam = parametrize(form, args.radius)
        return Output({"form": str(form), "ell": list(fam.ell), "signY": fam.sign_y,
                       "lambda": list(fam.lambda_poly), "admissible": fam.admissible,
                       "branch": fam.branch, "verifiedRadius": args.radius})
    hits = search_monochromatic(_partition(args.partition), form, args.bound)
    return Output({"form": str(form), "partition": args.partition, "bound": args.bound,
                   "count": len(hits), "solutions": [list(h) for h in hits[:args.limit]]},
                  ("x", "y", "lambda", "cell"), hits)


def cmd_nil(args) -> Output:
    a = HeisenbergElement.parse(args.a)
    _positive("--N", args.N)
    if args.action == "daboussi":
        val, per = daboussi_check(a, None, _family(args.family), args.N)
        return Output({"a": a.as_tuple(), "N": args.N, "value": val, "byFunction": per})
    pts = orbit(a, args.N, args.method)
    out = {"a": a.as_tuple(), "N": args.N, "method": args.method, "last": pts[-1]}
    if args.check:
        other = orbit(a, args.N, "closed" if args.method == "iterated" else "iterated")
        diff = np.abs(pts - other)
        out["routeAgreement"] = float(np.minimum(diff, 1 - diff).max())
    if args.diag:
        d = equidistribution_diagnostic(pts, budget=args.budget)
        out["diagnostic"] = {"value": d.value, "frequency": d.frequency, "step": d.step,
                             "start": d.start, "length": d.length}
    rows = [(n, *p) for n, p in enumerate(pts, start=1)]
    # the point list goes to CSV only; JSON keeps the summary
    return Output(out, ("n", "x", "y", "z"), rows, table_in_json=False)


# ---------------------------------------------------------------- parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--output", "-o", help="write here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--seed", type=int, default=0, help="64-bit seed recorded in the header")
    return p


def _fn_args(p: argparse.ArgumentParser, N_required: bool = False) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", help="function spec, e.g. liouville or kind=dirichlet,q=5,index=2")
    src.add_argument("--input", help="CSV table with columns n,re,im")
    p.add_argument("--N", type=int, required=N_required)


def _density_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--set", default="odd", help="odd, even, all or res:<k>:<r>")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--dilation", help="also report the dilation defect for r = num/den")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="hofa", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("tabulate", parents=[common], help="tabulate f(1..N) as CSV")
    _fn_args(p)
    p.set_defaults(func=cmd_tabulate)

    p = sub.add_parser("gowers", parents=[common], help="Gowers U^s norm")
    _fn_args(p)
    p.add_argument("--s", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--interval", dest="mode", action="store_const", const="interval")
    mode.add_argument("--cyclic", dest="mode", action="store_const", const="cyclic")
    p.set_defaults(mode="interval")
    p.add_argument("--nstar", type=int)
    p.set_defaults(func=cmd_gowers)

    p = sub.add_parser("decompose", parents=[common], help="structured/uniform decomposition")
    _fn_args(p)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--W", type=int, required=True)
    p.add_argument("--theta", type=float)
    p.add_argument("--ntilde", type=int)
    p.add_argument("--three-term", action="store_true")
    p.add_argument("--Q2", type=int)
    p.add_argument("--W2", type=int)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("katai", parents=[common], help="pair correlations and correlation sup")
    _fn_args(p)
    p.add_argument("--K", type=int, default=20)
    p.add_argument("--family", default="std", help="std, nil or ';'-separated specs")
    p.set_defaults(func=cmd_katai)

    p = sub.add_parser("katai-zd", parents=[common], help="Kátai sums over Z[tau_d]")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--norm-limit", type=int, required=True)
    p.add_argument("--P-norm-limit", type=int, required=True)
    p.add_argument("--spec", default="liouville")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--forms", default="1,0;1,1")
    p.add_argument("--pair", choices=("h", "f", "fh"), default="h")
    p.set_defaults(func=cmd_katai_zd)

    p = sub.add_parser("quadfield", parents=[common], help="arithmetic in Z[tau_d]")
    p.add_argument("--d", type=int, required=True)
    qs = p.add_subparsers(dest="action", metavar="action")
    qs.required = True
    q = qs.add_parser("primes", parents=[common])
    q.add_argument("--limit", type=int, required=True)
    qs.add_parser("units", parents=[common])
    q = qs.add_parser("ball", parents=[common])
    q.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_quadfield)

    p = sub.add_parser("chowla", parents=[common], help="Chowla-type average over a norm form")
    p.add_argument("--spec", required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--forms", default="1,0;1,1")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--region", choices=("square", "ball"), default="square")
    p.add_argument("--matrix", default="1,0,0,1")
    p.set_defaults(func=cmd_chowla)

    p = sub.add_parser("parreg", parents=[common], help="ternary quadratic forms")
    ps = p.add_subparsers(dest="action", metavar="action")
    ps.required = True
    for name in ("eligible", "parametrize", "search"):
        q = ps.add_parser(name, parents=[common])
        q.add_argument("--form", required=True, help="a,b,c,d,e,f")
        if name == "parametrize":
            q.add_argument("--radius", type=int, default=4)
        if name == "search":
            q.add_argument("--bound", type=int, required=True)
            q.add_argument("--partition", default="7adic", help="7adic, trivial or mod<k>")
            q.add_argument("--limit", type=int, default=50, help="solutions listed in JSON")
    q = ps.add_parser("density", parents=[common])
    _density_args(q)
    p.set_defaults(func=cmd_parreg)

    p = sub.add_parser("density", parents=[common], help="multiplicative Følner density")
    _density_args(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("nil", parents=[common], help="Heisenberg orbits")
    ns = p.add_subparsers(dest="action", metavar="action")
    ns.required = True
    q = ns.add_parser("orbit", parents=[common])
    q.add_argument("--a", required=True, help="x,y,z")
    q.add_argument("--N", type=int, required=True)
    q.add_argument("--method", choices=("iterated", "closed"), default="iterated")
    q.add_argument("--diag", action="store_true")
    q.add_argument("--budget", type=int, default=10)
    q.add_argument("--check", action="store_true", help="compare against the other route")
    q = ns.add_parser("daboussi", parents=[common])
    q.add_argument("--a", required=True)
    q.add_argument("--N", type=int, required=True)
    q.add_argument("--family", default="nil", help="std, nil or ';'-separated specs")
    p.set_defaults(func=cmd_nil)
    return ap


def run(argv=None) -> tuple[int, str]:
    """Parse and execute; returns (exit code, rendered output or message)."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), ""
    try:
        out = args.func(args).render(args)
    except HofaError as exc:
        return exc.exit_code, f"error ({exc.kind}): {exc}"
    except (OSError, KeyError) as exc:
        return 2, f"error: {exc}"
    except Exception as exc:  # computation failure
        return 1, f"error: {type(exc).__name__}: {exc}"
    if args.output:
        Path(args.output).write_text(out)
        return 0, ""
    return 0, out


def main(argv=None) -> int:
    code, text = run(argv)
    if text:
        stream = sys.stdout if code == 0 else sys.stderr
        try:
            stream.write(text if text.endswith("\n") else text + "\n")
            stream.flush()
        except BrokenPipeError:
            sys.stderr.close()
    return code


if __name__ == "__main__":
    sys.exit(main())
