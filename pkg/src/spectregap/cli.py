"""Command-line front end: ``spectregap {gen,analyze,mix,sweep,verify}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from contextlib import nullcontext
from fractions import Fraction

import numpy as np

from . import construction as con
from .bounds import GammaRecord, bound_report, gamma_witness
from .config import DEFAULTS, default_seed
from .core import (
    FormatError,
    SpectreGapError,
    load_matrix,
    named_matrix,
    random_doubly_stochastic,
    save_matrix,
    validate,
)
from .expansion import phi_exact
from .mixing import PathEnsemble, canonical_paths_bound, continuous_sandwich, mixing_bounds
from .pf import balance, pf_data
from .spectral import spectral_summary

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if hasattr(x, "as_dict"):
        return _jsonable(x.as_dict())
    return x


def emit_report(report, format: str = "json") -> str:
    """Serialize a report; CSV is only defined for lists of Gamma records."""
    if format == "json":
        return json.dumps(_jsonable(report), indent=2, sort_keys=False)
    if format == "csv":
        rows = report if isinstance(report, list) else [report]
        if not rows or not all(isinstance(r, GammaRecord) for r in rows):
            raise FormatError("csv output is only available for sweep tables")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "witness", "inv_sqrt_n", "inv_35n"])
        for r in rows:
            w.writerow([r.n, repr(r.gamma_upper_witness), repr(r.inv_sqrt_n), repr(r.gamma_lower_bound)])
        return buf.getvalue()
    raise FormatError(f"unknown output format {format!r}")


def _generate(args):
    fam = args.family
    mode = args.mode
    if fam == "rogue":
        return con.rogue_matrix(args.n, mode)
    if fam == "perturbed":
        return con.perturbed_rogue(args.n, mode)
    if fam == "debruijn":
        return con.de_bruijn(args.k, mode)
    if fam == "kv":
        return con.klawe_vazirani(args.p, mode)
    if fam == "random":
        return random_doubly_stochastic(args.n, args.seed)
    kind = {"cycle": "directed_cycle", "uniform": "uniform_J", "identity": "identity"}[fam]
    m = named_matrix(kind, args.n)
    return m.as_rational() if mode == "rational" else m


def cmd_gen(args, out):
    m = _generate(args)
    if args.output:
        fmt = "matrix_market" if args.output.endswith((".mtx", ".mm")) else "json"
        save_matrix(m, args.output, fmt)
    else:
        out.write(emit_report({"n": m.n, "mode": m.mode, "rows": m.entries.tolist()}) + "\n")
    return EXIT_OK


def cmd_analyze(args, out):
    m = load_matrix(args.matrix)
    report = {}
    wanted = [k for k in ("bounds", "phi", "spectrum") if getattr(args, k)] or ["validate"]
    pf = pf_data(m)
    if "validate" in wanted:
        report["validation"] = validate(m, pf)
        report["pf"] = pf
    if "phi" in wanted:
        report["phi"] = phi_exact(m, pf, args.n_limit)
    if "spectrum" in wanted:
        A, w = balance(m, pf)
        report["spectrum"] = spectral_summary(A, w, certify=args.certify or None)
    if "bounds" in wanted:
        br = bound_report(m, n_limit=args.n_limit, certify=args.certify or None)
        report["bounds"] = br
        out.write(emit_report(report if len(wanted) > 1 else br) + "\n")
        return EXIT_OK if br.passed else EXIT_VIOLATION
    out.write(emit_report(report if len(report) > 1 else next(iter(report.values()))) + "\n")
    return EXIT_OK


def cmd_mix(args, out):
    m = load_matrix(args.matrix)
    pf = pf_data(m)
    report = {"discrete": mixing_bounds(m, pf, args.eps, args.tau_max)}
    if args.continuous:
        lo, t, hi = continuous_sandwich(m, pf, args.eps)
        report["continuous"] = {"lower": lo, "t": t, "upper": hi, "diverged": t is None}
    if args.paths is not None:
        W = PathEnsemble.load(args.paths) if args.paths else None
        report["canonical_paths"] = canonical_paths_bound(m, W, args.eps)
    out.write(emit_report(report) + "\n")
    return EXIT_OK if report["discrete"].passed else EXIT_VIOLATION


def cmd_sweep(args, out):
    ns = [int(x) for x in args.n_list.split(",") if x.strip()]
    rows = [gamma_witness(n) for n in ns]
    out.write(emit_report(rows, args.format))
    bad = [r for r in rows if not r.gamma_lower_bound <= r.gamma_upper_witness <= r.inv_sqrt_n + 1e-9]
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_verify(args, out):
    from .verify import run_all

    only = {int(x) for x in args.only.split(",")} if args.only else None
    results = run_all(quick=args.quick, only=only)
    for r in results:
        out.write(r.line() + "\n")
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(emit_report([r.as_dict() for r in results]))
    failed = [r for r in results if not r.passed]
    for r in failed:
        print(f"violation: criterion {r.number} ({r.name})", file=sys.stderr)
    return EXIT_VIOLATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spectregap", description=__doc__)
    p.add_argument("--show-config", action="store_true", help="print default tolerances and exit")
    p.add_argument("--threads", type=int, default=None, help="cap BLAS threads")
    sub = p.add_subparsers(dest="command")

    g = sub.add_parser("gen", help="generate a matrix family")
    g.add_argument("--family", required=True,
                   choices=["rogue", "perturbed", "debruijn", "kv", "cycle", "uniform", "identity", "random"])
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--p", type=int, default=5)
    g.add_argument("--mode", choices=["float", "rational"], default="float")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("-o", "--output")

    a = sub.add_parser("analyze", help="validate, expansion, spectrum, inequality report")
    a.add_argument("matrix")
    a.add_argument("--bounds", action="store_true")
    a.add_argument("--phi", action="store_true")
    a.add_argument("--spectrum", action="store_true")
    a.add_argument("--certify", action="store_true", help="exact nilpotency check when doubly stochastic")
    a.add_argument("--n-limit", type=int, default=DEFAULTS.phi_n_limit)

    m = sub.add_parser("mix", help="mixing time and its bounds")
    m.add_argument("matrix")
    m.add_argument("--eps", type=float, default=DEFAULTS.eps)
    m.add_argument("--tau-max", type=int, default=DEFAULTS.tau_max)
    m.add_argument("--continuous", action="store_true")
    m.add_argument("--paths", nargs="?", const="", default=None,
                   help="canonical-path bound; optional JSON path ensemble")

    s = sub.add_parser("sweep", help="Gamma witness table")
    s.add_argument("--gamma", action="store_true", required=True)
    s.add_argument("--n-list", default="4,9,16,25,49,100")
    s.add_argument("--format", choices=["csv", "json"], default="csv")

    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--quick", action="store_true")
    v.add_argument("--only", default=None, help="comma-separated criterion numbers")
    v.add_argument("--json", default=None, help="also write results to this file")
    return p


COMMANDS = {"gen": cmd_gen, "analyze": cmd_analyze, "mix": cmd_mix, "sweep": cmd_sweep, "verify": cmd_verify}


def _validate_args(args):
    for name in ("n", "k", "p", "n_limit", "tau_max", "threads"):
        val = getattr(args, name, None)
        if val is not None and val < 1:
            raise SpectreGapError(f"--{name.replace('_', '-')} must be positive")
    eps = getattr(args, "eps", None)
    if eps is not None and not 0 < eps < 0.5:
        raise SpectreGapError("--eps must lie in (0, 1/2)")
    if getattr(args, "seed", 0) is None:
        args.seed = default_seed()


def _thread_limit(n):
    if n is None:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.show_config:
        out.write(emit_report(DEFAULTS.as_dict()) + "\n")
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    try:
        _validate_args(args)
        with _thread_limit(args.threads):
            return COMMANDS[args.command](args, out)
    except (SpectreGapError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
