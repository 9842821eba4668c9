"""Command-line interface: ``tcpoisson {pmf,hitting,iterate,verify}``.

Exit codes: 0 success, 1 invalid input, 2 numerical truncation failure,
3 failed verification.  Every file written with ``--out`` is accompanied by a
``<stem>.manifest.json`` recording the command, parameters and outputs.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .iterate import (
    IterChain,
    UnsupportedRegime,
    chain_mixture,
    collapse_chain,
    compose_bernstein,
    iter_bernstein,
    iter_levy_density,
    ode_coefficients,
)
from .models import Family, ModelParams
from .passage import (
    fpt_cdf,
    fpt_density,
    hit_density_n1en,
    hit_density_n1gn,
    hit_prob_alpha2,
    hit_prob_n1en,
    hit_prob_n1gn,
    hit_prob_renewal,
    jump_distribution,
)
from .pmf import PMF_FAMILIES, build_table
from .specfun import DEFAULT_CONTROL, SeriesControl, TruncationError
from .verify import run_suite

EXIT_OK, EXIT_INPUT, EXIT_TRUNCATION, EXIT_VERIFY = 0, 1, 2, 3
TOL_ENV = "TCPOISSON_SERIES_TOL"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def parse_krange(text: str) -> list[int]:
    """``"1..10"``, ``"1,3,5"`` or ``""`` (empty)."""
    text = text.strip()
    if not text:
        return []
    out: list[int] = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_grid(text: str) -> list[float]:
    """``"lo:hi:n"`` for a log-spaced grid, otherwise a comma list."""
    if text.count(":") == 2:
        lo, hi, n = text.split(":")
        return [float(x) for x in np.geomspace(float(lo), float(hi), int(n))]
    return parse_floats(text)


def _control(args) -> SeriesControl:
    tol = args.tol
    if tol is None and os.environ.get(TOL_ENV):
        tol = float(os.environ[TOL_ENV])
    return SeriesControl(tol=tol) if tol is not None else DEFAULT_CONTROL


def _params(args) -> ModelParams:
    return ModelParams(lam=args.lam, alpha=args.alpha, beta=args.beta, lam1=args.lam1, a=args.a)


def _params_dict(p: ModelParams) -> dict:
    return {"lambda": p.lam, "alpha": p.alpha, "beta": p.beta, "lambda1": p.lam1, "a": p.a}


def _emit(args, text: str, manifest: dict) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    manifest = dict(manifest)
    manifest.setdefault("outputs", []).insert(0, str(out))
    manifest.update(tool="tcpoisson", version=__version__,
                    timestamp=dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"))
    out.with_suffix(".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_pmf(args) -> int:
    fam = Family.parse(args.family)
    if fam not in PMF_FAMILIES:
        raise ValueError(f"pmf needs a counting family (n1gn, n1en, n1gna, n1ena), got {args.family!r}")
    p = _params(args)
    times = parse_floats(args.t)
    # an explicit kmax is honoured as given; the missing mass is reported instead
    table = build_table(fam, p, times, kmax=args.kmax, ctl=_control(args),
                        max_tail=None if args.kmax is not None else 1e-6)
    text = table.to_csv() if args.format == "csv" else table.to_json() + "\n"
    manifest = {"command": "pmf", "family": fam.value, "params": _params_dict(p),
                "times": times, "kmax": table.kmax, "seed": None,
                "tail_mass": [float(_fmt(v)) for v in table.tail_mass]}
    if args.plot:
        _plot_table(table, args.plot)
        manifest["outputs"] = [args.plot]
    _emit(args, text, manifest)
    if args.kmax is not None and len(times) and table.tail_mass.max() > 1e-6:
        print(f"note: kmax={table.kmax} leaves tail mass up to {table.tail_mass.max():.3g}",
              file=sys.stderr)
    return EXIT_OK


def _plot_table(table, path: str) -> None:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # optional extra
        raise ValueError("--plot needs matplotlib (pip install artifact[plot])") from exc
    fig, ax = plt.subplots(figsize=(6, 4))
    ks = np.arange(table.kmax + 1)
    for t, row in zip(table.times, table.probs):
        ax.plot(ks, row, marker="o", ms=3, label=f"t={t:g}")
    ax.set_xlabel("k")
    ax.set_ylabel("P{X(t)=k}")
    ax.set_title(table.family.value)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def cmd_hitting(args) -> int:
    p = _params(args)
    ctl = _control(args)
    ks = parse_krange(args.k)
    exponential = Family.parse(args.family) is Family.N1EN
    if args.kind == "prob":
        if args.method == "renewal":
            q = jump_distribution(p.with_(alpha=1.0) if exponential else p)
            fn = lambda k: hit_prob_renewal(k, q)
        elif args.method == "closed":
            fn = (lambda k: hit_prob_n1en(k, p)) if exponential else (lambda k: hit_prob_alpha2(k, p))
        else:
            fn = (lambda k: hit_prob_n1en(k, p)) if exponential else (lambda k: hit_prob_n1gn(k, p, ctl))
        text = _csv(["k", "value"], ([k, _fmt(fn(k))] for k in ks))
    else:
        grid = parse_grid(args.s)
        if args.kind == "density":
            fn = (lambda k, s: hit_density_n1en(k, s, p, ctl)) if exponential else \
                (lambda k, s: hit_density_n1gn(k, s, p, ctl))
        elif args.kind == "fpt-cdf":
            q = p.with_(alpha=1.0) if exponential else p
            fn = lambda k, s: fpt_cdf(k, s, q, ctl)
        else:
            q = p.with_(alpha=1.0) if exponential else p
            fn = lambda k, s: fpt_density(k, s, q, ctl)
        text = _csv(["k", "s", "value"], ([k, _fmt(s), _fmt(fn(k, s))] for k in ks for s in grid))
    _emit(args, text, {"command": "hitting", "kind": args.kind, "family": args.family,
                       "method": args.method, "params": _params_dict(p), "k": ks, "seed": None})
    return EXIT_OK


def cmd_iterate(args) -> int:
    chain = IterChain.load(args.chain)
    manifest = {"command": "iterate", "action": args.action, "chain": chain.to_dict(), "seed": None}
    if args.action == "collapse":
        q = collapse_chain(chain, lam1=args.mu)
        text = json.dumps({"alpha": q.alpha, "beta": q.beta, "lambda": q.lam, "a": q.a}, indent=2) + "\n"
    elif args.action == "bernstein":
        grid = parse_grid(args.grid)
        try:
            closed = [iter_bernstein(u, chain) for u in grid]
        except UnsupportedRegime:
            closed = [math.nan] * len(grid)
        composed = [compose_bernstein(u, chain) for u in grid]
        diffs = [abs(c - d) for c, d in zip(closed, composed)]
        text = _csv(["u", "closed", "composed", "abs_diff"],
                    ([_fmt(u), _fmt(c), _fmt(d), _fmt(e)] for u, c, d, e in zip(grid, closed, composed, diffs)))
        worst = max(diffs, default=0.0)
        manifest["max_abs_diff"] = worst
        print(f"max |closed - composed| = {worst:.3g}", file=sys.stderr)
    elif args.action == "levy":
        grid = parse_grid(args.grid)
        mix = chain_mixture(chain)
        try:
            closed = [iter_levy_density(x, chain) for x in grid]
        except UnsupportedRegime:
            closed = [math.nan] * len(grid)
        text = _csv(["x", "closed", "mixture"],
                    ([_fmt(x), _fmt(c), _fmt(mix.density(x))] for x, c in zip(grid, closed)))
    else:
        rows = []
        for j, comp in enumerate(ode_coefficients(chain)):
            if hasattr(comp, "scale"):
                rows.append([j, "log", _fmt(comp.coef), _fmt(comp.scale), "", "", ""])
            else:
                rows.append([j, "rational", "", "", _fmt(comp.num), _fmt(comp.base), _fmt(comp.slope)])
        text = _csv(["j", "kind", "coef", "scale", "num", "base", "slope"], rows)
    _emit(args, text, manifest)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, seed=args.seed, n=args.n, workers=args.workers)
    failed = [c for c in report.checks if not c.passed]
    for c in failed:
        print(f"FAIL {c.name}: observed {c.observed:.6g}, expected {c.expected:.6g} "
              f"(tolerance {c.tolerance:.3g})", file=sys.stderr)
    print(f"{len(report.checks) - len(failed)}/{len(report.checks)} checks passed", file=sys.stderr)
    _emit(args, report.to_json() + "\n", {"command": "verify", "suite": args.suite,
                                         "seed": args.seed, "n": args.n, "workers": args.workers})
    return EXIT_OK if report.passed else EXIT_VERIFY


def _add_params(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0, help="inner Poisson rate")
    sp.add_argument("--alpha", type=float, default=1.0, help="Gamma shape")
    sp.add_argument("--beta", type=float, required=True, help="Gamma rate")
    sp.add_argument("--lambda1", dest="lam1", type=float, default=1.0, help="outer Poisson rate")
    sp.add_argument("--a", type=float, default=0.0, help="drift of the inner clock")


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--out", help="output file (default: stdout)")
    sp.add_argument("--tol", type=float, help=f"series tolerance (default: ${TOL_ENV} or 1e-14)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tcpoisson", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("pmf", help="tabulate P{X(t)=k}")
    sp.add_argument("--family", required=True, help="n1gn, n1en, n1gna or n1ena")
    _add_params(sp)
    sp.add_argument("--t", required=True, help="comma-separated times")
    sp.add_argument("--kmax", type=int, help="last k (default: adaptive, tail < 1e-12)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--plot", help="also save a line plot (needs matplotlib)")
    _add_common(sp)
    sp.set_defaults(func=cmd_pmf)

    sp = sub.add_parser("hitting", help="hitting and first-passage laws")
    sp.add_argument("--kind", choices=("prob", "density", "fpt-cdf", "fpt-density"), required=True)
    sp.add_argument("--family", choices=("n1gn", "n1en"), default="n1gn")
    sp.add_argument("--method", choices=("series", "renewal", "closed"), default="series",
                    help="route for --kind prob; 'closed' needs alpha=2 or n1en")
    _add_params(sp)
    sp.add_argument("--k", default="1", help="levels: '1..10', '1,3,5' or '' for none")
    sp.add_argument("--s", default="1", help="times: comma list or lo:hi:n log grid")
    _add_common(sp)
    sp.set_defaults(func=cmd_hitting)

    sp = sub.add_parser("iterate", help="iterated Bessel transforms")
    sp.add_argument("--chain", required=True, help="chain JSON file")
    sp.add_argument("--action", choices=("bernstein", "levy", "collapse", "ode"), required=True)
    sp.add_argument("--grid", default="0.001:10:30", help="comma list or lo:hi:n log grid")
    sp.add_argument("--mu", type=float, default=1.0, help="outer Poisson rate (collapse output)")
    _add_common(sp)
    sp.set_defaults(func=cmd_iterate)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", choices=("all", "pmf", "hitting", "ode", "iterate"), default="all")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--n", type=int, default=100_000, help="Monte Carlo sample size")
    sp.add_argument("--workers", type=int, default=1)
    _add_common(sp)
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TruncationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
