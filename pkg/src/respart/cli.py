"""Command-line interface.

Exit codes: 0 pass, 1 verdict failed, 2 configuration error,
3 numeric or rejection failure.  All logarithms are natural.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import asdict
from typing import Any, Sequence

import numpy as np

from respart import __version__
from respart import asymptotics as asy
from respart.boltzmann import EXACT_CONDITIONING_LIMIT, empirical_law, solve_q
from respart.errors import ConfigError, NumericError
from respart.experiments import (
    ExperimentConfig,
    Report,
    default_threads,
    run_lower_bound_sweep,
    run_verify_nash_williams,
    run_verify_theorem1,
    run_verify_theorem3,
)
from respart.graphical import fraction_scaling_table
from respart.partitions import count, count_with_max_parts, enumerate_partitions
from respart.restriction import builtin, with_lower_bound

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

_STAT_RE = re.compile(r"^(X|Y|muY|R)k?:?(\d+)$")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _restriction_spec(args) -> str:
    r = builtin(args.mu)
    if getattr(args, "lower_bound", None):
        r = with_lower_bound(r, args.lower_bound)
    return r.spec_string()


def parse_stat(text: str) -> tuple[str, int]:
    """``X1``, ``Yk:3``, ``muY:2``, ``R:1`` -> (statistic, k)."""
    m = _STAT_RE.match(text.strip())
    if not m:
        raise ConfigError(f"bad statistic {text!r}; use X<k>, Yk:<k>, muY:<k> or R:<k>")
    return m.group(1), int(m.group(2))


def _n_range(args) -> tuple[int, ...]:
    if getattr(args, "n", None):
        return tuple(args.n)
    if args.n_from is None or args.n_to is None:
        raise ConfigError("give --n or both --n-from and --n-to")
    if args.step < 1:
        raise ConfigError("--step must be >= 1")
    return tuple(range(args.n_from, args.n_to + 1, args.step))


# ----------------------------------------------------------------- output


def _fmt(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v)) if math.isfinite(v) else str(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def render(columns: list[str], rows: list[dict], fmt: str, header: dict | None) -> str:
    if fmt == "json":
        payload = dict(header or {})
        payload.update({"columns": columns, "rows": rows})
        return json.dumps(payload, sort_keys=True, default=_fmt) + "\n"
    buf = io.StringIO()
    if header is not None:
        buf.write("# " + json.dumps(header, sort_keys=True, default=_fmt) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
    return buf.getvalue()


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _header(cfg: ExperimentConfig, extra: dict | None = None) -> dict:
    h = {"version": __version__, "config": asdict(cfg)}
    if extra:
        h.update(extra)
    return h


def _emit_report(rep: Report) -> int:
    extra = {"summary": rep.summary, "verdict": rep.verdict}
    _emit(render(rep.columns, rep.rows, rep.config.out, _header(rep.config, extra)), rep.config.output)
    if rep.verdict is False:
        print(f"verdict: FAIL {rep.summary}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _config(args, command: str, **kw) -> ExperimentConfig:
    base = dict(
        command=command,
        restriction=_restriction_spec(args) if hasattr(args, "mu") else "identity",
        out=args.out,
        output=args.output,
        threads=getattr(args, "threads", None) or default_threads(),
    )
    base.update(kw)
    return ExperimentConfig(**base)


# --------------------------------------------------------------- commands


def cmd_count(args) -> int:
    ns = _n_range(args)
    cfg = _config(args, "count", n_values=ns)
    r = builtin(cfg.restriction)
    rows = []
    for n in ns:
        row = {"n": n, "count": count(n, r)}
        if args.max_parts is not None:
            row["count_max_parts"] = count_with_max_parts(n, args.max_parts, r)
        rows.append(row)
    cols = ["n", "count"] + (["count_max_parts"] if args.max_parts is not None else [])
    _emit(render(cols, rows, cfg.out, _header(cfg)), cfg.output)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    cfg = _config(args, "enumerate", n_values=(args.n,))
    r = builtin(cfg.restriction)
    parts = [p.parts for p in enumerate_partitions(args.n, r)]
    if cfg.out == "json":
        text = json.dumps({**_header(cfg), "partitions": [list(p) for p in parts]}, sort_keys=True) + "\n"
    else:
        text = "".join(",".join(map(str, p)) + "\n" for p in parts)
    _emit(text, cfg.output)
    return EXIT_OK


def cmd_fraction(args) -> int:
    ns = _n_range(args)
    cfg = _config(args, "fraction", n_values=ns)
    table = fraction_scaling_table(ns, builtin(cfg.restriction), workers=cfg.threads)
    cols = ["n", "total", "graphical", "fraction", "scaled"]
    _emit(render(cols, [t.as_row() for t in table], cfg.out, _header(cfg)), cfg.output)
    return EXIT_OK


def cmd_sample(args) -> int:
    stat, k = parse_stat(args.stat)
    cfg = _config(
        args,
        "sample",
        n_values=(args.n,),
        k=k,
        samples=args.samples,
        seed=args.seed,
        window=args.window,
        allow_large_exact=args.allow_large_exact,
    )
    if cfg.window == 0 and args.n > EXACT_CONDITIONING_LIMIT and not cfg.allow_large_exact:
        raise ConfigError(
            f"exact conditioning beyond n={EXACT_CONDITIONING_LIMIT} needs --allow-large-exact or --window > 0"
        )
    params = solve_q(args.n, builtin(cfg.restriction))
    law = empirical_law(params, stat, k, cfg.samples, cfg.window, cfg.seed)
    total = cfg.samples
    rows = [{"value": v, "count": round(p * total), "frequency": p} for v, p in sorted(law.items())]
    extra = {"statistic": f"{stat}{k}", "q": params.q, "alpha": params.alpha}
    _emit(render(["value", "count", "frequency"], rows, cfg.out, _header(cfg, extra)), cfg.output)
    return EXIT_OK


def cmd_asymptotics(args) -> int:
    if args.log_base is not None:
        raise ConfigError("--log-base is not supported: natural logarithms are fixed")
    sub = args.asy_command
    r = builtin(_restriction_spec(args))
    cfg = _config(args, f"asymptotics {sub}", n_values=tuple(args.n or ()))
    if sub == "q":
        rows = []
        for n in cfg.n_values:
            p = solve_q(n, r, tol=args.tol)
            ref = math.pi / math.sqrt(6.0 * n)
            rows.append({"n": n, "q": p.q, "alpha": p.alpha, "pi_over_sqrt6n": ref, "ratio": p.alpha / ref, "truncation": p.truncation})
        cols = ["n", "q", "alpha", "pi_over_sqrt6n", "ratio", "truncation"]
    elif sub == "eta":
        t = asy.EtaTransform(args.alpha, r)
        rows = [{"y": y, "eta": t.eta(y)} for y in args.y]
        cols = ["y", "eta"]
    elif sub == "cdf":
        ys = np.linspace(args.y_from, args.y_to, args.points)
        rows = [{"k": args.k, "y": float(y), "cdf": asy.gumbel_order_cdf(args.k, float(y))} for y in ys]
        cols = ["k", "y", "cdf"]
    elif sub == "ratio":
        rows = []
        for n in cfg.n_values:
            ratio = asy.fraction_ratio(n, r)
            rows.append({"n": n, "ratio": ratio, "bound": ratio / math.sqrt(n)})
        cols = ["n", "ratio", "bound"]
    elif sub == "lower-bound":
        rows = [{"n": n, "l_n": asy.critical_lower_bound(n, r)} for n in cfg.n_values]
        cols = ["n", "l_n"]
    elif sub == "rank-density":
        grid = np.linspace(args.r_from, args.r_to, args.points)
        dens = asy.rank_density(args.k, r, args.alpha, grid)
        rows = [{"r": float(x), "density": float(d)} for x, d in zip(grid, dens)]
        cols = ["r", "density"]
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(sub)
    _emit(render(cols, rows, cfg.out, _header(cfg)), cfg.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    which = args.verify_command
    if which == "theorem1":
        cfg = _config(
            args,
            "verify theorem1",
            n_values=tuple(args.n),
            k=args.k,
            samples=args.samples,
            seed=args.seed,
            window=args.window,
            mode=args.mode,
            allow_large_exact=args.allow_large_exact,
        )
        return _emit_report(run_verify_theorem1(cfg))
    if which == "theorem3":
        cfg = _config(args, "verify theorem3", n_values=_n_range(args), slack=args.slack)
        return _emit_report(run_verify_theorem3(cfg))
    cfg = _config(args, "verify nash-williams", n_values=(args.n_max,))
    return _emit_report(run_verify_nash_williams(cfg))


def cmd_lower_bound(args) -> int:
    cfg = _config(args, "lower-bound", n_values=tuple(args.n))
    return _emit_report(run_lower_bound_sweep(cfg))


# ----------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser, mu: bool = True) -> None:
    if mu:
        p.add_argument("--mu", default="identity", help="identity | linear:<m> | binary | smooth_cutoff")
        p.add_argument("--lower-bound", type=float, default=None, help="keep only parts >= this bound")
    p.add_argument("--out", choices=["csv", "json"], default="csv")
    p.add_argument("--output", default=None, help="write to this file instead of stdout")


def _range_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, nargs="+", default=None)
    p.add_argument("--n-from", type=int, default=None)
    p.add_argument("--n-to", type=int, default=None)
    p.add_argument("--step", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="respart", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"respart {__version__}")
    parser.add_argument("--threads", type=int, default=None, help="worker processes (default: $RESPART_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("count", help="exact counts of restricted partitions")
    _common(p)
    _range_args(p)
    p.add_argument("--max-parts", type=int, default=None)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("enumerate", help="list restricted partitions of n, one per line")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("fraction", help="exact graphical fractions")
    _common(p)
    _range_args(p)
    p.set_defaults(func=cmd_fraction, step=2)

    p = sub.add_parser("sample", help="histogram of a statistic under conditioned Boltzmann sampling")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--stat", required=True, help="X<k> | Yk:<k> | muY:<k> | R:<k>")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--window", type=float, default=0.0)
    p.add_argument("--allow-large-exact", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("asymptotics", help="limit-law numerics (natural log)")
    asub = p.add_subparsers(dest="asy_command", required=True, parser_class=_Parser)
    for name in ("q", "eta", "cdf", "ratio", "lower-bound", "rank-density"):
        a = asub.add_parser(name)
        _common(a)
        a.add_argument("--log-base", default=None, help=argparse.SUPPRESS)
        a.add_argument("--n", type=int, nargs="+", default=None)
        if name == "q":
            a.add_argument("--tol", type=float, default=1e-10)
        if name == "eta":
            a.add_argument("--alpha", type=float, required=True)
            a.add_argument("--y", type=float, nargs="+", required=True)
        if name in ("cdf", "rank-density"):
            a.add_argument("--k", type=int, required=True)
            a.add_argument("--points", type=int, default=50)
        if name == "cdf":
            a.add_argument("--y-from", type=float, default=-3.0)
            a.add_argument("--y-to", type=float, default=10.0)
        if name == "rank-density":
            a.add_argument("--alpha", type=float, required=True)
            a.add_argument("--r-from", type=float, required=True)
            a.add_argument("--r-to", type=float, required=True)
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("verify", help="paper-claim checks with pass/fail exit status")
    vsub = p.add_subparsers(dest="verify_command", required=True, parser_class=_Parser)
    t1 = vsub.add_parser("theorem1")
    _common(t1)
    t1.add_argument("--k", type=int, default=1)
    t1.add_argument("--n", type=int, nargs="+", required=True)
    t1.add_argument("--samples", type=int, default=0)
    t1.add_argument("--seed", type=int, default=None)
    t1.add_argument("--window", type=float, default=0.0)
    t1.add_argument("--mode", choices=["auto", "exact", "sampled"], default="auto")
    t1.add_argument("--allow-large-exact", action="store_true")
    t3 = vsub.add_parser("theorem3")
    _common(t3)
    _range_args(t3)
    t3.set_defaults(step=2)
    t3.add_argument("--slack", type=float, default=2.0)
    nw = vsub.add_parser("nash-williams")
    _common(nw)
    nw.add_argument("--n-max", type=int, default=40)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lower-bound", help="critical lower bound sweep")
    _common(p)
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_lower_bound)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
