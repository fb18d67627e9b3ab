"""Command line interface: ``sparsepriv {sample,encode,decode,analyze,simulate,verify}``.

Every subcommand accepts ``--config FILE`` with ``key = value`` lines (keys are
flag names without the leading dashes); explicit flags win over the file.
Exit codes: 0 success, 1 verification or decoding failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis as an
from .gf import get_field
from .matrix import (
    DenseMatrix,
    format_sparse,
    matvec,
    measure_sparsity,
    read_dense,
    read_sparse,
    write_dense,
    write_sparse,
)
from .pad import PadParams, SourceModel, decode_pair, encode, sample_source
from .scheme import TRUSTED, UNTRUSTED, SchemeConfig, build_plan, format_plan
from .sim import TimingModel, UndecodableError, run_simulation
from .svg import line_chart
from . import verify as vf

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_EPS_REL = "0,0.05,0.25,0.5,0.75,1"
DEFAULT_SIM_EPS_REL = 0.1


class UsageError(Exception):
    pass


def fmt(v: float) -> str:
    return f"{v:.12g}"


def read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (t.strip() for t in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)


def _pad_params(args, field) -> PadParams:
    if args.p is not None:
        if args.p_z0 is not None or args.p_nz0 is not None:
            raise UsageError("give either --p or --p-z0/--p-nz0, not both")
        return PadParams.symmetric(args.p, field)
    if args.p_z0 is None or args.p_nz0 is None:
        raise UsageError("need --p, or both --p-z0 and --p-nz0")
    return PadParams(args.p_z0, args.p_nz0, field)


# -- subcommands -----------------------------------------------------------

def cmd_sample(args) -> int:
    field = get_field(args.q)
    rng = np.random.default_rng(args.seed)
    A = sample_source(SourceModel(args.s, field), args.m, args.n, rng)
    if args.out is None:
        raise UsageError("sample needs --out")
    write_sparse(args.out, A)
    if args.x_out:
        write_dense(args.x_out, DenseMatrix.random(field, args.n, args.k, rng))
    print(f"S_A_empirical={fmt(measure_sparsity(A))}")
    return EXIT_OK


def cmd_encode(args) -> int:
    A = read_sparse(args.input)
    if args.q is not None and args.q != A.field.q:
        raise UsageError(f"--q {args.q} does not match the input file (q={A.field.q})")
    params = _pad_params(args, A.field)
    s = args.s if args.s is not None else measure_sparsity(A)
    rng = np.random.default_rng(args.seed)
    B1, B2 = encode(A, params, rng)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    write_sparse(out / "B1.txt", B1)
    write_sparse(out / "B2.txt", B2)
    lines = [f"q={A.field.q}", f"p_z0={fmt(params.p_z0)}", f"p_nz0={fmt(params.p_nz0)}", f"s={fmt(s)}"]
    if s > 1.0 / A.field.q:
        st = an.pad_stats(s, params)
        lines += [f"S_R_analytic={fmt(st.s_pad)}", f"S_ApR_analytic={fmt(st.s_padded)}",
                  f"eps1={fmt(st.eps1)}", f"eps2={fmt(st.eps2)}"]
    else:
        lines.append("analytic=unavailable (s <= 1/q)")
    lines += [f"S_R_empirical={fmt(measure_sparsity(B1))}", f"S_ApR_empirical={fmt(measure_sparsity(B2))}"]
    print("\n".join(lines))
    return EXIT_OK


def cmd_decode(args) -> int:
    B1, B2 = read_sparse(args.b1), read_sparse(args.b2)
    A = decode_pair(B1, B2)
    if args.out is None:
        sys.stdout.write(format_sparse(A))
    else:
        write_sparse(args.out, A)
    return EXIT_OK


def analyze_rows(N2: int, alpha: int, s: float, q: int, zs, eps_rels):
    field = get_field(q)
    rows = []
    for e in sorted(set(eps_rels)):
        for z in sorted(set(zs)):
            budget = an.LeakageBudget(e, z, N2, alpha)
            p = an.solve_p_star(s, field, budget)
            rows.append((z, e, p, an.sparsity_pad(s, p, p, q), an.sparsity_padded(s, p, p),
                         an.eps2_symmetric(p, s, q)))
    return rows


def cmd_analyze(args) -> int:
    zs = _int_list(args.z) if args.z else list(range(1, args.N2 + 1))
    eps_rels = _float_list(args.eps_rel)
    rows = analyze_rows(args.N2, args.alpha, args.s, args.q, zs, eps_rels)
    text = "z,eps_rel,p_star,S_R,S_ApR,eps2_at_pstar\n" + "".join(
        f"{z},{fmt(e)},{fmt(p)},{fmt(sr)},{fmt(sar)},{fmt(e2)}\n" for z, e, p, sr, sar, e2 in rows
    )
    _emit(text, args.out)
    if args.svg:
        series = {}
        for z, e, p, *_ in rows:
            series.setdefault(f"eps_rel={fmt(e)}", []).append((z, p))
        Path(args.svg).write_text(line_chart(series, x_label="z", y_label="p*"), encoding="utf-8")
    return EXIT_OK


def _stragglers(cluster: str, count: int, size: int) -> set[tuple[str, int]]:
    if not 0 <= count <= size:
        raise UsageError(f"{count} {cluster} stragglers but the cluster has {size} workers")
    return {(cluster, w) for w in range(count)}


def cmd_simulate(args) -> int:
    field = get_field(args.q)
    rng = np.random.default_rng(args.seed)
    if args.matrix:
        A = read_sparse(args.matrix)
        if A.field != field:
            raise UsageError(f"matrix is over GF({A.field.q}), --q is {args.q}")
    else:
        A = sample_source(SourceModel(args.s, field), args.m, args.n, rng)
    x = read_dense(args.x) if args.x else DenseMatrix.random(field, A.cols, args.k, rng)
    cfg = SchemeConfig(args.N1, args.N2, args.alpha_u, args.alpha_t, args.z, field)
    if args.eps_rel is None and args.p is None and args.p_z0 is None and args.p_nz0 is None:
        args.eps_rel = DEFAULT_SIM_EPS_REL
    if args.eps_rel is not None:
        s_hat = measure_sparsity(A)
        budget = an.LeakageBudget(args.eps_rel, args.z, args.N2, args.alpha_t)
        params = PadParams.symmetric(an.solve_p_star(s_hat, field, budget), field)
    else:
        params = _pad_params(args, field)
    timing = TimingModel(
        base_cost_per_nnz=args.cost_per_nnz,
        straggler_slowdown=args.slowdown,
        partial_stragglers=_stragglers(UNTRUSTED, args.partial_stragglers_untrusted, args.N1)
        | _stragglers(TRUSTED, args.partial_stragglers_trusted, args.N2),
        full_stragglers=_stragglers(UNTRUSTED, args.full_stragglers_untrusted, args.N1)
        | _stragglers(TRUSTED, args.full_stragglers_trusted, args.N2),
        jitter_rate=args.jitter_rate,
        jitter_shift=args.jitter_shift,
    )
    if args.plan_out:
        # the layout depends only on cfg, so A stands in for both encoded matrices
        Path(args.plan_out).write_text(format_plan(build_plan(A, A, cfg)), encoding="ascii")
    try:
        report = run_simulation(A, x, params, cfg, timing, rng)
    except UndecodableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(report.to_csv(), args.out)
    if not report.verified or report.y != matvec(A, x):
        print("error: recovered y does not match A x", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args) -> int:
    results = vf.run_all(quick=args.quick)
    for r in results:
        print(r.line())
    if args.out:
        payload = [{"suite": r.name, "passed": r.passed, "checked": r.checked, "detail": r.detail}
                   for r in results]
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# -- parser ----------------------------------------------------------------

def _shared(p: argparse.ArgumentParser, q_default=None) -> None:
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--q", type=int, default=q_default, help="field size (prime or 256)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path")


def _pad_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=float, help="p_z0 = p_nz0 = P")
    p.add_argument("--p-z0", type=float)
    p.add_argument("--p-nz0", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsepriv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw an i.i.d. sparse source matrix")
    _shared(p, 256)
    p.add_argument("--s", type=float, default=0.93)
    p.add_argument("--m", type=int, default=64)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--x-out", help="also write a uniform dense x (n x k)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("encode", help="pad a matrix file into B1 = R, B2 = A + R")
    _shared(p)
    p.add_argument("input")
    _pad_flags(p)
    p.add_argument("--s", type=float, help="source sparsity for the analytic stats")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="recover A = B2 - B1")
    _shared(p)
    p.add_argument("b1")
    p.add_argument("b2")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("analyze", help="p* over a (z, eps_rel) grid")
    _shared(p, 256)
    p.add_argument("--N2", type=int, default=100)
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--s", type=float, default=0.93)
    p.add_argument("--z", help="z values, e.g. '1-100' or '1,5,10' (default 1..N2)")
    p.add_argument("--eps-rel", default=DEFAULT_EPS_REL)
    p.add_argument("--svg", help="optional SVG chart of p* against z")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="run the two-cluster event simulation")
    _shared(p, 256)
    p.add_argument("--N1", type=int, default=4)
    p.add_argument("--N2", type=int, default=4)
    p.add_argument("--alpha-u", type=int, default=2)
    p.add_argument("--alpha-t", type=int, default=2)
    p.add_argument("--z", type=int, default=1)
    p.add_argument("--m", type=int, default=32)
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--s", type=float, default=0.93)
    p.add_argument("--matrix", help="sparse A file instead of a sampled one")
    p.add_argument("--x", help="dense x file instead of a uniform one")
    _pad_flags(p)
    p.add_argument("--eps-rel", type=float, help="solve p* for this relative leakage (default 0.1 if no pad flags)")
    p.add_argument("--cost-per-nnz", type=float, default=1.0)
    p.add_argument("--slowdown", type=float, default=1.0)
    p.add_argument("--partial-stragglers-untrusted", type=int, default=0)
    p.add_argument("--partial-stragglers-trusted", type=int, default=0)
    p.add_argument("--full-stragglers-untrusted", type=int, default=0)
    p.add_argument("--full-stragglers-trusted", type=int, default=0)
    p.add_argument("--jitter-rate", type=float)
    p.add_argument("--jitter-shift", type=float, default=0.0)
    p.add_argument("--plan-out", help="write the task plan dump here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the oracle suites")
    _shared(p)
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    values = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        action = known.get(key)
        if action is None or not action.option_strings:
            raise UsageError(f"{args.config}: unknown key {key!r} for {args.command}")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in {"1", "true", "yes", "on"}
        else:
            defaults[key] = action.type(raw) if action.type else raw
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
