"""Command-line interface: ``primerem <command> ...``.

Exit codes: 0 success, 1 domain/range error, 2 configuration or usage error.
Results go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from .checkpoints import CheckpointCache
from .config import FORMATS, RunConfig, load_config
from .corollaries import (
    SolvedEvaluator,
    SurrogateEvaluator,
    canonical_product_demo,
    division_relation,
    equal_parts_check,
    general_sequence_check,
    mean_slope_check,
    product_relation,
)
from .errors import ConfigError, DomainError, PrimeremError, RangeError
from .integrals import calibrate_tail_constant, t_of_delta, tail_bound
from .nsolve import VARIANTS, continuity_scan, scan_remainder
from .output import Result, emit, parse_grid
from .special import li

log = logging.getLogger("primerem")

NSOLVE_COLUMNS = ["delta", "variant", "lower", "target", "n_value", "achieved",
                  "bracket_lo", "bracket_hi", "multiple_roots", "cap_hit"]
INTEGRAL_COLUMNS = ["a", "b", "value", "abs_error", "method"]
WEIGHTED_COLUMNS = ["delta", "a", "b", "value", "abs_error", "method",
                    "residual", "tail_a", "tail_bound"]


def _number(text: str) -> float | int:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    return int(v) if v.is_integer() and abs(v) < 2**53 else v


def _number_list(text: str) -> list:
    return [_number(t) for t in text.split(",") if t.strip()]


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--format", dest="output_format", choices=FORMATS)
    g.add_argument("--y-cap", dest="y_cap", type=float)
    g.add_argument("--delta-max", dest="delta_max", type=float)
    g.add_argument("--von-koch-c", dest="a_von_koch_c", type=float)
    g.add_argument("--quad-rel-tol", dest="quad_rel_tol", type=float)
    g.add_argument("--solve-rel-tol", dest="solve_rel_tol", type=float)
    g.add_argument("--cache-path", dest="cache_path")
    g.add_argument("--threads", dest="threads", type=int)
    g.add_argument("--config", dest="config_file")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="primerem", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    p = add("pi", "prime-counting function pi(x) and prime sum S(x)")
    p.add_argument("x", type=_number)
    p.add_argument("--method", choices=("auto", "sieve", "sublinear"), default="auto")

    p = add("li", "logarithmic integral li(x)")
    p.add_argument("x", type=_number)

    p = add("p", "remainder P(x) = pi(x) - li(x)")
    p.add_argument("x", type=_number)

    p = add("integral", "int_a^b P(x) dx")
    p.add_argument("a", type=_number)
    p.add_argument("b", type=_number, nargs="?")
    p.add_argument("--y-grid", help="grid of upper limits start:stop:count[:lin|geom]")
    p.add_argument("--method", choices=("semi-analytic", "quadrature"), default="semi-analytic")

    p = add("weighted", "int_a^b (ln x - 2) x^(-3/2-delta) P(x) dx")
    p.add_argument("a", type=_number)
    p.add_argument("b", type=_number)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--delta", type=float)
    grp.add_argument("--delta-grid")
    p.add_argument("--method", choices=("semi-analytic", "quadrature"), default="semi-analytic")

    p = add("nsolve", "solve int_lower^N P = target for N")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--delta", type=float)
    grp.add_argument("--delta-grid")
    p.add_argument("--variant", choices=VARIANTS, default="eq12")

    p = add("scan-continuity", "N-hat over a descending delta grid with jump flags")
    p.add_argument("--delta-grid", required=True)
    p.add_argument("--variant", choices=VARIANTS, default="eq12")
    p.add_argument("--threshold", type=float, default=10.0)

    p = add("scan-sign", "sign changes of P on [lo, hi]")
    p.add_argument("lo", type=_number)
    p.add_argument("hi", type=_number)
    p.add_argument("--policy", choices=("exact", "primes"), default="exact")

    p = add("verify-corollary", "residual report for one corollary")
    p.add_argument("relation", choices=("product", "canonical", "division", "equal-parts",
                                        "slope", "general"))
    p.add_argument("--surrogate", action="store_true", help="use defining targets (exact)")
    p.add_argument("--deltas", type=_number_list)
    p.add_argument("--primes", type=_number_list)
    p.add_argument("--exponents", type=_number_list)
    p.add_argument("--delta1", type=float)
    p.add_argument("--delta2", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--mode", choices=("scaled", "raw"), default="scaled")
    p.add_argument("--alpha0", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--indices", type=_number_list)

    p = add("tail", "tail bound (A/delta) y^(-delta/2) and cutoff T(delta)")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--a-const", type=float, help="tail constant A; calibrated when omitted")

    p = add("cache", "inspect or manage the checkpoint cache")
    p.add_argument("action", choices=("show", "clear", "warm"))
    p.add_argument("xs", type=_number, nargs="*")
    return parser


_CONFIG_KEYS = ("output_format", "y_cap", "delta_max", "a_von_koch_c", "quad_rel_tol",
                "solve_rel_tol", "cache_path", "threads")


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ConfigError("missing option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def run(args, cfg: RunConfig, warnings: list[str]) -> Result:
    cmd = args.command
    if cmd == "cache":
        return _cache(args, cfg, warnings)
    engine = cfg.build_engine()
    integrals = cfg.build_integrals(engine)
    if engine.cache is not None and engine.cache.discarded:
        warnings.append(f"checkpoint cache {engine.cache.discarded}; recomputed")

    if cmd == "pi":
        if args.method == "sieve":
            pi, s = engine.counts_by_sieve([args.x])[0]
        elif args.method == "sublinear":
            pi, s = engine.pi_sublinear(args.x), engine.prime_sum_sublinear(args.x)
        else:
            cp = engine.checkpoint(args.x)
            pi, s = cp.pi, cp.prime_sum
        return Result([{"x": args.x, "pi": pi, "prime_sum": s}], single=True, scalar_key="pi")
    if cmd == "li":
        v = li(args.x)
        return Result([{"x": args.x, "value": v.value, "abs_error": v.abs_error}],
                      single=True, scalar_key="value")
    if cmd == "p":
        pi = engine.pi_of(args.x)
        value = integrals.p_of(args.x)
        return Result([{"x": args.x, "pi": pi, "li": pi - value, "value": value}],
                      single=True, scalar_key="value")
    if cmd == "integral":
        f = integrals.exact_integral_P if args.method == "semi-analytic" else integrals.quadrature_integral_P
        if args.y_grid is not None:
            if args.b is not None:
                raise ConfigError("give either b or --y-grid")
            bs = parse_grid(args.y_grid)
        elif args.b is None:
            raise ConfigError("missing upper limit b")
        else:
            bs = [args.b]
        rows = []
        for b in bs:
            iv = f(args.a, b)
            rows.append({"a": args.a, "b": b, "value": iv.value, "abs_error": iv.abs_error,
                         "method": iv.method})
        return Result(rows, INTEGRAL_COLUMNS, single=args.y_grid is None)
    if cmd == "weighted":
        f = (integrals.weighted_integral if args.method == "semi-analytic"
             else integrals.weighted_integral_quadrature)
        ds = [args.delta] if args.delta is not None else parse_grid(args.delta_grid)
        rows = []
        for d in ds:
            iv = f(d, args.a, args.b)
            a_const = calibrate_tail_constant(d, cfg.a_von_koch_c)
            tb = tail_bound(args.b, d, a_const).bound
            rows.append({"delta": d, "a": args.a, "b": args.b, "value": iv.value,
                         "abs_error": iv.abs_error, "method": iv.method,
                         "residual": iv.value + 1.0 / d, "tail_a": a_const, "tail_bound": tb})
        return Result(rows, WEIGHTED_COLUMNS, single=args.delta is not None)
    if cmd == "nsolve":
        solver = cfg.build_solver(integrals)
        ds = [args.delta] if args.delta is not None else parse_grid(args.delta_grid)
        rows = []
        for d in ds:
            e = solver.solve_n(d, args.variant)
            rows.append(e.as_dict())
            if e.flags:
                warnings.append(f"delta={d}: " + ",".join(sorted(e.flags)))
        return Result(rows, NSOLVE_COLUMNS, single=args.delta is not None)
    if cmd == "scan-continuity":
        solver = cfg.build_solver(integrals)
        pts = continuity_scan(solver, parse_grid(args.delta_grid), args.variant, args.threshold)
        rows = [{"delta": p.delta, "n_value": p.n_value, "jump": p.jump,
                 "flags": sorted(p.flags)} for p in pts]
        return Result(rows, ["delta", "n_value", "jump", "flags"])
    if cmd == "scan-sign":
        res = scan_remainder(integrals, args.lo, args.hi, args.policy)
        rows = [{"lo": c.lo, "hi": c.hi} for c in res.changes]
        summary = {"sign_changes": len(rows), "max_p": res.max_value, "argmax_p": res.argmax,
                   "samples": res.samples}
        return Result(rows, ["lo", "hi"], summary=summary)
    if cmd == "verify-corollary":
        return Result([_corollary(args, cfg, integrals).as_dict()], single=True)
    if cmd == "tail":
        a_const = args.a_const if args.a_const is not None else calibrate_tail_constant(
            args.delta, cfg.a_von_koch_c)
        tb = tail_bound(args.y, args.delta, a_const)
        t = t_of_delta(args.delta, a_const, cap=cfg.y_cap)
        return Result([{"delta": args.delta, "y": args.y, "a_const": a_const, "bound": tb.bound,
                        "t_value": t.value, "t_log": t.log_value, "t_overflow": t.overflow}],
                      single=True)
    raise ConfigError(f"unknown command {cmd}")


def _corollary(args, cfg: RunConfig, integrals):
    ev = (SurrogateEvaluator(cfg.delta_max) if args.surrogate
          else SolvedEvaluator(cfg.build_solver(integrals)))
    rel = args.relation
    if rel == "product":
        _require(args, "deltas")
        return product_relation(ev, args.deltas)
    if rel == "canonical":
        _require(args, "primes", "exponents")
        return canonical_product_demo(ev, args.primes, args.exponents)
    if rel == "division":
        _require(args, "delta1", "delta2", "n")
        return division_relation(ev, args.delta1, args.delta2, args.n)
    if rel == "equal-parts":
        _require(args, "delta", "k", "l")
        return equal_parts_check(ev, args.delta, args.k, args.l, args.mode)
    if rel == "slope":
        _require(args, "delta", "n")
        return mean_slope_check(ev, args.delta, args.n, args.mode)
    _require(args, "delta", "alpha0", "r", "indices")
    return general_sequence_check(ev, args.delta, args.alpha0, args.r, args.indices, args.mode)


def _cache(args, cfg: RunConfig, warnings) -> Result:
    if not cfg.cache_path:
        raise ConfigError("no cache path configured (use --cache-path or PRIMEREM_CACHE)")
    cache = CheckpointCache(cfg.cache_path, max_x=cfg.max_x)
    if cache.discarded:
        warnings.append(f"checkpoint cache {cache.discarded}")
    if args.action == "clear":
        cache.clear()
    elif args.action == "warm":
        engine = cfg.build_engine()
        engine.cache = cache
        for x in args.xs:
            engine.pi_sublinear(x)
    rows = [{"x": r.x, "pi": r.pi, "prime_sum": r.prime_sum} for r in cache.records()]
    return Result(rows, ["x", "pi", "prime_sum"], summary={"path": str(cache.path),
                                                           "records": len(rows)})


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config({k: getattr(args, k) for k in _CONFIG_KEYS}, config_file=args.config_file)
    except ConfigError as exc:
        print(f"primerem: config error: {exc}", file=sys.stderr)
        return 2
    warnings: list[str] = []
    try:
        result = run(args, cfg, warnings)
    except ConfigError as exc:
        print(f"primerem: config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, RangeError) as exc:
        print(f"primerem: {exc}", file=sys.stderr)
        return 1
    except PrimeremError as exc:
        print(f"primerem: {exc}", file=sys.stderr)
        return 1
    for w in warnings:
        print(f"primerem: warning: {w}", file=sys.stderr)
    emit(sys.stdout, args.command, cfg.as_dict(), result, warnings, cfg.output_format)
    return 0


if __name__ == "__main__":
    sys.exit(main())
