"""Command-line interface.

Structured results are printed (or written with ``--out``) as JSON, spectrum
curves as CSV.  Floats are written with 17 significant digits so that runs
are byte-reproducible.  Failures print one JSON line to stderr and exit with
status 2 without touching any output file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from fractions import Fraction

from . import constructions as cons
from . import oracle
from .debruijn import build_graph, endpoint_reports
from .dimension import BlockAlphabet, eggleston_dimension, moran_dimension
from .shift_core import NumericalError, PccFunction, PreconditionError, word_str
from .thermo import (
    endpoint_dimension,
    norm_continuity_check,
    one_sided_slopes,
    spectrum_curve,
)


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _encode(obj) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (float, Fraction)):
        x = float(obj)
        return fmt_float(x) if math.isfinite(x) else "null"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "tolist"):
        return _encode(obj.tolist())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    return _encode(obj) + "\n"


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".birkspec-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _floats(text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"expected comma-separated integers, got {text!r}") from None


def _positive(x: float, name: str):
    if not x > 0:
        raise CliError(f"--{name} must be positive")


# ---------------------------------------------------------------------------
# handlers


def cmd_endpoints(a):
    f = PccFunction.load(a.input)
    lo, hi = endpoint_reports(f)
    return dumps(
        {
            "alpha_star_min": lo.mean,
            "alpha_star_max": hi.mean,
            "witness_min": word_str(lo.witness.period_word),
            "witness_max": word_str(hi.witness.period_word),
        }
    )


def cmd_spectrum(a):
    if a.grid < 3:
        raise CliError("--grid must be at least 3")
    curve = spectrum_curve(PccFunction.load(a.input), a.grid)
    rows = ["alpha,s"]
    rows += [f"{fmt_float(x)},{fmt_float(s)}" for x, s in curve.samples]
    return "\n".join(rows) + "\n"


def cmd_endpoint_dim(a):
    f = PccFunction.load(a.input)
    return dumps({"side": a.side, "dimension": endpoint_dimension(f, a.side)})


def cmd_derivative(a):
    deltas = _floats(a.deltas)
    if not deltas or any(d <= 0 for d in deltas):
        raise CliError("--deltas must be positive")
    curve = spectrum_curve(PccFunction.load(a.input), 3)
    slopes = one_sided_slopes(curve, a.side, deltas)
    return dumps({"side": a.side, "deltas": deltas, "slopes": slopes})


def cmd_construct(a):
    kind = a.kind
    if kind == "example-indicator":
        f = cons.example_indicator()
    elif kind == "example23":
        f = cons.example23()
    elif kind == "majority":
        f = cons.remark55_majority(a.k)
    elif kind == "biased":
        f = cons.remark55_biased(a.k)
    elif kind == "lemma53":
        f = cons.lemma53(a.a, a.b, a.L)
    elif kind == "thm52":
        L = _ints(a.L)
        if len(L) != a.levels:
            raise CliError(f"--levels {a.levels} but {len(L)} run lengths given")
        f = cons.theorem52(cons.StaircaseParams(tuple(L)))
    elif kind == "thm41":
        _positive(a.eps, "eps")
        c = cons.theorem41(PccFunction.load(a.base), a.eps, a.ell)
        return dumps(c.to_json())
    elif kind == "lemma45":
        _positive(a.eps, "eps")
        f = cons.lemma45(PccFunction.load(a.base), a.eps, a.depth)
    elif kind == "derevealize":
        _positive(a.eps, "eps")
        f = cons.derevealize(PccFunction.load(a.base), a.eps)
    else:  # pragma: no cover - argparse restricts the choices
        raise CliError(f"unknown construction {kind!r}")
    return dumps(f.to_json())


def cmd_oracle(a):
    kind = a.kind
    if kind == "cycles":
        f = PccFunction.load(a.input)
        rows = oracle.enumerate_cycle_means(f, a.max_period)
        return dumps(
            {
                "cycles": [
                    {"word": word_str(p.period_word), "mean": m} for p, m in rows
                ],
                "max": max(m for _, m in rows),
                "min": min(m for _, m in rows),
            }
        )
    if kind == "count":
        f = PccFunction.load(a.input)
        count = oracle.count_words(f, a.alpha, a.delta, a.N)
        lam = oracle.counting_lambda(f, a.alpha, a.delta, a.N)
        return dumps({"count": count, "lambda": lam})
    if kind == "cover":
        r = oracle.lemma53_cover_check(a.a, a.b, a.L, a.beta, a.N, a.eps)
        return dumps(
            {
                "bound": r.bound,
                "exact_count": r.exact_count,
                "pass": r.passed,
                "beta_star": r.beta_star,
                "threshold": r.threshold,
            }
        )
    if kind == "n0":
        _positive(a.eps, "eps")
        f = PccFunction.load(a.input)
        r = oracle.uniform_N0_check(f, a.eps, a.words, seed=a.seed)
        return dumps(
            {
                "N0": r.N0,
                "empirical_pass": r.passed,
                "worst_excess": r.worst_excess,
                "words": r.n_words,
            }
        )
    if kind == "sample":
        if a.N < 1:
            raise CliError("--N must be positive")
        avg = oracle.sample_trajectory(PccFunction.load(a.input), a.seed, a.N)
        return dumps({"seed": a.seed, "N": a.N, "final": avg[-1], "averages": avg})
    raise CliError(f"unknown oracle {kind!r}")  # pragma: no cover


def cmd_dim(a):
    if a.kind == "moran":
        blocks = BlockAlphabet.load(a.blocks)
        return dumps({"dimension": moran_dimension(blocks)})
    return dumps({"dimension": eggleston_dimension(a.alpha)})


def cmd_check(a):
    _positive(a.eps, "eps")
    f, g = PccFunction.load(a.f), PccFunction.load(a.g)
    r = norm_continuity_check(f, g, a.eps, a.grid)
    return dumps(
        {"pass": r.passed, "worst_gap": r.worst_gap, "worst_alpha": r.worst_alpha}
    )


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="birkspec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_out(q):
        q.add_argument("--out", help="write the result here instead of stdout")
        return q

    q = with_out(sub.add_parser("endpoints", help="support endpoints and witnesses"))
    q.add_argument("--input", required=True)
    q.set_defaults(func=cmd_endpoints)

    q = with_out(sub.add_parser("spectrum", help="spectrum curve as CSV"))
    q.add_argument("--input", required=True)
    q.add_argument("--grid", type=int, default=101)
    q.set_defaults(func=cmd_spectrum)

    q = with_out(sub.add_parser("endpoint-dim", help="spectrum at an endpoint"))
    q.add_argument("--input", required=True)
    q.add_argument("--side", choices=("min", "max"), required=True)
    q.set_defaults(func=cmd_endpoint_dim)

    q = with_out(sub.add_parser("derivative", help="one-sided endpoint slopes"))
    q.add_argument("--input", required=True)
    q.add_argument("--side", choices=("min", "max"), required=True)
    q.add_argument("--deltas", required=True, help="comma-separated offsets")
    q.set_defaults(func=cmd_derivative)

    q = sub.add_parser("construct", help="generate a potential")
    csub = q.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    with_out(csub.add_parser("example-indicator"))
    with_out(csub.add_parser("example23"))
    for name in ("majority", "biased"):
        c = with_out(csub.add_parser(name))
        c.add_argument("--k", type=int, required=True)
    c = with_out(csub.add_parser("lemma53"))
    c.add_argument("--a", type=float, required=True)
    c.add_argument("--b", type=float, required=True)
    c.add_argument("--L", type=int, required=True)
    c = with_out(csub.add_parser("thm52"))
    c.add_argument("--levels", type=int, required=True)
    c.add_argument("--L", required=True, help="comma-separated run lengths")
    c = with_out(csub.add_parser("thm41"))
    c.add_argument("--base", required=True)
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--ell", type=int)
    c = with_out(csub.add_parser("lemma45"))
    c.add_argument("--base", required=True)
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--depth", type=int, required=True)
    c = with_out(csub.add_parser("derevealize"))
    c.add_argument("--base", required=True)
    c.add_argument("--eps", type=float, required=True)
    q.set_defaults(func=cmd_construct)

    q = sub.add_parser("oracle", help="brute-force reference computations")
    osub = q.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    c = with_out(osub.add_parser("cycles"))
    c.add_argument("--input", required=True)
    c.add_argument("--max-period", type=int, required=True)
    c = with_out(osub.add_parser("count"))
    c.add_argument("--input", required=True)
    c.add_argument("--alpha", type=float, required=True)
    c.add_argument("--delta", type=float, required=True)
    c.add_argument("--N", type=int, required=True)
    c = with_out(osub.add_parser("cover"))
    c.add_argument("--a", type=float, required=True)
    c.add_argument("--b", type=float, required=True)
    c.add_argument("--L", type=int, required=True)
    c.add_argument("--beta", type=float, required=True)
    c.add_argument("--N", type=int, required=True)
    c.add_argument("--eps", type=float, default=0.0)
    c = with_out(osub.add_parser("n0"))
    c.add_argument("--input", required=True)
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--words", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c = with_out(osub.add_parser("sample"))
    c.add_argument("--input", required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--N", type=int, required=True)
    q.set_defaults(func=cmd_oracle)

    q = sub.add_parser("dim", help="dimensions of block sets and frequency sets")
    dsub = q.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    c = with_out(dsub.add_parser("moran"))
    c.add_argument("--blocks", required=True)
    c = with_out(dsub.add_parser("eggleston"))
    c.add_argument("--alpha", type=float, required=True)
    q.set_defaults(func=cmd_dim)

    q = sub.add_parser("check", help="property checks between two potentials")
    ksub = q.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    c = with_out(ksub.add_parser("norm-continuity"))
    c.add_argument("--f", required=True)
    c.add_argument("--g", required=True)
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--grid", type=int, default=33)
    q.set_defaults(func=cmd_check)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        text = args.func(args)
        _emit(text, args.out)
    except (CliError, PreconditionError, NumericalError, OSError, ValueError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc).splitlines()[0] if str(exc) else ""}
        sys.stderr.write(json.dumps(err) + "\n")
        return 2
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
