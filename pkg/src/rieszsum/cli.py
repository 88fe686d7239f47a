"""Command line interface.

    rieszsum verify --case voronoi --x 10.5 --tol 1e-3
    rieszsum scan --case t3_2 --field Qsqrt:5 --rho 1 --x-min 3.5 --x-max 9.5 --points 7
    rieszsum gfun --m 2 --rho 0 --y 1
    rieszsum fit --case t3_3 --field Qsqrt:5 --q 3 --h 1 --rho 1.5
    rieszsum table --field Qsqrt:5 --n-max 30

Exit status: 0 success, 1 usage or hypothesis error, 2 the series or
quadrature did not settle, 3 the identity check ran but missed tolerance.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import contextmanager

import numpy as np

from . import arith, bigo, identities, meijer
from .arith import FieldContext
from .characters import DirichletCharacter
from .errors import DegenerateGrid, HypothesisError, NonConvergence
from .identities import RieszCase, TruncationPolicy, _num

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGENCE, EXIT_MISMATCH = 0, 1, 2, 3
COMMANDS = ("verify", "scan", "gfun", "fit", "table")
BOOLEAN_FLAGS = ("sharp", "iterated", "timing")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _case_args(p):
    p.add_argument("--case", choices=identities.KINDS, required=True)
    p.add_argument("--field", default=None, help="Q or Qsqrt:<d>")
    p.add_argument("--disc", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--chi", type=int, default=None,
                   help="character index j (chi(g^k) = e^(2 pi i j k/(q-1))), default 2")
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--weight", type=int, default=None, help="corollary: override w_D")


def _trunc_args(p):
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--max-m", type=int, default=None)
    p.add_argument("--sharp", action="store_true", help="plain partial sums")
    p.add_argument("--iterated", action="store_true",
                   help="double series as iterated sharp sums")
    p.add_argument("--order", choices=("mn", "nm"), default="mn")
    p.add_argument("--tol", type=float, default=1e-6)


def _output_args(p, formats=("json", "csv"), default="json"):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rieszsum", description="Verify Riesz-sum divisor identities.")
    parser.add_argument("--config", default=None, help="key=value file; flags win")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    v = sub.add_parser("verify", help="check one identity at one x")
    _case_args(v)
    v.add_argument("--x", type=float, required=True)
    _trunc_args(v)
    v.add_argument("--timing", action="store_true", help="include wall-clock seconds")
    _output_args(v)

    s = sub.add_parser("scan", help="verify over a grid of x, one CSV row per x")
    _case_args(s)
    s.add_argument("--x-min", type=float, required=True)
    s.add_argument("--x-max", type=float, required=True)
    s.add_argument("--points", type=int, default=10)
    _trunc_args(s)
    _output_args(s, default="csv")

    g = sub.add_parser("gfun", help="evaluate a G-kernel at one point")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--rho", type=float, required=True)
    g.add_argument("--y", type=float, required=True)
    g.add_argument("--c", type=float, default=meijer.DEFAULT_ABSCISSA)
    g.add_argument("--method", choices=("mellin_barnes", "bessel_closed_form", "asymptotic"),
                   default="mellin_barnes")
    _output_args(g, formats=("json",))

    f = sub.add_parser("fit", help="error-term growth against the proven exponent")
    _case_args(f)
    f.add_argument("--x-min", type=float, default=20.0)
    f.add_argument("--x-max", type=float, default=200.0)
    f.add_argument("--points", type=int, default=24)
    _output_args(f, default="csv")

    t = sub.add_parser("table", help="coefficient tables")
    t.add_argument("--field", default=None)
    t.add_argument("--disc", type=int, default=None)
    t.add_argument("--n-max", type=int, default=30)
    _output_args(t, default="csv")
    return parser


def _read_config(path: str) -> list[str]:
    tokens = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, val = (part.strip() for part in line.split("=", 1))
            key = key.replace("_", "-")
            if key == "command":
                tokens.insert(0, val)
            elif key in BOOLEAN_FLAGS:
                if val.lower() in ("1", "true", "yes", "on"):
                    tokens.append(f"--{key}")
            else:
                tokens += [f"--{key}", val]
    return tokens


def _merge_config(argv: list[str]) -> list[str]:
    """Config tokens go first so that explicit flags, parsed later, win."""
    argv = list(argv)
    cfg = None
    if "--config" in argv:
        i = argv.index("--config")
        if i + 1 >= len(argv):
            raise UsageError("--config needs a path")
        cfg = argv[i + 1]
        del argv[i: i + 2]
    if cfg is None:
        return argv
    tokens = _read_config(cfg)
    cmd_cfg = tokens.pop(0) if tokens and tokens[0] in COMMANDS else None
    cmd = next((a for a in argv if a in COMMANDS), None) or cmd_cfg
    if cmd is None:
        raise UsageError("no command given")
    rest = [a for a in argv if a != cmd]
    return [cmd] + tokens + rest


def _make_case(a) -> RieszCase:
    kind = a.case
    rho = a.rho
    if kind in ("voronoi", "ramanujan"):
        if rho not in (None, 0.0):
            raise HypothesisError(f"{kind} is the rho = 0 identity")
        rho = 0.0
    elif rho is None:
        raise HypothesisError("--rho is required for this case")
    field = FieldContext.parse(a.field) if a.field else None
    if kind in identities.FIELD_KINDS and field is None:
        if a.disc is not None:
            field = FieldContext.from_disc(a.disc)
        else:
            raise HypothesisError("--field (Q or Qsqrt:<d>) is required for this case")
    disc = a.disc if kind in identities.DISC_KINDS else None
    if kind in identities.DISC_KINDS and disc is None:
        if field is not None and field.disc is not None:
            disc = field.disc
        else:
            raise HypothesisError("--disc is required for this case")
    chi = None
    if kind in identities.CHI_KINDS:
        if a.q is None:
            raise HypothesisError("--q is required for this case")
        if not arith.is_prime(a.q):
            raise HypothesisError("q must be prime")
        chi = DirichletCharacter(a.q, 2 if a.chi is None else a.chi)
    h = q = None
    if kind in identities.THETA_KINDS:
        if a.q is None or a.h is None:
            raise HypothesisError("--q and --h are required for this case")
        h, q = a.h, a.q
    if kind in ("voronoi", "ramanujan"):
        field = None
    return RieszCase(kind, rho=rho, field=field, disc=disc, chi=chi, h=h, q=q,
                     weight=getattr(a, "weight", None))


def _make_trunc(a, case: RieszCase) -> TruncationPolicy:
    base = identities.default_policy(case)
    kw = {}
    if a.max_n is not None:
        kw["max_n"] = a.max_n
        kw["start_n"] = min(base.start_n, a.max_n)
    if a.sharp:
        kw["window"] = "sharp"
    if a.iterated:
        kw["iterated"] = True
        if a.max_m is not None:
            kw["max_m"] = a.max_m
        if a.max_n is not None:
            kw["max_inner"] = a.max_n
        kw["order"] = a.order
    fields = {**base.__dict__, **kw}
    return TruncationPolicy(**fields)


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _dump_json(obj, fh):
    fh.write(json.dumps(obj, indent=2) + "\n")


def _verify(a) -> int:
    case = _make_case(a)
    trunc = _make_trunc(a, case)
    try:
        if case.kind == "corollary":
            rep = identities.corollary_rd(case.disc, case.h, case.q, case.rho, a.x, trunc,
                                          a.tol, weight=case.weight)
        else:
            rep = identities.verify(case, a.x, trunc, a.tol)
    except NonConvergence as exc:
        best = exc.best
        if isinstance(best, identities.VerificationReport):
            with _output(a.out) as fh:
                _dump_json({"error": "nonconvergence", "best": best.to_dict()}, fh)
        print(f"rieszsum: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    with _output(a.out) as fh:
        if a.format == "json":
            _dump_json(rep.to_dict(timing=a.timing), fh)
        else:
            w = csv.writer(fh)
            w.writerow(["level", "partial", "residual"])
            for n, v in rep.rhs_series_partials:
                w.writerow([_num(n), _num(np.real(v)), _num(abs(rep.lhs - rep.rhs_main - v))])
    return EXIT_OK if rep.converged else EXIT_MISMATCH


def _scan(a) -> int:
    case = _make_case(a)
    trunc = _make_trunc(a, case)
    if a.points < 1 or a.x_max < a.x_min:
        raise UsageError("need --points >= 1 and --x-max >= --x-min")
    xs = np.linspace(a.x_min, a.x_max, a.points)
    status = EXIT_OK
    rows = []
    with _output(a.out) as fh:
        w = csv.writer(fh) if a.format == "csv" else None
        if w:
            w.writerow(["x", "lhs", "rhs_main", "series", "residual", "tail_estimate",
                        "converged"])
        for x in xs:
            try:
                rep = identities.verify(case, float(x), trunc, a.tol)
            except NonConvergence:
                status = EXIT_NONCONVERGENCE
                continue
            if not rep.converged and status == EXIT_OK:
                status = EXIT_MISMATCH
            row = [_num(x), _num(np.real(rep.lhs)), _num(np.real(rep.rhs_main)),
                   _num(np.real(rep.rhs_series_partials[-1][1])), _num(rep.residual),
                   _num(rep.tail_estimate), str(rep.converged).lower()]
            if w:
                w.writerow(row)
                fh.flush()
            else:
                rows.append(rep.to_dict())
        if not w:
            _dump_json(rows, fh)
    return status


def _gfun(a) -> int:
    spec = meijer.MeijerKernelSpec(a.m, a.rho, c=a.c)
    if a.method == "mellin_barnes":
        kv = meijer.g_kernel(spec, a.y)
    elif a.method == "bessel_closed_form":
        if a.m != 2:
            raise HypothesisError("the closed form is for m = 2")
        val = meijer.g_kernel_bessel_m2(a.rho, a.y)
        kv = meijer.KernelValue(val, 1e-15 * abs(val), "bessel_closed_form")
    else:
        v, e = meijer.asymptotic(a.m, a.rho, a.y)
        kv = meijer.KernelValue(float(v[0]), float(e[0]), "asymptotic")
    with _output(a.out) as fh:
        _dump_json({"m": _num(a.m), "rho": _num(a.rho), "y": _num(a.y),
                    "value": _num(kv.value), "est_abs_error": _num(kv.est_abs_error),
                    "method": kv.method}, fh)
    return EXIT_OK


def _fit(a) -> int:
    case = _make_case(a)
    grid = bigo.default_grid(a.points, a.x_min, a.x_max)
    fit = bigo.fit_exponent(case, grid)
    with _output(a.out) as fh:
        if a.format == "csv":
            w = csv.writer(fh)
            w.writerow(["x", "error", "normalized"])
            norm = fit.normalized or [None] * len(fit.grid)
            for x, e, nv in zip(fit.grid, fit.errors, norm):
                w.writerow([_num(x), _num(e), "" if nv is None else _num(nv)])
        else:
            _dump_json({
                "case": identities._jsonable(case.describe()),
                "fitted_slope": _num(fit.fitted_slope),
                "theory_slope": None if fit.theory_slope is None else _num(fit.theory_slope),
                "normalized_sup": None if fit.normalized_sup is None else _num(fit.normalized_sup),
                "bounded_over_top_half": (None if fit.normalized is None
                                          else fit.bounded_over_top_half()),
                "masked": _num(fit.masked),
            }, fh)
    return EXIT_OK


def _table(a) -> int:
    if (a.field is None) == (a.disc is None):
        raise UsageError("give exactly one of --field and --disc")
    N = a.n_max
    if N < 1:
        raise UsageError("--n-max must be positive")
    if a.field is not None:
        ctx = FieldContext.parse(a.field)
        cols = {"f_K": arith.f_K_table(ctx, N), "D_K": arith.big_D_K_table(ctx, N)}
    else:
        arith.check_fundamental(a.disc)
        cols = {"kronecker": arith.kronecker_table(a.disc, N),
                "d_chi_D": arith.d_chi_D_table(a.disc, N),
                "script_D": arith.script_D_table(a.disc, N)}
    with _output(a.out) as fh:
        if a.format == "csv":
            w = csv.writer(fh)
            w.writerow(["n"] + list(cols))
            for n in range(1, N + 1):
                w.writerow([n] + [int(c[n]) for c in cols.values()])
        else:
            _dump_json({k: [str(int(v)) for v in c[1:]] for k, c in cols.items()}, fh)
    return EXIT_OK


HANDLERS = {"verify": _verify, "scan": _scan, "gfun": _gfun, "fit": _fit, "table": _table}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_merge_config(argv))
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        return HANDLERS[args.command](args)
    except (UsageError, HypothesisError, DegenerateGrid, ValueError, OSError) as exc:
        print(f"rieszsum: error: {exc}", file=sys.stderr)
        if isinstance(exc, UsageError):
            print(parser.format_usage(), file=sys.stderr, end="")
        return EXIT_USAGE
    except NonConvergence as exc:
        print(f"rieszsum: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
