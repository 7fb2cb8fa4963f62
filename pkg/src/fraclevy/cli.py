"""Command-line front end.

Every command writes CSV (default) or JSON to stdout or ``--output``.
Exit status: 0 on success, 2 on bad flags (argparse), 1 on numeric failure
with a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np
from scipy import special

from . import densities as dn
from . import frac_solver as fs
from . import mathai as ma
from .core_special import MLParams, ml_prabhakar
from .errors import DomainError, FracLevyError

FMT = "%.9e"
LIFT_X = 1.0
TABLE_GRID = dict(x_min=0.05, x_max=2.0, n=40)


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "pass" if v else "fail"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return FMT % float(v)


class Table:
    def __init__(self, header):
        self.header = list(header)
        self.rows = []

    def add(self, *row):
        self.rows.append(list(row))

    def render(self, form: str) -> str:
        if form == "json":
            recs = [dict(zip(self.header, (fmt(v) for v in r))) for r in self.rows]
            return json.dumps(recs, indent=2, sort_keys=False) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for r in self.rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()


class TableFailure(FracLevyError):
    def __init__(self, table: Table, message: str):
        super().__init__(message)
        self.table = table


# -- argument helpers ----------------------------------------------------------


def float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def split_tag(text: str) -> tuple[str, list[float]]:
    tag, _, rest = text.partition(":")
    try:
        params = [float(v) for v in rest.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad parameters in {text!r}")
    return tag, params


def parse_forcing(text: str, alpha: float):
    tag, p = split_tag(text)
    try:
        if tag == "one":
            return fs.One()
        if tag == "linear":
            return fs.Linear()
        if tag == "expneg":
            return fs.ExpNeg()
        if tag == "expneg-pow":
            return fs.ExpNegPowAlpha(*p)
        if tag == "power":
            return fs.PowerOverGamma(*p)
        if tag == "prabhakar":
            return fs.PrabhakarForcing(alpha, *p)
        if tag == "levy-power":
            return fs.LevyPower()
        if tag == "levy-prabhakar":
            return fs.LevyPrabhakar(*p)
    except TypeError:
        raise DomainError(f"wrong number of parameters for forcing {tag!r}")
    raise DomainError(
        f"unknown forcing {tag!r}; known: one, linear, expneg, expneg-pow:c, power:mu, "
        "prabhakar:mu,gamma[,c], levy-power, levy-prabhakar:gamma[,c]"
    )


def make_density(args):
    kind = args.kind
    if kind == "gamma":
        return dn.GammaDensity(args.gamma)
    if kind == "gml":
        return dn.GMLDensity(args.alpha, args.gamma)
    if kind == "gengamma":
        return dn.GenGammaDensity(args.alpha, args.gamma)
    if kind == "weibull":
        return dn.WeibullDensity(args.delta, args.b)
    return dn.LevyDensity(args.alpha)


def mellin_closed(d, s: float) -> float:
    if isinstance(d, dn.GMLDensity):
        return dn.mellin_closed_gml(d.alpha, d.gamma, s, strict=False)
    if isinstance(d, dn.GenGammaDensity):
        return dn.gengamma_redundancy_check(d.alpha, d.gamma, s)
    if isinstance(d, dn.GammaDensity):
        return dn.gengamma_redundancy_check(1.0, d.gamma, s)
    if isinstance(d, dn.WeibullDensity):
        return math.exp(-(s - 1) / d.delta * math.log(d.b) + special.gammaln(1 + (s - 1) / d.delta))
    a = d.alpha
    return math.exp(special.gammaln((1 - s) / a) - math.log(a) - special.gammaln(1 - s))


# -- commands ----------------------------------------------------------------------


def cmd_ml(args) -> Table:
    t = Table(["z", "value"])
    t.add(args.z, float(ml_prabhakar(MLParams(args.alpha, args.beta, args.gamma), args.z)))
    return t


def cmd_density(args) -> Table:
    d = make_density(args)
    grid = dn.Grid(args.xmin, args.xmax, args.n, "log" if args.log else "uniform")
    x = grid.points
    t = Table(["x", "value"])
    for xi, v in zip(x, dn.density_eval(d, x)):
        t.add(xi, v)
    return t


def cmd_transform_check(args) -> Table:
    d = make_density(args)
    if args.which == "laplace":
        num, closed = dn.laplace_numeric(d, args.s), dn.laplace_closed(d, args.s)
    else:
        num, closed = dn.mellin_numeric(d, args.s), mellin_closed(d, args.s)
    t = Table(["s", "numeric", "closed", "rel_err"])
    t.add(args.s, num, closed, abs(num - closed) / abs(closed))
    return t


def cmd_limit_study(args) -> Table:
    grid = dn.Grid(args.xmin, args.xmax, args.n)
    t = Table(["gamma", "sup_dist"])
    for g, dist in dn.levy_limit_study(args.alpha, args.gammas, grid):
        t.add(g, dist)
    return t


def _solve_grid(args) -> dn.Grid:
    return dn.Grid(args.xmax / args.n, args.xmax, args.n)


def cmd_solve(args) -> Table:
    spec = fs.FracEqSpec.from_c(args.alpha, args.c, args.n0, parse_forcing(args.forcing, args.alpha))
    grid = _solve_grid(args)
    x = grid.points
    closed = numeric = np.full(x.shape, math.nan)
    if args.method in ("catalog", "both"):
        sol = fs.solve_catalog(spec)
        closed = np.asarray(sol(x), float)
        res = fs.residual_check(sol, spec, grid, args.n_steps).residuals
    if args.method in ("numeric", "both"):
        numeric = fs.solve_numeric(spec, grid, args.n_steps)
        if args.method == "numeric":
            res = fs.residual_check(numeric, spec, grid, args.n_steps).residuals
    t = Table(["x", "n_closed", "n_numeric", "residual"])
    for row in zip(x, closed, numeric, res):
        t.add(*row)
    return t


def read_solution(path: str) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    col = next((header.index(c) for c in ("n", "value", "n_closed", "n_numeric") if c in header), 1)
    xs = np.array([float(r[0]) for r in body])
    ns = np.array([float(r[col]) for r in body])
    if not np.all(np.isfinite(ns)):
        ns = np.array([float(r[header.index("n_numeric")]) for r in body])
    return xs, ns


def cmd_residual(args) -> Table:
    spec = fs.FracEqSpec.from_c(args.alpha, args.c, args.n0, parse_forcing(args.forcing, args.alpha))
    xs, ns = read_solution(args.solution)
    if xs.size < 2 or np.any(np.diff(xs) <= 0) or xs[0] <= 0:
        raise DomainError("solution file needs increasing positive abscissae")
    grid = dn.Grid(xs[0], xs[-1], xs.size)
    if not np.allclose(grid.points, xs, rtol=1e-9, atol=0):
        raise DomainError("solution abscissae must be uniformly spaced")
    rep = fs.residual_check(ns, spec, grid, args.n_steps)
    t = Table(["x", "n", "residual"])
    for row in zip(xs, ns, rep.residuals):
        t.add(*row)
    return t


def cmd_lift(args) -> Table:
    tag, params = split_tag(args.f)
    f = ma.catalog_function(tag, *params)
    res = ma.mathai_transform_limit(f, args.alpha, args.x, args.gammas)
    target = res.target if res.target is not None else math.nan
    t = Table(["gamma", "value", "err"])
    for g, v in zip(res.gammas, res.values):
        t.add(g, v, abs(v - target))
    t.add("inf", res.value, abs(res.value - target))
    return t


def cmd_correspond(args):
    if args.list:
        return json.dumps(ma.correspondence_listing(), indent=2) + "\n"
    if args.f is None or args.alpha is None or args.x is None:
        raise DomainError("correspond needs --f, --alpha and --x (or --list)")
    tag, params = split_tag(args.f)
    t = Table(["alpha", "x", "value"])
    t.add(args.alpha, args.x, ma.correspondence_eval(tag, params, args.alpha, args.x))
    return t


# -- table verification --------------------------------------------------------------


def verify_gengamma_ml(args, t: Table) -> None:
    for row in dn.gengamma_ml_rows(args.alpha, args.gamma):
        for s in (0.5, 1.0, 2.0):
            ml, sub = dn.pair_laplace(row, s)
            err = abs(ml - sub) / abs(ml)
            t.add(f"{row.label}@s={s:g}", ml, err, 1e-6, err <= 1e-6)


def _frac_rows(args, forcings) -> list:
    spec_grid = dn.Grid(**TABLE_GRID)
    out = []
    for label, forcing in forcings:
        spec = fs.FracEqSpec.from_c(args.alpha, args.c, 1.0, forcing)
        rep = fs.residual_check(fs.solve_catalog(spec), spec, spec_grid, 2048)
        out.append((label, rep.scale, rep.relative, 1e-5, rep.passes(1e-5)))
    return out


def plain_forcings(alpha: float, c: float):
    return [
        ("1", fs.One()),
        ("x", fs.Linear()),
        ("exp(-x)", fs.ExpNeg()),
        ("exp(-(cx)^alpha)", fs.ExpNegPowAlpha(c)),
        ("x^(mu-1)/Gamma(mu)", fs.PowerOverGamma(1.5)),
        ("x^(mu-1)E^gamma_(alpha,mu)", fs.PrabhakarForcing(alpha, 1.5, 2.0, c)),
    ]


def levy_forcings(alpha: float, c: float):
    return [
        ("x^(alpha-1)/Gamma(alpha)", fs.LevyPower()),
        ("x^(alpha-1)E^gamma_(alpha,alpha)", fs.LevyPrabhakar(2.0, c)),
    ]


CORRESPONDENCE_ROWS = [
    ("one", ()),
    ("x", ()),
    ("exp", ()),
    ("exp-sum", (1.0, 2.0)),
    ("gamma-density", (2.0, 1.0)),
    ("1f0", (2.0,)),
]


def verify_correspondence(args, t: Table) -> None:
    for tag, params in CORRESPONDENCE_ROWS:
        label = tag + (":" + ",".join(f"{p:g}" for p in params) if params else "")
        f = ma.catalog_function(tag, *params)
        try:
            target = float(f.lifted(args.alpha, np.array([LIFT_X]))[0])
        except FracLevyError:
            t.add(label, math.nan, math.nan, math.nan, False)
            continue
        res = ma.mathai_transform_limit(f, args.alpha, LIFT_X, [16.0, 64.0, 256.0])
        tol = max(res.error, 1e-3 * abs(target))
        err = abs(res.value - target)
        t.add(label, res.value, err, tol, err <= tol)


def cmd_verify_tables(args) -> Table:
    t = Table(["row", "value", "discrepancy", "tolerance", "pass"])
    which = args.which
    if which == "gengamma-ml":
        verify_gengamma_ml(args, t)
    elif which in ("frac-catalog-plain", "frac-catalog-levy", "frac-catalog"):
        forcings = []
        if which != "frac-catalog-levy":
            forcings += plain_forcings(args.alpha, args.c)
        if which != "frac-catalog-plain":
            forcings += levy_forcings(args.alpha, args.c)
        for row in _frac_rows(args, forcings):
            t.add(*row)
    elif which == "correspondence":
        verify_correspondence(args, t)
    if not all(r[-1] for r in t.rows):
        raise TableFailure(t, f"table {which} has failing rows")
    return t


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fraclevy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", default="-", help="file path, or - for stdout")
        return sp

    sp = common(sub.add_parser("ml", help="three-parameter Mittag-Leffler function"))
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--z", type=float, required=True)
    sp.set_defaults(run=cmd_ml)

    def density_flags(sp):
        sp.add_argument("--kind", choices=("gamma", "gml", "gengamma", "weibull", "levy"), required=True)
        sp.add_argument("--alpha", type=float, default=0.5)
        sp.add_argument("--gamma", type=float, default=1.0)
        sp.add_argument("--delta", type=float, default=1.0)
        sp.add_argument("--b", type=float, default=1.0)

    sp = common(sub.add_parser("density", help="density values on a grid"))
    density_flags(sp)
    sp.add_argument("--xmin", type=float, required=True)
    sp.add_argument("--xmax", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--log", action="store_true", help="log-spaced grid")
    sp.set_defaults(run=cmd_density)

    sp = common(sub.add_parser("transform-check", help="numeric vs closed-form transform"))
    density_flags(sp)
    sp.add_argument("--which", choices=("laplace", "mellin"), required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.set_defaults(run=cmd_transform_check)

    sp = common(sub.add_parser("limit-study", help="GML -> Levy sup-norm distances"))
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--gammas", type=float_list, default=[4.0, 16.0, 64.0, 256.0])
    sp.add_argument("--xmin", type=float, default=0.2)
    sp.add_argument("--xmax", type=float, default=5.0)
    sp.add_argument("--n", type=int, default=50)
    sp.set_defaults(run=cmd_limit_study)

    def eq_flags(sp):
        sp.add_argument("--alpha", type=float, required=True)
        sp.add_argument("--c", type=float, default=1.0)
        sp.add_argument("--n0", type=float, default=1.0)
        sp.add_argument("--forcing", required=True, help="TAG[:params], e.g. power:1.5")
        sp.add_argument("--n-steps", type=int, default=2048)

    sp = common(sub.add_parser("solve", help="solve the fractional relaxation equation"))
    eq_flags(sp)
    sp.add_argument("--xmax", type=float, default=2.0)
    sp.add_argument("--n", type=int, default=40)
    sp.add_argument("--method", choices=("catalog", "numeric", "both"), default="both")
    sp.set_defaults(run=cmd_solve)

    sp = common(sub.add_parser("residual", help="residual of a sampled solution"))
    eq_flags(sp)
    sp.add_argument("--xmax", type=float, default=2.0)
    sp.add_argument("--n", type=int, default=40)
    sp.add_argument("--solution", required=True, help="CSV with x in the first column")
    sp.set_defaults(run=cmd_residual)

    sp = common(sub.add_parser("lift", help="finite-gamma Mathai transform and its extrapolation"))
    sp.add_argument("--f", required=True, help="catalog TAG[:params]")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--x", type=float, default=1.0)
    sp.add_argument("--gammas", type=float_list, default=[16.0, 64.0, 256.0])
    sp.set_defaults(run=cmd_lift)

    sp = common(sub.add_parser("correspond", help="alpha-level counterpart of a catalog function"))
    sp.add_argument("--f")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--x", type=float)
    sp.add_argument("--list", action="store_true", help="print the catalog as JSON")
    sp.set_defaults(run=cmd_correspond)

    sp = common(sub.add_parser("verify-tables", help="check a table row by row"))
    sp.add_argument(
        "--which",
        choices=("gengamma-ml", "frac-catalog-plain", "frac-catalog-levy", "frac-catalog", "correspondence"),
        required=True,
    )
    sp.add_argument("--alpha", type=float, default=0.5)
    sp.add_argument("--gamma", type=float, default=2.0)
    sp.add_argument("--c", type=float, default=1.0)
    sp.set_defaults(run=cmd_verify_tables)
    return p


def _emit(text: str, output: str) -> None:
    if output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", newline="") as fh:
            fh.write(text)


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # bad flags, or --help
        return int(exc.code or 0)
    try:
        result = args.run(args)
    except TableFailure as exc:
        _emit(exc.table.render(args.format), args.output)
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except (FracLevyError, ArithmeticError, ValueError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    _emit(result if isinstance(result, str) else result.render(args.format), args.output)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
