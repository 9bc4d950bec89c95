"""Command-line entry point: ``roughspace {norm,apply,verify,check,sweep} ...``.

Exit codes: 0 on success or PASS, 1 on a FAIL verdict, 2 on usage or
input errors.  Every CSV file starts with a ``# config`` comment recording
the resolved arguments (the worker count is left out, it only affects speed).
"""

import argparse
import math
import sys

import numpy as np

from . import verify as V
from .errors import ConvergenceError, DomainError, PreconditionError, SpecParseError
from .exponents import (ExponentField, check_alpha_assumptions, check_decay_condition,
                        check_local_log_holder, sobolev_conjugate)
from .grid import maximal_radii
from .norms import (campanato_norm, generalized_morrey_norm, luxemburg_norm, morrey_norm,
                    vanishing_modulus)
from .operators import (OperatorConfig, commutator, fractional_maximal, riesz_potential,
                        rough_maximal, singular_integral)
from .reports import ConditionReport
from .specs import (parse_centers, parse_domain, parse_exponent, parse_function,
                    parse_kernel, parse_radii, parse_suite, parse_weight)

SPACES = ("lebesgue", "morrey", "gen-morrey", "vanishing", "campanato")
OPS = ("riesz", "maximal", "singular", "commutator:T", "commutator:M", "commutator:I",
       "commutator:M_alpha")
ESTIMATES = ("hedberg", "domination", "spanne", "adams", "commutator", "chi-scaling",
             "power-weight-scaling", "ball-norm-scaling", "size-condition")
CONDITIONS = ("positivity", "vanishing", "zygmund", "alpha-assumptions", "log-holder")
SWEEP_OPS = ("identity", "riesz", "maximal", "singular")


class UsageError(Exception):
    """Bad command line; the message names the offending flag."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def num(v):
    """12 significant digits, independent of the locale."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.11e" % v


def value_text(v):
    return "%.12f" % float(v)


# --------------------------------------------------------------- argv
def _common(p):
    p.add_argument("--domain", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out")
    p.add_argument("--centers")
    p.add_argument("--radii")


def _add(p, *flags):
    for fl in flags:
        p.add_argument(fl)


def build_parser():
    top = _Parser(prog="roughspace", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("norm", help="function-space norm of one function")
    _common(p)
    p.add_argument("--space", required=True, choices=SPACES)
    _add(p, "--p", "--lambda", "--w", "--gamma", "--f", "--r")

    p = sub.add_parser("apply", help="apply an operator and write one row per cell")
    _common(p)
    p.add_argument("--op", required=True, choices=OPS)
    _add(p, "--kernel", "--alpha", "--f", "--b")
    p.add_argument("--singular-cell-rule", default="analytic-correction",
                   choices=("analytic-correction", "excise"))
    p.add_argument("--literal-abs-b", action="store_true")

    p = sub.add_parser("verify", help="empirical check of a pointwise estimate or scaling law")
    _common(p)
    p.add_argument("--estimate", required=True, choices=ESTIMATES)
    _add(p, "--kernel", "--alpha", "--p", "--q", "--q1", "--p1", "--p2", "--gamma", "--f",
         "--b", "--suite", "--point", "--z", "--s", "--r")
    p.add_argument("--tol", type=float)
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--ball-volume-factor", action="store_true")
    p.add_argument("--singular-cell-rule", default="analytic-correction",
                   choices=("analytic-correction", "excise"))

    p = sub.add_parser("check", help="admissibility check for weights and exponents")
    _common(p)
    p.add_argument("--condition", required=True, choices=CONDITIONS)
    _add(p, "--w", "--w1", "--w2", "--p", "--q", "--alpha", "--gamma", "--lambda", "--p-inf")
    p.add_argument("--log-factor", action="store_true")
    p.add_argument("--bound", type=float)

    p = sub.add_parser("sweep", help="empirical operator norm over a function suite")
    _common(p)
    p.add_argument("--op", required=True, choices=SWEEP_OPS)
    _add(p, "--kernel", "--alpha", "--p", "--q", "--suite")
    return top


# ------------------------------------------------------------- context
class Context:
    """Parsed specs, built lazily so that errors name the flag that caused them."""

    def __init__(self, args):
        self.args = args
        self.E = parse_domain(args.domain)

    def flag(self, name):
        return getattr(self.args, name.lstrip("-").replace("-", "_"), None)

    def need(self, name):
        v = self.flag(name)
        if v is None:
            raise UsageError(f"{name} is required for this command")
        return v

    def exponent(self, name, required=True, default=None):
        spec = self.need(name) if required else self.flag(name)
        if spec is None:
            return default
        return parse_exponent(spec, self.E, name, name=name.lstrip("-"))

    def function(self, name="--f"):
        return parse_function(self.need(name), self.E, name)

    def weight(self, name="--w", required=True):
        spec = self.need(name) if required else self.flag(name)
        return None if spec is None else parse_weight(spec, self.E, name)

    def kernel(self, mean_zero=False):
        return parse_kernel(self.need("--kernel"), self.E.n, "--kernel", mean_zero)

    def config(self, mean_zero=False, alpha_required=False):
        alpha = self.exponent("--alpha", required=alpha_required)
        rule = self.flag("--singular-cell-rule") or "analytic-correction"
        return OperatorConfig(self.kernel(mean_zero), alpha=alpha, singular_cell_rule=rule,
                              literal_abs_b=bool(self.flag("--literal-abs-b")))

    def centers(self, default="lattice:16"):
        return parse_centers(self.flag("--centers") or default, self.E)

    def radii(self, default="dyadic"):
        return parse_radii(self.flag("--radii") or default, self.E)

    def radii_or_none(self):
        spec = self.flag("--radii")
        return None if spec is None else parse_radii(spec, self.E)

    def point(self, name="--point", default=None):
        spec = self.flag(name)
        if spec is None:
            if default is None:
                return np.asarray(self.E.points[self.E.size // 2], dtype=float)
            return np.asarray(default, dtype=float)
        try:
            v = np.array([float(t) for t in spec.split(",")])
        except ValueError:
            raise SpecParseError(f"{name}: expected comma-separated numbers, got {spec!r}") from None
        if v.size != self.E.n or not self.E.contains(v):
            raise SpecParseError(f"{name}: {spec!r} is not a point of the domain")
        return v

    def number(self, name, default=None):
        spec = self.flag(name)
        if spec is None:
            if default is None:
                raise UsageError(f"{name} is required for this command")
            return default
        try:
            return float(spec)
        except ValueError:
            raise SpecParseError(f"{name}: expected a number, got {spec!r}") from None

    def suite(self, nonnegative):
        spec = self.flag("--suite")
        if spec is None and self.flag("--f") is not None:
            f = self.function()
            return [f.absolute() if nonnegative else f]
        return parse_suite(spec or f"random:{self.args.seed},20", self.E, "--suite",
                           nonnegative=nonnegative)


def config_line(args):
    items = {k: v for k, v in sorted(vars(args).items()) if v is not None and v is not False}
    return "# config " + " ".join(f"{k}={v}" for k, v in items.items())


def write_csv(path, header, names, cols, stream):
    lines = [header, ",".join(names)]
    cols = [np.asarray(c) for c in cols]
    for i in range(len(cols[0]) if cols else 0):
        lines.append(",".join(c[i] if c.dtype.kind in "US" else num(c[i]) for c in cols))
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stream.write(text)


# ------------------------------------------------------------ commands
def _point_fields(E, x):
    return [float(c) for c in np.atleast_1d(x)]


def cmd_norm(ctx, out):
    a, E = ctx.args, ctx.E
    f = ctx.function()
    p = ctx.exponent("--p")
    if a.space == "lebesgue":
        res = luxemburg_norm(f, p)
        names, row = ["value"], [res.value]
    else:
        centers = ctx.centers(default="all")
        if a.space == "vanishing":
            r = ctx.number("--r", default=float(ctx.radii().min()))
            v = vanishing_modulus(f, p, ctx.weight(), centers, r)
            names, row = ["value", "r"], [v, r]
        else:
            radii = ctx.radii()
            if a.space == "morrey":
                res = morrey_norm(f, p, ctx.exponent("--lambda"), centers, radii)
            elif a.space == "gen-morrey":
                res = generalized_morrey_norm(f, p, ctx.weight(), centers, radii)
            else:
                gamma = ctx.exponent("--gamma", required=False,
                                     default=ExponentField.constant(E, 0.0, name="gamma"))
                res = campanato_norm(f, p, gamma, centers, radii)
            x, r = res.at
            names = ["value"] + ["x", "y"][: E.n] + ["r"]
            row = [res.value] + _point_fields(E, x) + [r]
    out.write(",".join([value_text(row[0])] + [repr(float(v)) for v in row[1:]]) + "\n")
    if a.out:
        write_csv(a.out, config_line(a), names, [[v] for v in row], out)
    return 0


def cmd_apply(ctx, out):
    a, E = ctx.args, ctx.E
    f = ctx.function()
    op = a.op
    if op == "riesz":
        g = riesz_potential(f, ctx.config(alpha_required=True))
    elif op == "maximal":
        cfg = ctx.config()
        radii = ctx.radii(default="maximal")
        g = (fractional_maximal(f, cfg, radii) if cfg.alpha is not None
             else rough_maximal(f, cfg, radii))
    elif op == "singular":
        g = singular_integral(f, ctx.config(mean_zero=True))
    else:
        which = op.split(":", 1)[1]
        b = ctx.function("--b")
        cfg = ctx.config(mean_zero=which == "T", alpha_required=which in ("I", "M_alpha"))
        radii = ctx.radii(default="maximal") if which in ("M", "M_alpha") else None
        g = commutator(b, f, which, cfg, radii=radii)
    # repr keeps every bit so the file reads back to the same grid function.
    lines = [config_line(a)]
    for pt, v in zip(E.points, g.values):
        lines.append(",".join(repr(float(c)) for c in pt) + "," + repr(float(v)))
    text = "\n".join(lines) + "\n"
    if a.out:
        with open(a.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def _precondition_flag(estimate):
    return {"spanne": "--q", "commutator": "--q", "adams": "--alpha"}.get(estimate, "--alpha")


def run_estimate(ctx):
    a, E = ctx.args, ctx.E
    est = a.estimate
    refine = not a.no_refine
    if est == "hedberg":
        cfg = ctx.config(alpha_required=True)
        suite = ctx.suite(nonnegative=True)
        centers = ctx.centers() if a.centers else None
        tol = V.HEDBERG_TOL if a.tol is None else a.tol
        reps = [V.verify_hedberg(f, cfg, ctx.radii_or_none(), centers, tol,
                                 ball_volume_factor=a.ball_volume_factor) for f in suite]
        return max(reps, key=lambda r: (not r.passed, r.constant))
    if est == "domination":
        return V.verify_domination(ctx.suite(nonnegative=True), ctx.config(alpha_required=True),
                                   ctx.radii_or_none(), refine=refine)
    if est == "spanne":
        return V.verify_spanne_pointwise(ctx.function(), ctx.exponent("--p"),
                                         ctx.exponent("--q", required=False),
                                         ctx.config(alpha_required=True), ctx.centers(),
                                         ctx.radii_or_none(), refine=refine)
    if est == "adams":
        return V.verify_adams_pointwise(ctx.function(), ctx.exponent("--p"),
                                        ctx.config(alpha_required=True), ctx.radii_or_none(),
                                        ctx.centers(), refine=refine)
    if est == "commutator":
        gamma = ctx.exponent("--gamma", required=False,
                             default=ExponentField.constant(E, 0.0, name="gamma"))
        return V.verify_commutator_pointwise(
            ctx.function("--b"), ctx.function(), ctx.exponent("--p1"), ctx.exponent("--p2"),
            ctx.exponent("--q", required=False), ctx.exponent("--q1", required=False), gamma,
            ctx.config(alpha_required=True), ctx.centers(), ctx.radii_or_none(), refine=refine)
    tol = V.SLOPE_TOL if a.tol is None else a.tol
    if est == "chi-scaling":
        return V.verify_chi_scaling(ctx.exponent("--p"), ctx.point(), ctx.radii_or_none(), tol)
    if est == "power-weight-scaling":
        return V.verify_power_weight_scaling(ctx.exponent("--alpha"), ctx.exponent("--p"),
                                             ctx.point(), ctx.radii_or_none(), tol)
    if est == "ball-norm-scaling":
        kernel = ctx.kernel()
        s = ctx.number("--s", default=kernel.s)
        z = ctx.point("--z") if a.z is not None else None
        return V.verify_ball_norm_scaling(kernel, E, ctx.point(), ctx.radii_or_none(), s, z,
                                          tol)
    return V.verify_size_condition(ctx.function(), ctx.config(alpha_required=True),
                                   ctx.point(), ctx.number("--r"))


def _report(ctx, report, out):
    names, cols = report.columns()
    write_csv(ctx.args.out, config_line(ctx.args), names, cols, out)
    out.write(report.verdict(fmt=num) + "\n")
    return 0 if report.passed else 1


def cmd_verify(ctx, out):
    try:
        report = run_estimate(ctx)
    except PreconditionError as exc:
        raise SpecParseError(f"{_precondition_flag(ctx.args.estimate)}: {exc}") from None
    return _report(ctx, report, out)


def _flag_row(passed, value, label):
    v = np.array([value])
    return ConditionReport(label, np.array([math.nan]), v, np.array([math.nan]), float(value),
                           bool(passed), "bounded" if passed else "violated")


def run_condition(ctx):
    a, E = ctx.args, ctx.E
    cond = a.condition
    if cond == "positivity":
        return V.check_weight_positivity(ctx.weight(), E, ctx.centers(), ctx.radii())
    if cond == "vanishing":
        return V.check_vanishing_condition(ctx.weight(), ctx.exponent("--p"), ctx.centers(),
                                           ctx.radii())
    if cond == "zygmund":
        p = ctx.exponent("--p")
        w2 = ctx.weight("--w2", required=False)
        # With an explicit w2 and no q, q = p.
        q = ctx.exponent("--q", required=False, default=p if w2 is not None else None)
        alpha = ctx.exponent("--alpha", required=False,
                             default=ExponentField.constant(E, 0.0, name="alpha"))
        return V.check_zygmund(ctx.weight("--w1"), w2, p, q, alpha,
                               ctx.exponent("--gamma", required=False), a.log_factor,
                               ctx.centers(), ctx.radii())
    if cond == "alpha-assumptions":
        alpha, p = ctx.exponent("--alpha"), ctx.exponent("--p")
        lam = ctx.exponent("--lambda", required=False)
        ok = check_alpha_assumptions(alpha, p, lam)
        top = alpha.values * p.values + (0.0 if lam is None else lam.values)
        rep = _flag_row(ok, float(top.max()), cond)
        rep.details["alpha_lower"] = alpha.lower
        if ok:
            rep.details["q_upper"] = sobolev_conjugate(p, alpha, lam=lam).upper
        return rep
    p = ctx.exponent("--p")
    kw = {} if a.bound is None else {"bound": a.bound}
    ok, c = check_local_log_holder(p, **kw)
    if a.p_inf is not None:
        ok_d, c_d = check_decay_condition(p, ctx.number("--p-inf"), **kw)
        ok = ok and ok_d
        c = max(c, c_d)
    return _flag_row(ok, c, cond)


def cmd_check(ctx, out):
    try:
        report = run_condition(ctx)
    except PreconditionError as exc:
        raise SpecParseError(f"--{ctx.args.condition}: {exc}") from None
    return _report(ctx, report, out)


def cmd_sweep(ctx, out):
    a, E = ctx.args, ctx.E
    p = ctx.exponent("--p")
    suite = ctx.suite(nonnegative=False)
    if a.op == "identity":
        def op(f):
            return f
        q_default = p
    elif a.op == "riesz":
        cfg = ctx.config(alpha_required=True)

        def op(f):
            return riesz_potential(f, cfg)
        q_default = None
    elif a.op == "maximal":
        cfg = ctx.config()
        radii = maximal_radii(E)

        def op(f):
            return (fractional_maximal(f, cfg, radii) if cfg.alpha is not None
                    else rough_maximal(f, cfg, radii))
        q_default = p if cfg.alpha is None else None
    else:
        cfg = ctx.config(mean_zero=True)

        def op(f):
            return singular_integral(f, cfg)
        q_default = p
    q = ctx.exponent("--q", required=False, default=q_default)
    if q is None:
        q = sobolev_conjugate(p, cfg.alpha)
    names = [f.name for f in suite]
    src = [luxemburg_norm(f, p).value for f in suite]
    tgt = [luxemburg_norm(op(f), q).value if s > 0 else 0.0 for f, s in zip(suite, src)]
    ratio = [t / s if s > 0 else math.nan for s, t in zip(src, tgt)]
    c = V.empirical_operator_norm(op, [f for f, s in zip(suite, src) if s > 0],
                                  lambda f: luxemburg_norm(f, p).value,
                                  lambda g: luxemburg_norm(g, q).value)
    write_csv(a.out, config_line(a), ["function", "source", "target", "ratio"],
              [np.array(names), src, tgt, ratio], out)
    ok = math.isfinite(c)
    out.write(f"{'PASS' if ok else 'FAIL'} C_emp={num(c)} refine=nan\n")
    return 0 if ok else 1


COMMANDS = {"norm": cmd_norm, "apply": cmd_apply, "verify": cmd_verify, "check": cmd_check,
            "sweep": cmd_sweep}


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](Context(args), out)
    except (UsageError, DomainError, ConvergenceError) as exc:
        err.write(f"roughspace: error: {exc}\n")
    except OSError as exc:
        err.write(f"roughspace: error: --out: {exc}\n")
    return 2


if __name__ == "__main__":
    sys.exit(main())
