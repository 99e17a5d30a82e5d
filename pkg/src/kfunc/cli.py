"""Command-line front end: ``kfunc {verify,deriv,gateaux,flow}``.

Scenarios are INI-style files (``[section]`` headers, ``key = value``
lines).  Every key is also a flag ``--section-key`` that overrides the file;
``--seed``, ``--out`` and ``--tol`` are global.  Exit codes: 0 success,
1 identity or convergence failure, 2 usage or configuration error.
"""

import argparse
import configparser
import csv
import io
import sys

import numpy as np

from . import constraint as cons
from . import functionals as fn
from .decompose import l_split, shape_split
from .errors import KFuncError, NotConverged
from .flow import FlowOptions, minimize
from .gateaux import directional
from .grid import Grid, inner, make_field
from .kderiv import WeightChoice, k_derivative, project_change, u_derivative
from .verify_suite import default_context, run_all

DEFAULTS = {
    "run": {"seed": "0", "out": "", "tol": ""},
    "grid": {"n": "200", "length": "1.0", "periodic": "true"},
    "constraint": {"name": "identity", "p": "2.0", "h_slope": "1.0", "K": "1.0"},
    "functional": {"label": "square", "kappa": "1.0", "k": "1", "b": "square"},
    "field": {"profile": "affine", "a": "1.0", "b": "0.5", "c": "1.0", "k": "1", "seed": "", "extend": "false"},
    "delta": {"profile": "sine", "a": "1.0", "b": "0.0", "c": "1.0", "k": "1", "seed": ""},
    "q": {"profile": "constant", "a": "1.0", "b": "0.0", "c": "1.0", "k": "1", "seed": ""},
    "deriv": {"weight": "f_of_rho", "split": "false"},
    "gateaux": {"eps": "1e-3, 5e-4", "tol": "1e-6", "projected": "false"},
    "flow": {"eta0": "0.1", "tol": "1e-8", "max_iter": "10000", "extend_initial": "false", "plot": ""},
    "verify": {"samples": "5"},
}

# constraint name -> factory(section); tests may register extra entries
CONSTRAINTS = {
    "identity": lambda s: cons.identity(),
    "power": lambda s: cons.power(s.getfloat("p")),
    "exponential": lambda s: cons.exponential(),
    "linear": lambda s: _linear(s.getfloat("h_slope")),
}


def _linear(slope):
    if slope <= -1.0:
        raise ValueError(f"h_slope must exceed -1 so that h = 1 + h_slope*x stays positive on [0, 1], got {slope}")
    return cons.weighted_linear(lambda x: 1.0 + slope * x, label=f"1+{slope:g}x")


class UsageError(KFuncError):
    pass


def _flag(section, key):
    return f"--{key}" if section == "run" else f"--{section}-{key}".replace("_", "-")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario file (INI-style)")
    for section, keys in DEFAULTS.items():
        for key in keys:
            common.add_argument(_flag(section, key), dest=f"{section}.{key}", default=None,
                                metavar=key.upper())
    parser = argparse.ArgumentParser(prog="kfunc", description="Constrained functional derivatives on 1-D grids.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the identity suite")
    sub.add_parser("deriv", parents=[common], help="constrained derivative of a scenario as CSV")
    sub.add_parser("gateaux", parents=[common], help="directional derivative along the renormalized path")
    sub.add_parser("flow", parents=[common], help="constrained gradient descent trace as CSV")
    return parser


def load_config(args):
    cfg = configparser.ConfigParser(interpolation=None)
    cfg.optionxform = str
    cfg.read_dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                cfg.read_file(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from exc
        except configparser.Error as exc:
            raise UsageError(f"malformed config {args.config!r}: {exc}") from exc
    for section, keys in DEFAULTS.items():
        for key in keys:
            value = getattr(args, f"{section}.{key}")
            if value is not None:
                cfg[section][key] = value
    for section in cfg.sections():
        if section not in DEFAULTS:
            raise UsageError(f"unknown config section [{section}]")
        unknown = set(cfg[section]) - set(DEFAULTS[section])
        if unknown:
            raise UsageError(f"unknown key(s) {sorted(unknown)} in section [{section}]")
    return cfg


def _get(section, key, conv):
    raw = section[key]
    try:
        return conv(raw)
    except ValueError as exc:
        raise UsageError(f"invalid value {raw!r} for [{section.name}] {key}: {exc}") from exc


def _bool(raw):
    v = raw.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


class Scenario:
    """Resolved configuration: grid, constraint, functional and fields."""

    def __init__(self, cfg):
        self.cfg = cfg
        run = cfg["run"]
        self.seed = _get(run, "seed", int)
        self.out = run["out"] or None
        self.tol = _get(run, "tol", float) if run["tol"].strip() else None
        g = cfg["grid"]
        n = _get(g, "n", int)
        length = _get(g, "length", float)
        if n < 2 or n > 10**6:
            raise UsageError(f"[grid] n must be in [2, 1e6], got {n}")
        if not length > 0:
            raise UsageError(f"[grid] length must be positive, got {length}")
        self.grid = Grid(n, length, _get(g, "periodic", _bool))

        c = cfg["constraint"]
        name = c["name"]
        if name not in CONSTRAINTS:
            raise UsageError(f"unknown constraint {name!r}; choose from {sorted(CONSTRAINTS)}")
        try:
            self.constraint = CONSTRAINTS[name](c)
        except ValueError as exc:
            raise UsageError(f"[constraint] {exc}") from exc
        self.K = cons.check_k(_get(c, "K", float))

        f = cfg["functional"]
        try:
            self.functional = fn.from_label(f["label"], c=self.constraint, kappa=_get(f, "kappa", float),
                                            k=_get(f, "k", int), b=f["b"])
        except ValueError as exc:
            raise UsageError(f"[functional] {exc}") from exc

        self.rho = self.field("field")
        if _get(cfg["field"], "extend", _bool):
            self.rho = cons.extend(self.rho, self.constraint, self.K)

    def field(self, section):
        s = self.cfg[section]
        seed = _get(s, "seed", int) if s["seed"].strip() else self.seed
        try:
            return make_field(self.grid, s["profile"], a=_get(s, "a", float), b=_get(s, "b", float),
                              c=_get(s, "c", float), k=_get(s, "k", int), seed=seed)
        except ValueError as exc:
            raise UsageError(f"[{section}] {exc}") from exc

    def weight(self):
        choice = self.cfg["deriv"]["weight"].strip()
        if choice == "f_of_rho":
            return WeightChoice.f_of_rho()
        if choice.startswith("point:"):
            try:
                i = int(choice.split(":", 1)[1])
            except ValueError as exc:
                raise UsageError(f"[deriv] weight {choice!r}: node index must be an integer") from exc
            if not 0 <= i < self.grid.n:
                raise UsageError(f"[deriv] weight {choice!r}: node index outside 0..{self.grid.n - 1}")
            return WeightChoice.point(i)
        if choice == "q":
            return WeightChoice.custom(self.field("q"))
        raise UsageError(f"[deriv] unknown weight {choice!r}; use f_of_rho, point:<i> or q")


# --- output -----------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- subcommands ---------------------------------------------------------------------

def cmd_verify(sc):
    samples = _get(sc.cfg["verify"], "samples", int)
    constraints = cons.builtin_constraints()
    if sc.constraint.name not in {c.name for c in constraints}:
        constraints.append(sc.constraint)
    ctx = default_context(sc.seed, grid=sc.grid, constraints=constraints, samples=samples)
    report = run_all(sc.seed, ctx)
    print(report.format())
    if sc.out:
        write_csv(sc.out, ["identity", "residual", "tol", "passed"],
                  [(r.id, r.residual, r.tol, int(r.passed)) for r in report.rows])
    return 0 if report.passed else 1


def cmd_deriv(sc):
    tol = sc.tol if sc.tol is not None else cons.MEMBERSHIP_TOL
    rho, c, K = sc.rho, sc.constraint, sc.K
    g = sc.functional.gradient(rho)
    w = sc.weight()
    if w.kind == "f_of_rho":
        kd = k_derivative(g, rho, c, K, tol)
    else:
        kd = u_derivative(g, rho, c, w, K=K, tol=tol)
    header = ["x", "rho", "grad", "k_deriv"]
    cols = [sc.grid.nodes, rho.values, g.values, kd.values]
    if _get(sc.cfg["deriv"], "split", _bool):
        if c.is_linear:
            h = sc.grid.field(c.linear_weight(sc.grid.nodes))
            split = l_split(g, rho, h, cons.k_value(rho, c), tol)
        else:
            split = shape_split(g, rho)
        header += ["n_part", "shape_part"]
        cols += [split.n_part.values, np.full(sc.grid.n, split.shape_part)]
    write_csv(sc.out, header, zip(*cols))
    return 0


def cmd_gateaux(sc):
    gs = sc.cfg["gateaux"]
    try:
        eps = tuple(float(e) for e in gs["eps"].split(","))
    except ValueError as exc:
        raise UsageError(f"[gateaux] eps must be a comma-separated list of numbers: {exc}") from exc
    tol = sc.tol if sc.tol is not None else _get(gs, "tol", float)
    rho, c, K, A = sc.rho, sc.constraint, sc.K, sc.functional
    delta = sc.field("delta")
    if _get(gs, "projected", _bool):
        delta = project_change(delta, rho, c, K)
    probe = directional(A, rho, delta, c, K, eps, tol, require_convergence=False)
    ip = inner(k_derivative(A.gradient(rho), rho, c, K), delta)
    rows = [("estimate", e, d) for e, d in zip(probe.eps_schedule, probe.estimates)]
    rows += [
        ("extrapolated", "", probe.value),
        ("inner_product", "", ip),
        ("residual", "", abs(probe.value - ip)),
        ("spread", "", probe.spread),
        ("status", "", "Converged" if probe.converged else "NotConverged"),
    ]
    write_csv(sc.out, ["kind", "eps", "value"], rows)
    if not probe.converged:
        err = NotConverged(f"NotConverged: estimates disagree by {probe.spread:.3g} > tol {tol:g}")
        print(f"kfunc: {err}", file=sys.stderr)
        return 1
    return 0


def cmd_flow(sc):
    fs = sc.cfg["flow"]
    opts = FlowOptions(
        eta0=_get(fs, "eta0", float),
        tol=sc.tol if sc.tol is not None else _get(fs, "tol", float),
        max_iter=_get(fs, "max_iter", int),
        extend_initial=_get(fs, "extend_initial", _bool),
    )
    trace = minimize(sc.functional, sc.rho, sc.constraint, sc.K, opts)
    write_csv(sc.out, ["iter", "energy", "K", "residual", "eta"],
              [(r.iteration, r.energy, r.k, r.residual, r.eta) for r in trace.records])
    print(f"status={trace.status.value} iterations={trace.iterations} mu={trace.mu:.17g}", file=sys.stderr)
    if fs["plot"]:
        from .plotting import plot_trace

        plot_trace(trace, fs["plot"])
    return 0


COMMANDS = {"verify": cmd_verify, "deriv": cmd_deriv, "gateaux": cmd_gateaux, "flow": cmd_flow}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        scenario = Scenario(load_config(args))
        return COMMANDS[args.command](scenario)
    except (KFuncError, ValueError, IndexError) as exc:
        name = type(exc).__name__
        msg = str(exc)
        print(f"kfunc: {msg if msg.startswith(name) else f'{name}: {msg}'}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
