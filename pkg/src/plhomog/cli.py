"""Command-line interface.

Every subcommand accepts the problem flags (``--p --eps --k --weight
--coefficient --length --tol --mode``), a JSON ``--config`` whose values are
overridden by explicit flags, and ``--dump-config`` which prints the resolved
configuration instead of running.  Exit status: 0 on success, 2 on usage or
configuration errors, 1 when the solver fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .weight import PRESETS, build_weight, parse_preset

log = logging.getLogger("plhomog")

SUBCOMMANDS = ("solve", "sweep-eps", "sweep-k", "zeros", "bounds", "transform", "trig", "figure")
THEOREMS = ("teo1d", "explicit", "general_eq", "nodal", "linear1d", "all")

DEFAULTS = {
    "p": 2.0,
    "eps": 0.1,
    "k": 1,
    "length": 1.0,
    "weight": "constant,1",
    "coefficient": "constant,1",
    "tol": 1e-8,
    "mode": "phase",
    "eps_list": [2.0 ** -m for m in range(2, 8)],
    "k_list": [1],
    "k_max": 8,
    "points": 201,
    "theorem": "teo1d",
    "dim": 1,
    "figure": 1,
    "resolution": 100,
    "timing": True,
    "workers": None,
}


class ConfigError(ValueError):
    """Invalid configuration value; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class RunConfig:
    """Resolved, validated configuration of one CLI run."""

    subcommand: str
    problem: dict
    k: int
    tol: float
    mode: str
    sweep: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    output_path: str | None = None

    def to_dict(self) -> dict:
        return {"subcommand": self.subcommand, "problem": self.problem, "k": self.k,
                "tol": self.tol, "mode": self.mode, "sweep": self.sweep,
                "options": self.options, "output_path": self.output_path}

    def echo(self) -> dict:
        """Parameters written into output headers (the output path is left out)."""
        d = self.to_dict()
        d.pop("output_path")
        return d

    def spec(self):
        from .prufer import ProblemSpec
        pr = self.problem
        return ProblemSpec.make(pr["p"], pr["weight"], pr["coefficient"], pr["eps"],
                                pr["length"])


# --------------------------------------------------------------------------
# parsing

def _float_list(text: str) -> list[float]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "/" in tok:
            num, den = tok.split("/", 1)
            out.append(float(num) / float(den))
        else:
            out.append(float(tok))
    return out


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _arg_type(conv, what):
    def parse(text):
        try:
            return conv(text)
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"invalid {what}: {text!r}") from None
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("problem")
    g.add_argument("--p", type=float, help="exponent p > 1 (default 2)")
    g.add_argument("--eps", type=_arg_type(lambda s: _float_list(s)[0], "eps"),
                   help="oscillation scale; accepts fractions such as 1/32")
    g.add_argument("--k", type=int, help="eigenvalue index (default 1)")
    g.add_argument("--weight", metavar="NAME[,params]",
                   help=f"weight rho; one of {', '.join(PRESETS)}")
    g.add_argument("--coefficient", metavar="NAME[,params]", help="coefficient a (default constant,1)")
    g.add_argument("--length", type=float, help="interval length (default 1)")
    g.add_argument("--tol", type=float, help="relative bisection tolerance (default 1e-8)")
    g.add_argument("--mode", choices=("phase", "endpoint"), help="shooting mode")
    o = common.add_argument_group("run")
    o.add_argument("--out", help="write CSV output here instead of standard output")
    o.add_argument("--config", help="JSON run configuration; explicit flags override it")
    o.add_argument("--dump-config", action="store_true",
                   help="print the resolved configuration as JSON and exit")
    o.add_argument("--no-timing", dest="timing", action="store_const", const=False,
                   help="write runtime_ms as 0 so reruns are byte-identical")
    o.add_argument("--workers", type=int, help="threads for sweeps (default: available CPUs)")
    o.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(
        prog="plhomog",
        description="Eigenvalues of the 1-D p-Laplacian with rapidly oscillating weights.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True

    sp = sub.add_parser("solve", parents=[common], help="one eigenvalue and eigenfunction")
    sp.add_argument("--points", type=int, help="eigenfunction samples for --out (default 201)")

    sp = sub.add_parser("sweep-eps", parents=[common], help="convergence in eps")
    sp.add_argument("--eps-list", type=_arg_type(_float_list, "eps list"),
                    help="comma-separated eps values (default 1/4,...,1/128)")
    sp.add_argument("--k-list", type=_arg_type(_int_list, "k list"), help="comma-separated k values")

    sp = sub.add_parser("sweep-k", parents=[common], help="convergence in k at fixed eps")
    sp.add_argument("--k-max", type=int, help="largest index (default 8)")

    sp = sub.add_parser("zeros", parents=[common], help="interior zeros against j*l/k")
    sp.add_argument("--eps-list", type=_arg_type(_float_list, "eps list"),
                    help="comma-separated eps values")

    sp = sub.add_parser("bounds", parents=[common], help="error bounds with observed errors")
    sp.add_argument("--theorem", choices=THEOREMS, help="which bound (default teo1d)")
    sp.add_argument("--dim", type=int, help="dimension N for the explicit bound (default 1)")

    sp = sub.add_parser("transform", parents=[common], help="coefficient change of variables")
    sp.add_argument("--points", type=int, help="samples of g written to --out (default 201)")

    sp = sub.add_parser("trig", parents=[common], help="table of sin_p and cos_p")
    sp.add_argument("--points", type=int, help="samples over one period (default 201)")

    sp = sub.add_parser("figure", parents=[common], help="figure data as CSV")
    sp.add_argument("--id", dest="figure", type=int, choices=(1, 2, 3, 4), help="figure number")
    sp.add_argument("--resolution", type=int, help="eps samples for figures 1 and 2")
    return parser


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path!r} is not valid JSON: {exc.msg} "
                          f"(line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return data


def _flatten(data: dict) -> dict:
    """Map a RunConfig JSON document onto flat option names."""
    flat = {}
    known = {"subcommand", "problem", "k", "tol", "mode", "sweep", "options", "output_path"}
    extra = set(data) - known
    if extra:
        raise ConfigError(sorted(extra)[0], "unknown config field")
    problem = data.get("problem", {})
    if not isinstance(problem, dict):
        raise ConfigError("problem", "must be an object")
    for key in ("p", "eps", "length", "weight", "coefficient"):
        if key in problem:
            flat[key] = problem[key]
    extra = set(problem) - {"p", "eps", "length", "weight", "coefficient"}
    if extra:
        raise ConfigError(f"problem.{sorted(extra)[0]}", "unknown field")
    for key in ("k", "tol", "mode"):
        if key in data:
            flat[key] = data[key]
    for sect in ("sweep", "options"):
        body = data.get(sect, {})
        if not isinstance(body, dict):
            raise ConfigError(sect, "must be an object")
        for key, val in body.items():
            if key not in DEFAULTS:
                raise ConfigError(f"{sect}.{key}", "unknown field")
            flat[key] = val
    if data.get("output_path") is not None:
        flat["out"] = data["output_path"]
    return flat


def _number(name, val, kind=float, positive=True):
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(name, f"must be a number, got {val!r}")
    if kind is int and int(val) != val:
        raise ConfigError(name, f"must be an integer, got {val!r}")
    val = kind(val)
    if not math.isfinite(val):
        raise ConfigError(name, "must be finite")
    if positive and val <= 0:
        raise ConfigError(name, f"must be positive, got {val!r}")
    return val


def _preset_text(name, val):
    try:
        pr = parse_preset(val)
        build_weight(pr)
    except ValueError as exc:
        raise ConfigError(name, str(exc)) from None
    return pr.to_dict()


def resolve(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the config file and explicit flags, then validate."""
    vals = dict(DEFAULTS)
    if args.config:
        data = _load_config(args.config)
        sc = data.get("subcommand")
        if sc is not None and sc != args.subcommand:
            raise ConfigError("subcommand", f"config is for {sc!r}, not {args.subcommand!r}")
        vals.update(_flatten(data))
    for key, val in vars(args).items():
        if key in ("subcommand", "config", "dump_config", "verbose") or val is None:
            continue
        vals[key] = val

    p = _number("problem.p", vals["p"])
    if p <= 1:
        raise ConfigError("problem.p", f"must exceed 1, got {p!r}")
    eps = _number("problem.eps", vals["eps"])
    length = _number("problem.length", vals["length"])
    problem = {"p": p, "eps": eps, "length": length,
               "weight": _preset_text("problem.weight", vals["weight"]),
               "coefficient": _preset_text("problem.coefficient", vals["coefficient"])}
    k = _number("k", vals["k"], int)
    tol = _number("tol", vals["tol"])
    mode = vals["mode"]
    if mode not in ("phase", "endpoint"):
        raise ConfigError("mode", f"must be 'phase' or 'endpoint', got {mode!r}")

    sc = args.subcommand
    sweep, options = {}, {}
    if sc in ("sweep-eps", "zeros"):
        el = vals["eps_list"]
        if not isinstance(el, list) or not el:
            raise ConfigError("sweep.eps_list", "must be a non-empty list")
        sweep["eps_list"] = [_number("sweep.eps_list", e) for e in el]
    if sc == "sweep-eps":
        kl = vals["k_list"]
        if not isinstance(kl, list) or not kl:
            raise ConfigError("sweep.k_list", "must be a non-empty list")
        sweep["k_list"] = [_number("sweep.k_list", v, int) for v in kl]
    if sc == "sweep-k":
        sweep["k_max"] = _number("sweep.k_max", vals["k_max"], int)
    if sc in ("sweep-eps", "sweep-k"):
        options["timing"] = bool(vals["timing"])
        if vals["workers"] is not None:
            options["workers"] = _number("options.workers", vals["workers"], int)
    if sc in ("solve", "transform", "trig"):
        options["points"] = _number("options.points", vals["points"], int)
        if options["points"] < 2:
            raise ConfigError("options.points", "need at least 2 samples")
    if sc == "bounds":
        if vals["theorem"] not in THEOREMS:
            raise ConfigError("options.theorem", f"must be one of {', '.join(THEOREMS)}")
        options["theorem"] = vals["theorem"]
        options["dim"] = _number("options.dim", vals["dim"], int)
    if sc == "figure":
        fig = _number("options.figure", vals["figure"], int)
        if fig not in (1, 2, 3, 4):
            raise ConfigError("options.figure", f"must be 1, 2, 3 or 4, got {fig}")
        options["figure"] = fig
        res = _number("options.resolution", vals["resolution"], int)
        if not 2 <= res <= 2000:
            raise ConfigError("options.resolution", f"must lie in [2, 2000], got {res}")
        options["resolution"] = res
    cfg = RunConfig(sc, problem, k, tol, mode, sweep, options, vals.get("out"))
    if sc not in ("trig",):
        try:
            cfg.spec()
        except ValueError as exc:
            raise ConfigError("problem", str(exc)) from None
    return cfg


# --------------------------------------------------------------------------
# subcommands

@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _meta(cfg: RunConfig) -> dict:
    return {"command": cfg.subcommand, "config": cfg.echo()}


def _cmd_solve(cfg: RunConfig):
    from .prufer import reconstruct_eigenfunction, solve_eigen
    from .experiments import _write
    spec = cfg.spec()
    res = solve_eigen(spec, cfg.k, tol=cfg.tol, mode=cfg.mode)
    print(f"lambda {res.lam!r}")
    print(f"sqrt_lambda {math.sqrt(res.lam)!r}")
    print("zeros " + " ".join(repr(z) for z in res.zeros))
    print(f"iterations {res.iterations}")
    print(f"residual {res.residual!r}")
    print(f"route {res.route}")
    if cfg.output_path:
        pairs = reconstruct_eigenfunction(spec, res, samples=cfg.options["points"])
        _write(cfg.output_path, _meta(cfg), ("x", "u"), pairs)


def _cmd_sweep(cfg: RunConfig):
    from .experiments import fit_rate, sweep_eps, sweep_k, write_records_csv
    spec = cfg.spec()
    timing = cfg.options.get("timing", True)
    workers = cfg.options.get("workers")
    if cfg.subcommand == "sweep-eps":
        recs = sweep_eps(spec, cfg.sweep["eps_list"], cfg.sweep["k_list"], cfg.tol, cfg.mode,
                         workers, timing)
        axis = "eps"
    else:
        recs = sweep_k(spec, spec.eps, cfg.sweep["k_max"], cfg.tol, cfg.mode, workers, timing)
        axis = "k"
    with _output(cfg.output_path) as fh:
        write_records_csv(recs, fh, _meta(cfg))
    fits = {}
    if axis == "eps":
        for k in sorted({r.k for r in recs}):
            fits[k] = fit_rate([r for r in recs if r.k == k], "eps", cfg.tol)
    else:
        fits[None] = fit_rate(recs, "k", cfg.tol)
    for k, fit in fits.items():
        label = f"{axis}-slope" + (f" (k={k})" if k is not None else "")
        if fit is None:
            print(f"{label}: skipped, fewer than 4 points above the noise floor", file=sys.stderr)
        else:
            print(f"{label}: {fit.slope:.4f} (r^2 {fit.r_squared:.5f}, {fit.points_used} points)",
                  file=sys.stderr)
    if any(math.isnan(r.lambda_eps) for r in recs):
        return 1
    return 0


def _cmd_zeros(cfg: RunConfig):
    from .experiments import max_deviation_by_eps, track_zeros, write_zero_csv
    spec = cfg.spec()
    table = track_zeros(spec, cfg.sweep["eps_list"], cfg.k, cfg.tol)
    with _output(cfg.output_path) as fh:
        write_zero_csv(table, fh, _meta(cfg))
    for eps, dev in max_deviation_by_eps(table):
        print(f"eps {eps!r}: max deviation {dev:.3e}", file=sys.stderr)


def _cmd_bounds(cfg: RunConfig):
    from . import homog
    from .experiments import _write
    from .prufer import solve_eigen
    spec = cfg.spec()
    k = cfg.k
    lam = solve_eigen(spec, k, tol=cfg.tol, mode=cfg.mode, samples=2).lam
    limit = homog.limit_eigenvalue(homog.LimitSpectrum.from_spec(spec), k)
    err = abs(lam - limit)
    which = cfg.options["theorem"]
    names = [t for t in THEOREMS if t != "all"] if which == "all" else [which]
    rows = []
    unit_a = spec.coefficient.is_constant and float(spec.coefficient.par[0]) == 1.0
    for name in names:
        if name == "teo1d":
            if not unit_a:
                print("teo1d: skipped, it assumes a = 1 (use general_eq)", file=sys.stderr)
                continue
            rep = homog.bound_teo1d(spec.weight, spec.p, spec.eps, k, spec.length, err)
        elif name == "explicit":
            a = spec.coefficient
            rep = homog.bound_explicit(spec.weight, a.lower, a.upper, spec.p,
                                       cfg.options["dim"], spec.eps, k, err)
        elif name == "general_eq":
            from .experiments import applicable_bound
            if unit_a:
                tp = homog.transform_general(spec)
                rep = homog.bound_general_eq(tp, spec.coefficient.upper, spec.weight.lower,
                                             spec.p, spec.eps, k, err)
            else:
                rep = applicable_bound(spec, k, err)
        elif name == "linear1d":
            if spec.p.p != 2.0 or not unit_a:
                print("linear1d: skipped, it needs p = 2 and a = 1", file=sys.stderr)
                continue
            rep = homog.bound_linear1d(spec.weight, spec.eps, k, err)
        else:
            c = homog.teo1d_constant(spec.weight, spec.p)
            d, _ = homog.bound_nodal(k, spec.p, spec.eps, c)
            rep = homog.BoundReport(c, d, "nodal")
        rows.append([rep.which, rep.constant, rep.bound_value, rep.observed_error, rep.ratio])
    print(f"lambda_eps {lam!r}  lambda_limit {limit!r}  abs_err {err!r}", file=sys.stderr)
    with _output(cfg.output_path) as fh:
        _write(fh, _meta(cfg), ("which", "constant", "bound", "observed_error", "ratio"), rows)
    for r in rows:
        print(f"{r[0]:>10}  constant {r[1]:.6g}  bound {r[2]:.6g}  ratio {r[4]:.3g}",
              file=sys.stderr)


def _cmd_transform(cfg: RunConfig):
    from . import homog
    from .experiments import _write
    spec = cfg.spec()
    tp = homog.transform_general(spec)
    for key, val in (("L", tp.L), ("L_eps", tp.L_eps), ("delta", tp.delta),
                     ("a_star", tp.a_star), ("mu_scale", tp.mu_scale),
                     ("g_mean", tp.g.mean)):
        print(f"{key} {val!r}", file=sys.stderr if cfg.output_path is None else sys.stdout)
    z = np.linspace(0.0, 1.0, cfg.options["points"])
    rows = list(zip(z.tolist(), np.asarray(tp.g.evaluate(z), dtype=float).tolist()))
    with _output(cfg.output_path) as fh:
        _write(fh, _meta(cfg), ("z", "g"), rows)


def _cmd_trig(cfg: RunConfig):
    from .experiments import _write
    from .ptrig import PExponent, trig_table
    e = PExponent.of(cfg.problem["p"])
    tab = trig_table(e.p)
    x = np.linspace(0.0, 2.0 * e.pi_p, cfg.options["points"])
    rows = list(zip(x.tolist(), tab.sin(x).tolist(), tab.cos(x).tolist()))
    meta = {"pi_p": e.pi_p, "p_conj": e.p_conj}
    meta.update(_meta(cfg))
    with _output(cfg.output_path) as fh:
        _write(fh, meta, ("x", "sin_p", "cos_p"), rows)


def _cmd_figure(cfg: RunConfig):
    from .experiments import figure_data, write_figure_csv
    payload = figure_data(cfg.options["figure"], cfg.options["resolution"], cfg.tol)
    with _output(cfg.output_path) as fh:
        write_figure_csv(payload, fh, _meta(cfg))


_COMMANDS = {
    "solve": _cmd_solve,
    "sweep-eps": _cmd_sweep,
    "sweep-k": _cmd_sweep,
    "zeros": _cmd_zeros,
    "bounds": _cmd_bounds,
    "transform": _cmd_transform,
    "trig": _cmd_trig,
    "figure": _cmd_figure,
}


def run(argv=None) -> int:
    """Run the CLI on ``argv`` and return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = resolve(args)
    except ConfigError as exc:
        print(f"plhomog: error: {exc}", file=sys.stderr)
        return 2
    if args.dump_config:
        print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))
        return 0
    from .prufer import SolverError
    try:
        status = _COMMANDS[cfg.subcommand](cfg)
    except (SolverError, ArithmeticError) as exc:
        print(f"plhomog: solver failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"plhomog: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"plhomog: cannot write output: {exc}", file=sys.stderr)
        return 2
    return int(status or 0)


def main():
    sys.exit(run())
