"""Experiment runner: named experiments, CSV outputs, reproducibility manifests.

One experiment per invocation.  Every run resolves its full parameter set
(defaults included), executes, writes outputs atomically (temp file + rename),
and drops a ``manifest.json`` next to them recording the resolved parameters,
the seed, the library version, and any ``ERGOSERIES_*`` environment
overrides; identical config and seed reproduce bit-identical CSVs.

Exit codes: 0 success, 2 configuration/schema violation, 3 numerical failure,
4 precision-budget violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .errors import NumericalError, PrecisionBudgetError, SchemaError
from .gibbs import pressure_curve
from .riesz import correlations_exact, hls_criterion, riesz_bounds
from .series import (
    CoefficientSequence,
    ProbeConfig,
    convergence_probe,
    mc_moment,
)
from .torusfn import DEFAULT_GRID_SIZE, TorusFunction
from .transfer import ExpandingMap, decay_profile
from .weierstrass import (
    DICHOTOMY_PROBE,
    WeierstrassSpec,
    classify_point,
    dichotomy_experiment,
    evaluate_F,
)

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_NUMERICAL = 3
EXIT_BUDGET = 4

#: Environment variables that override probe defaults; echoed in manifests.
ENV_OVERRIDES = {
    "ERGOSERIES_PROBE_EPS": ("eps", float),
    "ERGOSERIES_SCALED_EPS": ("scaled_eps", float),
    "ERGOSERIES_ENVELOPE_C": ("envelope_c", float),
}


def _env_probe_config(base: ProbeConfig) -> ProbeConfig:
    kwargs = base.as_dict()
    for var, (key, conv) in ENV_OVERRIDES.items():
        if var in os.environ:
            kwargs[key] = conv(os.environ[var])
    return ProbeConfig(**kwargs)


def _collect_env() -> dict:
    return {k: v for k, v in os.environ.items() if k.startswith("ERGOSERIES_")}


# ---------------------------------------------------------------------------
# argument mini-languages
# ---------------------------------------------------------------------------


def parse_function(token: str, grid_size: int = DEFAULT_GRID_SIZE) -> TorusFunction:
    """A circle function from a token: cosK / sinK / expK / const:V or a file path."""
    token = str(token)
    if os.path.exists(token):
        return TorusFunction.from_text(token, grid_size)
    low = token.lower()
    for prefix, builder in (
        ("cos", TorusFunction.cosine),
        ("sin", TorusFunction.sine),
        ("exp", TorusFunction.exponential),
    ):
        if low.startswith(prefix) and low[len(prefix):].lstrip("-").isdigit():
            return builder(int(low[len(prefix):]), grid_size=grid_size)
    if low.startswith("const:"):
        return TorusFunction.constant(float(token.split(":", 1)[1]), grid_size)
    raise SchemaError(
        f"cannot parse function {token!r}: use cosK, sinK, expK, const:V, or a coefficient file"
    )


def parse_coefficients(token: str, length: int) -> CoefficientSequence:
    """Coefficient rule from a token: power:A, const:C, or explicit:v0,v1,..."""
    token = str(token)
    if token.startswith("power:"):
        return CoefficientSequence.power(float(token.split(":", 1)[1]), length)
    if token.startswith("const:"):
        return CoefficientSequence.constant(float(token.split(":", 1)[1]), length)
    if token.startswith("explicit:"):
        vals = [complex(v) for v in token.split(":", 1)[1].split(",")]
        return CoefficientSequence.explicit(vals)
    raise SchemaError(
        f"cannot parse coefficient rule {token!r}: use power:A, const:C, or explicit:v0,v1,..."
    )


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def write_csv(path: str, header: list[str], rows: list[tuple]) -> None:
    """CSV with repr-formatted floats so identical runs are bit-identical."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, float):
                cells.append(repr(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_manifest(out_dir: str, experiment: str, params: dict, outputs: list[str]) -> str:
    manifest = {
        "schema_version": 1,
        "experiment": experiment,
        "params": params,
        "outputs": outputs,
        "library_version": __version__,
        "env_overrides": _collect_env(),
    }
    path = os.path.join(out_dir, "manifest.json")
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return path


def _out_path(args, default_name: str) -> str:
    out = getattr(args, "out", None) or default_name
    out_dir = getattr(args, "out_dir", ".") or "."
    if not os.path.isabs(out):
        out = os.path.join(out_dir, out)
    return out


# ---------------------------------------------------------------------------
# experiments (shared by subcommands and config-driven runs)
# ---------------------------------------------------------------------------


def run_decay(params: dict) -> tuple[list[str], list[tuple], dict]:
    q = int(params.get("q", 3))
    n_max = int(params.get("n_max", 30))
    f = parse_function(params.get("f", "cos1"))
    prof = decay_profile(ExpandingMap(q), f, n_max)
    rows = [
        (n, float(lo), float(hi))
        for n, (lo, hi) in enumerate(zip(prof.sup_lower, prof.sup_upper))
    ]
    extra = {
        "fitted_rate": prof.fitted_rate,
        "sum_upper": prof.sum_upper,
        "condition_strong": prof.condition_strong,
        "condition_weak": prof.condition_weak,
    }
    return ["n", "sup_lower", "sup_upper"], rows, extra


def run_pressure(params: dict) -> tuple[list[str], list[tuple], dict]:
    q = int(params.get("q", 3))
    g = parse_function(params.get("g", "cos1"))
    t_min = float(params.get("t_min", -1.0))
    t_max = float(params.get("t_max", 1.0))
    t_step = float(params.get("t_step", 0.01))
    n_steps = int(round((t_max - t_min) / t_step))
    ts = t_min + t_step * np.arange(n_steps + 1)
    curve = pressure_curve(ExpandingMap(q), g, ts, grid_size=int(params.get("grid_size", 1944)))
    rows = [(float(t), float(p), float(m)) for t, p, m in zip(curve.ts, curve.P, curve.m)]
    return ["t", "P", "m_t"], rows, {"convexity_cert": curve.convexity_cert, **curve.diagnostics}


def run_moments(params: dict) -> tuple[list[str], list[tuple], dict]:
    q = int(params.get("q", 3))
    n = int(params.get("n", 10))
    f = parse_function(params.get("f", "exp1"))
    a = parse_coefficients(params.get("a", "power:1"), max(n, 1))
    p = float(params.get("p", 4))
    samples = int(params.get("samples", 100000))
    seed = int(params.get("seed", 0))
    report = mc_moment(f, ExpandingMap(q), a, n, p, samples, seed)
    rows = [(report.p, report.estimate, report.std_error, report.bound, report.passed)]
    return ["p", "estimate", "std_error", "bound", "passed"], rows, {"slack": report.slack}


def run_probe(params: dict) -> tuple[list[str], list[tuple], dict]:
    q = int(params.get("q", 3))
    n_max = int(params.get("n_max", 50))
    f = parse_function(params.get("f", "cos1"))
    a = parse_coefficients(params.get("a", "power:1"), n_max)
    x = float(params.get("x", 0.37))
    cfg = _env_probe_config(ProbeConfig())
    verdict = convergence_probe(f, ExpandingMap(q), a, x, n_max, cfg)
    rows = [
        (
            x,
            verdict.verdict,
            verdict.route,
            "" if verdict.value is None else repr(complex(verdict.value)),
            "" if verdict.tail_bound is None else float(verdict.tail_bound),
        )
    ]
    return ["x", "verdict", "route", "value", "tail_bound"], rows, verdict.diagnostics


def run_bounds(params: dict) -> tuple[list[str], list[tuple], dict]:
    q = int(params.get("q", 3))
    f = parse_function(params.get("f", "cos1"))
    orders = [int(v) for v in str(params.get("orders", "8,16,32,64")).split(",")]
    corr = correlations_exact(ExpandingMap(q), f, max(orders))
    rb = riesz_bounds(corr, orders)
    rows = [
        (N, float(lo), float(hi))
        for N, lo, hi in zip(rb.orders, rb.lambda_min, rb.lambda_max)
    ]
    extra = {"a_sq_est": rb.a_sq_est, "b_sq_est": rb.b_sq_est, "is_riesz": rb.is_riesz}
    return ["N", "lambda_min", "lambda_max"], rows, extra


def run_hls(params: dict) -> tuple[list[str], list[tuple], dict]:
    token = str(params.get("c", "power:2"))
    if token.startswith("explicit:"):
        # hls tokens list c_1, c_2, ...; the sequence stores them from index 1
        token = "explicit:0," + token.split(":", 1)[1]
    c = parse_coefficients(token, int(params.get("length", 64)))
    report = hls_criterion(
        c,
        sigma_min=float(params.get("sigma_min", 0.05)),
        sigma_max=float(params.get("sigma_max", 4.0)),
        t_max=float(params.get("t_max", 50.0)),
        sigma_steps=int(params.get("sigma_steps", 40)),
        t_steps=int(params.get("t_steps", 201)),
        zero_threshold=float(params.get("zero_threshold", 0.1)),
    )
    rows = [
        (
            report.inf_interval[0],
            report.inf_interval[1],
            report.sup_interval[0],
            report.sup_interval[1],
            report.verdict,
        )
    ]
    header = ["inf_lower", "inf_upper", "sup_lower", "sup_upper", "verdict"]
    return header, rows, {"grid": report.grid, "conditions": report.conditions}


def run_dichotomy(params: dict) -> tuple[list[str], list[tuple], dict]:
    alphas = [float(v) for v in str(params.get("alphas", "0.3,0.75,1.2")).split(",")]
    samples = int(params.get("samples", 500))
    n_max = int(params.get("n_max", 50))
    seed = int(params.get("seed", 11))
    cfg = _env_probe_config(DICHOTOMY_PROBE)
    rows_out = []
    for row in dichotomy_experiment(alphas, samples, seed, n_max, cfg):
        rows_out.append((row.alpha, row.frac_differentiable, row.frac_inconclusive))
    return ["alpha", "frac_differentiable", "frac_inconclusive"], rows_out, {
        "probe": cfg.as_dict(),
        "samples": samples,
        "n_max": n_max,
    }


def run_classify(params: dict) -> tuple[list[str], list[tuple], dict]:
    n_max = int(params.get("n_max", 50))
    f_prime = parse_function(params.get("f_prime", "cos1"))
    a = parse_coefficients(params.get("a", "power:1"), max(n_max, 60))
    x = float(params.get("x", 0.125))
    # integrate the derivative profile to get f
    coeffs = {
        int(nf): amp / (2j * np.pi * nf)
        for nf, amp in f_prime.coeffs_dict().items()
        if nf != 0
    }
    if abs(f_prime.coeff(0)) > 0:
        raise SchemaError("derivative profile must have zero mean")
    f = TorusFunction(coeffs, f_prime.grid_size)
    spec = WeierstrassSpec.from_f(f, a)
    verdict = classify_point(spec, x, N_max=min(n_max, a.length))
    rows = [
        (
            x,
            verdict.verdict,
            verdict.series.verdict,
            verdict.quotient.verdict,
            "" if verdict.value is None else repr(complex(verdict.value)),
            "" if verdict.error_bar is None else float(verdict.error_bar),
        )
    ]
    header = ["x", "verdict", "series_verdict", "quotient_verdict", "value", "error_bar"]
    return header, rows, {"routes_agree": verdict.routes_agree}


REPRODUCE_ALPHAS = (-0.5, 0.3, 0.75, 1.2)


def run_reproduce(params: dict) -> tuple[list[str], list[tuple], dict]:
    """The four-regime qualitative table over the weight families n^-alpha."""
    samples = int(params.get("samples", 500))
    n_max = int(params.get("n_max", 50))
    seed = int(params.get("seed", 11))
    alphas = params.get("alphas", ",".join(str(a) for a in REPRODUCE_ALPHAS))
    alphas = [float(v) for v in str(alphas).split(",")]
    cfg = _env_probe_config(DICHOTOMY_PROBE)
    rows = []
    for row in dichotomy_experiment(alphas, samples, seed, n_max, cfg):
        rows.append(
            (row.alpha, row.regime, row.frac_differentiable, row.frac_inconclusive)
        )
    header = ["alpha", "regime", "frac_differentiable", "frac_inconclusive"]
    return header, rows, {"probe": cfg.as_dict(), "samples": samples, "n_max": n_max}


EXPERIMENTS = {
    "decay": (run_decay, {"q", "n_max", "f"}),
    "pressure": (run_pressure, {"q", "g", "t_min", "t_max", "t_step", "grid_size"}),
    "moments": (run_moments, {"q", "n", "f", "a", "p", "samples", "seed"}),
    "probe": (run_probe, {"q", "n_max", "f", "a", "x"}),
    "bounds": (run_bounds, {"q", "f", "orders"}),
    "hls": (
        run_hls,
        {"c", "length", "sigma_min", "sigma_max", "t_max", "sigma_steps", "t_steps", "zero_threshold"},
    ),
    "dichotomy": (run_dichotomy, {"alphas", "samples", "n_max", "seed"}),
    "classify": (run_classify, {"x", "a", "f_prime", "n_max"}),
    "reproduce_table": (run_reproduce, {"alphas", "samples", "n_max", "seed"}),
}

_DEFAULT_OUTPUT = {
    "decay": "profile.csv",
    "pressure": "pressure.csv",
    "moments": "moments.csv",
    "probe": "probe.csv",
    "bounds": "bounds.csv",
    "hls": "hls.csv",
    "dichotomy": "dichotomy.csv",
    "classify": "classify.csv",
    "reproduce_table": "table.csv",
}


def run_experiment(experiment: str, params: dict, out_dir: str, out: str | None = None) -> dict:
    """Validate, execute, and persist one experiment; returns the summary."""
    if experiment not in EXPERIMENTS:
        raise SchemaError(
            f"unknown experiment {experiment!r}; known: {sorted(EXPERIMENTS)}"
        )
    fn, allowed = EXPERIMENTS[experiment]
    unknown = set(params) - allowed
    if unknown:
        raise SchemaError(f"unknown parameter(s) for {experiment}: {sorted(unknown)}")
    header, rows, extra = fn(params)
    os.makedirs(out_dir, exist_ok=True)
    out_path = out or os.path.join(out_dir, _DEFAULT_OUTPUT[experiment])
    write_csv(out_path, header, rows)
    resolved = dict(params)
    resolved["_defaults_note"] = "absent keys ran at their documented defaults"
    manifest_path = write_manifest(out_dir, experiment, resolved, [out_path])
    return {
        "experiment": experiment,
        "output": out_path,
        "manifest": manifest_path,
        "rows": len(rows),
        "extra": extra,
    }


def run_config_file(path: str, out_dir: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise SchemaError("config must be a JSON object")
    top_unknown = set(config) - {"experiment", "params", "schema_version", "out"}
    if top_unknown:
        raise SchemaError(f"unknown top-level config key(s): {sorted(top_unknown)}")
    if "experiment" not in config:
        raise SchemaError("config is missing the 'experiment' key")
    if int(config.get("schema_version", 1)) != 1:
        raise SchemaError("unsupported config schema_version")
    return run_experiment(
        config["experiment"], dict(config.get("params", {})), out_dir, config.get("out")
    )


# ---------------------------------------------------------------------------
# plotting
# ---------------------------------------------------------------------------


def plot_weierstrass(specs: list[tuple[str, WeierstrassSpec]], path: str, resolution: int = 2048):
    """Render the real part of each F on [0, 1) to a static vector file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = np.arange(resolution) / resolution
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for label, spec in specs:
        ys = [evaluate_F(spec, float(x), abs_tol=1e-10)[0].real for x in xs]
        ax.plot(xs, ys, lw=0.7, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("Re F(x)")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


# ---------------------------------------------------------------------------
# argument parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergoseries",
        description=(
            "Numerics for ergodic series on the circle: transfer-operator decay, "
            "Gibbs pressure, series moments and probes, frame bounds, and the "
            "differentiability dichotomy. Conventions: the circle is [0,1); "
            "spectral densities are relative to the unit-mass length measure."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the experiment seed")
    common.add_argument(
        "--threads",
        type=int,
        default=1,
        help="recorded in the manifest; computations are deterministic and single-threaded",
    )
    common.add_argument("--out-dir", default=".", help="directory for outputs and manifest")

    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(group, name, help_):
        return group.add_parser(name, help=help_, parents=[common])

    p = sub.add_parser("transfer", help="transfer-operator experiments")
    ps = p.add_subparsers(dest="subcommand", required=True)
    d = leaf(ps, "decay", "sup-norm decay profile of L^n f")
    d.add_argument("--q", type=int, default=3)
    d.add_argument("--f", default="cos1")
    d.add_argument("--n-max", type=int, default=30)
    d.add_argument("--out", default=None)

    p = sub.add_parser("gibbs", help="Gibbs-measure experiments")
    ps = p.add_subparsers(dest="subcommand", required=True)
    g = leaf(ps, "pressure", "pressure curve for exp(t*g) potentials")
    g.add_argument("--q", type=int, default=3)
    g.add_argument("--g", default="cos1")
    g.add_argument("--t-min", type=float, default=-1.0)
    g.add_argument("--t-max", type=float, default=1.0)
    g.add_argument("--t-step", type=float, default=0.01)
    g.add_argument("--grid-size", type=int, default=1944)
    g.add_argument("--out", default=None)

    p = sub.add_parser("series", help="weighted orbit-series experiments")
    ps = p.add_subparsers(dest="subcommand", required=True)
    pr = leaf(ps, "probe", "pointwise convergence probe")
    pr.add_argument("--q", type=int, default=3)
    pr.add_argument("--f", default="cos1")
    pr.add_argument("--a", default="power:1")
    pr.add_argument("--x", type=float, default=0.37)
    pr.add_argument("--n-max", type=int, default=50)
    pr.add_argument("--out", default=None)
    mo = leaf(ps, "moments", "Monte-Carlo moment vs concentration bound")
    mo.add_argument("--q", type=int, default=3)
    mo.add_argument("--f", default="exp1")
    mo.add_argument("--a", default="power:1")
    mo.add_argument("--n", type=int, default=10)
    mo.add_argument("--p", type=float, default=4)
    mo.add_argument("--samples", type=int, default=100000)
    mo.add_argument("--out", default=None)

    p = sub.add_parser("riesz", help="frame-bound and density experiments")
    ps = p.add_subparsers(dest="subcommand", required=True)
    b = leaf(ps, "bounds", "extremal Toeplitz eigenvalues per order")
    b.add_argument("--q", type=int, default=3)
    b.add_argument("--f", default="cos1")
    b.add_argument("--orders", default="8,16,32,64")
    b.add_argument("--out", default=None)
    h = leaf(ps, "hls", "Dirichlet-series boundedness on a half-plane grid")
    h.add_argument("--c", default="power:2")
    h.add_argument("--length", type=int, default=64)
    h.add_argument("--sigma-min", type=float, default=0.05)
    h.add_argument("--sigma-max", type=float, default=4.0)
    h.add_argument("--t-max", type=float, default=50.0)
    h.add_argument("--out", default=None)

    p = sub.add_parser("weier", help="self-affine function experiments")
    ps = p.add_subparsers(dest="subcommand", required=True)
    di = leaf(ps, "dichotomy", "pointwise differentiability rates per alpha")
    di.add_argument("--alphas", default="0.3,0.75,1.2")
    di.add_argument("--samples", type=int, default=500)
    di.add_argument("--n-max", type=int, default=50)
    di.add_argument("--out", default=None)
    di.add_argument("--plot", default=None, help="render the functions to an SVG/PDF file")
    di.add_argument("--plot-resolution", type=int, default=2048)
    cl = leaf(ps, "classify", "classify one point by both routes")
    cl.add_argument("--x", type=float, default=0.125)
    cl.add_argument("--a", default="power:1")
    cl.add_argument("--f-prime", default="cos1")
    cl.add_argument("--n-max", type=int, default=50)
    cl.add_argument("--out", default=None)
    cl.add_argument("--plot", default=None)
    cl.add_argument("--plot-resolution", type=int, default=2048)

    r = sub.add_parser("reproduce", help="emit the four-regime dichotomy table", parents=[common])
    r.add_argument("--samples", type=int, default=500)
    r.add_argument("--n-max", type=int, default=50)
    r.add_argument("--out", default=None)

    ru = sub.add_parser("run", help="run an experiment from a JSON config file", parents=[common])
    ru.add_argument("config", help="path to the config JSON")

    return parser


def _dispatch(args) -> dict:
    seed_override = {} if args.seed is None else {"seed": args.seed}
    if args.command == "run":
        return run_config_file(args.config, args.out_dir)
    if args.command == "transfer":
        params = {"q": args.q, "f": args.f, "n_max": args.n_max}
        return run_experiment("decay", params, args.out_dir, _opt_out(args))
    if args.command == "gibbs":
        params = {
            "q": args.q,
            "g": args.g,
            "t_min": args.t_min,
            "t_max": args.t_max,
            "t_step": args.t_step,
            "grid_size": args.grid_size,
        }
        return run_experiment("pressure", params, args.out_dir, _opt_out(args))
    if args.command == "series":
        if args.subcommand == "probe":
            params = {"q": args.q, "f": args.f, "a": args.a, "x": args.x, "n_max": args.n_max}
            return run_experiment("probe", params, args.out_dir, _opt_out(args))
        params = {
            "q": args.q,
            "f": args.f,
            "a": args.a,
            "n": args.n,
            "p": args.p,
            "samples": args.samples,
            **seed_override,
        }
        return run_experiment("moments", params, args.out_dir, _opt_out(args))
    if args.command == "riesz":
        if args.subcommand == "bounds":
            params = {"q": args.q, "f": args.f, "orders": args.orders}
            return run_experiment("bounds", params, args.out_dir, _opt_out(args))
        params = {
            "c": args.c,
            "length": args.length,
            "sigma_min": args.sigma_min,
            "sigma_max": args.sigma_max,
            "t_max": args.t_max,
        }
        return run_experiment("hls", params, args.out_dir, _opt_out(args))
    if args.command == "weier":
        if args.subcommand == "dichotomy":
            params = {
                "alphas": args.alphas,
                "samples": args.samples,
                "n_max": args.n_max,
                **seed_override,
            }
            summary = run_experiment("dichotomy", params, args.out_dir, _opt_out(args))
            if args.plot:
                specs = [
                    (f"alpha={a}", WeierstrassSpec.f_alpha(float(a)))
                    for a in str(args.alphas).split(",")
                ]
                plot_weierstrass(specs, os.path.join(args.out_dir, args.plot), args.plot_resolution)
                summary["plot"] = args.plot
            return summary
        params = {"x": args.x, "a": args.a, "f_prime": args.f_prime, "n_max": args.n_max}
        summary = run_experiment("classify", params, args.out_dir, _opt_out(args))
        if args.plot:
            run_classify_params = dict(params)
            f_prime = parse_function(run_classify_params["f_prime"])
            coeffs = {
                int(nf): amp / (2j * np.pi * nf)
                for nf, amp in f_prime.coeffs_dict().items()
                if nf != 0
            }
            spec = WeierstrassSpec.from_f(
                TorusFunction(coeffs, f_prime.grid_size),
                parse_coefficients(run_classify_params["a"], 60),
            )
            plot_weierstrass([("F", spec)], os.path.join(args.out_dir, args.plot), args.plot_resolution)
            summary["plot"] = args.plot
        return summary
    if args.command == "reproduce":
        params = {"samples": args.samples, "n_max": args.n_max, **seed_override}
        return run_experiment("reproduce_table", params, args.out_dir, _opt_out(args))
    raise SchemaError(f"unknown command {args.command!r}")


def _opt_out(args):
    out = getattr(args, "out", None)
    if out is None:
        return None
    if os.path.isabs(out):
        return out
    return os.path.join(args.out_dir, out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        summary = _dispatch(args)
    except PrecisionBudgetError as exc:
        print(f"error [precision budget]: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SchemaError as exc:
        print(f"error [schema]: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except NumericalError as exc:
        print(f"error [numerical]: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(json.dumps(summary, indent=2, sort_keys=True, default=str))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
