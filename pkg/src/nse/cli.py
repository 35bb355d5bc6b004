"""Command line interface: ``nse analyze | curve | simulate | theory``.

Exit codes: 0 success, 2 invalid input, 3 method precondition violated,
4 invalid simulation scenario.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import sys
from pathlib import Path

import click

from . import report as rpt
from .decisions import Method
from .errors import (
    DatasetUnavailable,
    DomainError,
    InvalidScenario,
    NegativeVariance,
    NSEError,
    PValueFileError,
)
from .pi0 import DEFAULT_LAMBDA
from .simulate import DEFAULT_METHODS, DEFAULT_SEED, run_scenario, scenario_grid
from .theory import (
    GaussianScenario,
    individual_power,
    mu_sigma_dalmasso,
    mu_sigma_storey,
    remark2_constants,
)

EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_SCENARIO = 4


def _fail(msg: str, code: int) -> None:
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _load(path, dataset, column):
    if path is None and dataset is None:
        _fail("give a p-value FILE or --dataset", EXIT_INPUT)
    try:
        return rpt.load_input(path, dataset, column)
    except (PValueFileError, DatasetUnavailable) as exc:
        _fail(str(exc), EXIT_INPUT)
    except NSEError as exc:
        _fail(f"{path}: {exc}", EXIT_INPUT)


def _float_list(text: str, name: str, code: int) -> list[float]:
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        _fail(f"--{name}: expected comma separated numbers, got {text!r}", code)


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Control of the number of significant effects in multiple testing."""


@cli.command()
@click.argument("path", required=False, type=click.Path(dir_okay=False))
@click.option("--dataset", type=click.Choice(["hedenfalk", "diz"]), help="Named dataset to load and verify.")
@click.option("--column", help="Read PATH as CSV and use this column.")
@click.option("-g", "--gamma", "gammas", type=float, multiple=True, help="Significance threshold (repeatable).")
@click.option("-a", "--alpha", "alphas", type=float, multiple=True, help="Level (repeatable).")
@click.option("-M", "--method", "methods", multiple=True, help="Method name, e.g. updated-storey (repeatable).")
@click.option("--all-methods", is_flag=True, help="Every data-driven method (and oracles if --pi0 is given).")
@click.option("--lambda", "lambda_", type=float, default=DEFAULT_LAMBDA, show_default=True)
@click.option("--pi0", type=float, help="Known pi0 for the oracle methods.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "table"]), default="json", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write to this file instead of stdout.")
@click.option("--replay", type=click.Path(exists=True, dir_okay=False), help="Re-run a saved JSON report.")
def analyze(path, dataset, column, gammas, alphas, methods, all_methods, lambda_, pi0, fmt, output, replay):
    """Number of rejections, threshold p-value, FDR and power estimates for a p-value file."""
    try:
        if replay:
            report = rpt.replay(json.loads(Path(replay).read_text(encoding="utf-8")))
        else:
            ps = _load(path, dataset, column)
            if all_methods:
                chosen = list(rpt.ALL_DATA_METHODS)
                if pi0 is not None:
                    chosen = [Method.ORACLE_NORMAL, Method.ORACLE_BINOMIAL] + chosen
            elif methods:
                chosen = [Method.parse(m) for m in methods]
            else:
                chosen = [Method.UPDATED_STOREY]
            source = {"path": path, "dataset": dataset, "column": column}
            report = rpt.analyze(ps, list(gammas) or [0.05], list(alphas) or [0.05], chosen,
                                 lambda_=lambda_, pi0=pi0, source=source)
    except (PValueFileError, DatasetUnavailable) as exc:
        _fail(str(exc), EXIT_INPUT)
    except (DomainError, NegativeVariance) as exc:
        _fail(str(exc), EXIT_PRECONDITION)
    render = {"json": rpt.to_json, "csv": rpt.to_csv, "table": rpt.to_table}[fmt]
    _emit(render(report), output)


@cli.command()
@click.argument("path", required=False, type=click.Path(dir_okay=False))
@click.option("--dataset", type=click.Choice(["hedenfalk", "diz"]))
@click.option("--column")
@click.option("-a", "--alpha", type=float, default=0.05, show_default=True)
@click.option("--points", type=int, default=100, show_default=True)
@click.option("--gamma-min", type=float, default=0.001, show_default=True, help="Grid is (gamma-min, gamma-max].")
@click.option("--gamma-max", type=float, default=0.1, show_default=True)
@click.option("--gammas", help="Explicit comma separated gamma values (overrides the grid).")
@click.option("--lambda", "lambda_", type=float, default=DEFAULT_LAMBDA, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def curve(path, dataset, column, alpha, points, gamma_min, gamma_max, gammas, lambda_, output):
    """Rejections per method along a grid of gamma thresholds, as CSV."""
    ps = _load(path, dataset, column)
    if gammas:
        grid = _float_list(gammas, "gammas", EXIT_PRECONDITION)
    else:
        if points < 1 or not 0.0 <= gamma_min < gamma_max < 1.0:
            _fail("need points >= 1 and 0 <= gamma-min < gamma-max < 1", EXIT_PRECONDITION)
        grid = rpt.default_gamma_grid(points, gamma_min, gamma_max)
    if not 0.0 < alpha < 1.0 or any(not 0.0 < g < 1.0 for g in grid):
        _fail("gamma and alpha must lie in (0, 1)", EXIT_PRECONDITION)
    rows = rpt.curve(ps, grid, alpha, lambda_=lambda_)
    _emit(rpt.curve_to_csv(rows), output)


SIM_KEYS = ("m", "pi0", "mu", "gamma", "alpha", "reps", "seed", "threads", "methods", "n", "lambda")


def read_sim_config(path: str) -> dict:
    """Read the ``[simulate]`` section of an INI file; values may be comma separated lists."""
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise InvalidScenario(f"cannot read config {path}: {exc}") from None
    if not cp.has_section("simulate"):
        raise InvalidScenario(f"config {path} has no [simulate] section")
    sec = dict(cp.items("simulate"))
    unknown = set(sec) - set(SIM_KEYS)
    if unknown:
        raise InvalidScenario(f"unknown config keys: {sorted(unknown)}")
    return sec


def _sim_csv(results) -> str:
    methods = results[0].scenario.methods if results else DEFAULT_METHODS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = ["m", "gamma", "alpha", "pi0", "mu", "reps", "metric"]
    for meth in methods:
        head += [meth.value, f"{meth.value}_se"]
    w.writerow(head)
    for res in results:
        sc = res.scenario
        mu = "" if sc.pi0 == 1.0 else repr(sc.mu)
        for metric in ("nse", "fdr", "pow"):
            if metric == "pow" and sc.pi0 == 1.0:
                continue
            row = [sc.m, repr(sc.gamma), repr(sc.alpha), repr(sc.pi0), mu, sc.reps, metric]
            for meth in methods:
                r = res[meth]
                val, se = {
                    "nse": (r.nse_coverage, r.coverage_se),
                    "fdr": (r.fdr, r.fdr_se),
                    "pow": (r.power, r.power_se),
                }[metric]
                row += [rpt._cell(val), rpt._cell(se)]
            w.writerow(row)
    return buf.getvalue()


@cli.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), help="INI file with a [simulate] section.")
@click.option("--m", "m_", help="Number of tests, comma separated. [default: 1000]")
@click.option("--pi0", help="Proportions of true nulls. [default: 1,0.9,0.8]")
@click.option("--mu", help="Effect sizes. [default: 1,1.5,2]")
@click.option("--gamma", help="Significance thresholds. [default: 0.05]")
@click.option("--alpha", help="Levels. [default: 0.05]")
@click.option("--reps", type=int, help="Monte Carlo trials per scenario. [default: 5000]")
@click.option("--seed", type=int, help=f"Master seed. [default: {DEFAULT_SEED}]")
@click.option("--threads", type=int, help="Worker threads. [default: 1]")
@click.option("--methods", help="Comma separated methods. [default: the six table methods]")
@click.option("--n", "n_", type=int, help="Per-test sample size. [default: 5]")
@click.option("--lambda", "lambda_", type=float, help=f"Storey lambda. [default: {DEFAULT_LAMBDA}]")
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def simulate(config, m_, pi0, mu, gamma, alpha, reps, seed, threads, methods, n_, lambda_, output):
    """Monte Carlo NSE coverage, FDR and power over a scenario grid, as CSV."""
    try:
        conf = read_sim_config(config) if config else {}
    except InvalidScenario as exc:
        _fail(str(exc), EXIT_SCENARIO)
    flags = {"m": m_, "pi0": pi0, "mu": mu, "gamma": gamma, "alpha": alpha, "reps": reps,
             "seed": seed, "threads": threads, "methods": methods, "n": n_, "lambda": lambda_}
    val = {k: v for k, v in conf.items()}
    val.update({k: v for k, v in flags.items() if v is not None})

    def floats(key, default):
        return _float_list(val.get(key, default), key, EXIT_SCENARIO)

    def integer(key, default):
        try:
            return int(val.get(key, default))
        except (TypeError, ValueError):
            _fail(f"{key} must be an integer", EXIT_SCENARIO)

    m_list = floats("m", "1000")
    if any(x != int(x) for x in m_list):
        _fail("m must be integral", EXIT_SCENARIO)
    meths = [s.strip() for s in str(val.get("methods", ",".join(x.value for x in DEFAULT_METHODS))).split(",")
             if s.strip()]
    try:
        grid = scenario_grid(
            [int(x) for x in m_list], floats("pi0", "1,0.9,0.8"), floats("mu", "1,1.5,2"),
            floats("gamma", "0.05"), floats("alpha", "0.05"),
            reps=integer("reps", 5000), seed=integer("seed", DEFAULT_SEED), n=integer("n", 5),
            methods=meths, lambda_=floats("lambda", str(DEFAULT_LAMBDA))[0],
        )
    except (InvalidScenario, IndexError) as exc:
        _fail(str(exc) or "invalid scenario", EXIT_SCENARIO)
    workers = integer("threads", 1)
    if workers < 1:
        _fail("threads must be >= 1", EXIT_SCENARIO)
    results = [run_scenario(sc, workers) for sc in grid]
    _emit(_sim_csv(results), output)


@cli.command()
@click.option("--gamma", default="0.05,0.01", show_default=True)
@click.option("--pi0", default="0.9,0.8", show_default=True)
@click.option("--mu", default="1,1.5,2", show_default=True)
@click.option("--n", "n_", type=int, default=5, show_default=True)
@click.option("--lambda", "lambda_", type=float, default=DEFAULT_LAMBDA, show_default=True)
@click.option("--power", is_flag=True, help="Emit individual power per (mu, gamma) instead.")
@click.option("--constants", is_flag=True, help="Emit the SGoF constants c1, c2 per (gamma, pi0) instead.")
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def theory(gamma, pi0, mu, n_, lambda_, power, constants, output):
    """Theoretical -1e3 mu_T and sigma_T for the Gaussian model, as CSV."""
    gammas = _float_list(gamma, "gamma", EXIT_INPUT)
    pi0s = _float_list(pi0, "pi0", EXIT_INPUT)
    mus = _float_list(mu, "mu", EXIT_INPUT)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    try:
        if power or constants:
            if power:
                w.writerow(["mu", "n", "gamma", "individual_power"])
                for m in mus:
                    for g in gammas:
                        w.writerow([repr(m), n_, repr(g), repr(individual_power(GaussianScenario(m, n_), g))])
            if power and constants:
                w.writerow([])
            if constants:
                w.writerow(["gamma", "pi0", "c1", "c2"])
                for g in gammas:
                    for p in pi0s:
                        c1, c2 = remark2_constants(g, p)
                        w.writerow([repr(g), repr(p), repr(c1), repr(c2)])
        else:
            w.writerow(["estimator", "gamma", "pi0", "mu", "neg_mu_t_x1e3", "sigma_t"])
            for est in ("storey", "dalmasso"):
                for g in gammas:
                    for m in mus:
                        for p in pi0s:
                            sc = GaussianScenario(m, n_, p)
                            tv = mu_sigma_storey(sc, g, lambda_) if est == "storey" else mu_sigma_dalmasso(sc, g)
                            w.writerow([est, repr(g), repr(p), repr(m), repr(-1e3 * tv.mu_t + 0.0),
                                        repr(tv.sigma_t)])
    except DomainError as exc:
        _fail(str(exc), EXIT_INPUT)
    _emit(buf.getvalue(), output)


def main():  # pragma: no cover
    cli()


if __name__ == "__main__":  # pragma: no cover
    main()
