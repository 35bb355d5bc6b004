"""Analysis reports for a single p-value set (JSON, CSV and text table)."""

from __future__ import annotations

import csv
import io
import json
from typing import Sequence

from . import baselines, pi0 as pi0_mod
from .datasets import load_dataset
from .decisions import Method, NseDecision, decide
from .errors import DomainError, NegativeVariance
from .metrics import estimate_metrics
from .pi0 import DEFAULT_LAMBDA, Pi0Estimate
from .pvalues import PValueSet, read_pvalues

# the table block of real-data reports, in display order
TABLE_METHODS = (
    Method.SGOF,
    Method.PLUGIN_STOREY,
    Method.PLUGIN_DALMASSO,
    Method.UPDATED_STOREY,
    Method.UPDATED_DALMASSO,
)
ALL_DATA_METHODS = TABLE_METHODS + (
    Method.SGOF_CONSERVATIVE,
    Method.EXPECTED_STOREY,
    Method.EXPECTED_DALMASSO,
)
CURVE_METHODS = (
    Method.SGOF,
    Method.UPDATED_STOREY,
    Method.UPDATED_DALMASSO,
    Method.EXPECTED_STOREY,
    Method.EXPECTED_DALMASSO,
)
RESULT_FIELDS = (
    "method", "gamma", "alpha", "n_reject", "threshold_pvalue", "threshold_display",
    "pi0_hat", "fdr_hat", "power_hat", "raw_bound", "variance_used", "n_significant",
)


def load_input(path: str | None = None, dataset: str | None = None,
               column: str | None = None) -> PValueSet:
    if dataset is not None:
        return load_dataset(dataset, path, column)
    return read_pvalues(path, column)


def pi0_for(method: Method, ps: PValueSet, lambda_: float, pi0: float | None) -> Pi0Estimate:
    """The pi0 estimate that goes with a method when estimating FDR and power."""
    if method in (Method.PLUGIN_STOREY, Method.UPDATED_STOREY, Method.EXPECTED_STOREY):
        return pi0_mod.storey(ps, lambda_)
    if method in (Method.PLUGIN_DALMASSO, Method.UPDATED_DALMASSO, Method.EXPECTED_DALMASSO):
        return pi0_mod.dalmasso(ps)
    if method.needs_true_pi0:
        return pi0_mod.fixed(pi0)
    return pi0_mod.fixed(1.0)


def _display(x: float | None) -> str | None:
    return None if x is None else f"{x:.4f}"


def result_row(ps: PValueSet, d: NseDecision, est: Pi0Estimate) -> dict:
    met = estimate_metrics(ps, d, est)
    return {
        "method": d.method.value,
        "gamma": d.gamma,
        "alpha": d.alpha,
        "n_reject": d.n_reject,
        "threshold_pvalue": d.threshold_pvalue,
        "threshold_display": _display(d.threshold_pvalue),
        "pi0_hat": est.value,
        "fdr_hat": met.fdr_hat,
        "power_hat": met.power_hat,
        "raw_bound": d.raw_bound,
        "variance_used": d.variance_used,
        "n_significant": d.n_significant,
    }


def _pi0_block(est: Pi0Estimate) -> dict:
    return {"value": est.value, "raw": est.raw, "truncated": est.truncated, "lambda": est.lambda_}


def analyze(ps: PValueSet, gammas: Sequence[float], alphas: Sequence[float],
            methods: Sequence[Method], *, lambda_: float = DEFAULT_LAMBDA,
            pi0: float | None = None, source: dict | None = None) -> dict:
    """Run every (method, gamma, alpha) combination and collect a report dict."""
    results = []
    for g in gammas:
        for a in alphas:
            for method in methods:
                d = decide(ps, method, g, a, pi0=pi0, lambda_=lambda_)
                results.append(result_row(ps, d, pi0_for(method, ps, lambda_, pi0)))
    storey = pi0_mod.storey(ps, lambda_)
    dalm = pi0_mod.dalmasso(ps)
    base = [
        {
            "alpha": a,
            "bh": baselines.bh(ps, a),
            "adaptive_bh_storey": baselines.adaptive_bh(ps, a, storey),
            "adaptive_bh_dalmasso": baselines.adaptive_bh(ps, a, dalm),
        }
        for a in alphas
    ]
    return {
        "input": dict(source or {}, m=ps.m),
        "parameters": {
            "gammas": list(gammas),
            "alphas": list(alphas),
            "methods": [m.value for m in methods],
            "lambda": lambda_,
            "pi0": pi0,
        },
        "pi0": {"storey": _pi0_block(storey), "dalmasso": _pi0_block(dalm)},
        "results": results,
        "baselines": base,
    }


def replay(report: dict) -> dict:
    """Re-run a report from the input and parameters it records."""
    src = report["input"]
    par = report["parameters"]
    ps = load_input(src.get("path"), src.get("dataset"), src.get("column"))
    source = {k: src.get(k) for k in ("path", "dataset", "column")}
    return analyze(ps, par["gammas"], par["alphas"], [Method(m) for m in par["methods"]],
                   lambda_=par["lambda"], pi0=par["pi0"], source=source)


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_FIELDS)
    for row in report["results"]:
        w.writerow([_cell(row[k]) for k in RESULT_FIELDS])
    return buf.getvalue()


def to_table(report: dict) -> str:
    lines = [f"m = {report['input']['m']}"]
    for name, blk in report["pi0"].items():
        lines.append(f"pi0 ({name}) = {blk['value']:.4f}")
    lines.append("")
    head = f"{'method':<20}{'gamma':>8}{'alpha':>8}{'Rej':>7}{'pval':>9}{'FDR':>9}{'pow':>9}"
    lines += [head, "-" * len(head)]
    for r in report["results"]:
        pval = r["threshold_display"] or "-"
        power = "-" if r["power_hat"] is None else f"{r['power_hat']:.4f}"
        lines.append(f"{r['method']:<20}{r['gamma']:>8g}{r['alpha']:>8g}{r['n_reject']:>7d}"
                     f"{pval:>9}{r['fdr_hat']:>9.4f}{power:>9}")
    lines.append("")
    for b in report["baselines"]:
        lines.append(f"BH({b['alpha']:g}) = {b['bh']}, adaptive BH: storey {b['adaptive_bh_storey']}, "
                     f"dalmasso {b['adaptive_bh_dalmasso']}")
    return "\n".join(lines) + "\n"


def default_gamma_grid(points: int = 100, lo: float = 0.001, hi: float = 0.1) -> list[float]:
    """``points`` equally spaced values on (lo, hi]."""
    step = (hi - lo) / points
    return [lo + k * step for k in range(1, points + 1)]


def curve(ps: PValueSet, gammas: Sequence[float], alpha: float, *,
          lambda_: float = DEFAULT_LAMBDA, methods: Sequence[Method] = CURVE_METHODS) -> list[dict]:
    """Number of rejections per method along a gamma grid.

    A method whose precondition fails at some gamma gets ``None`` there.
    """
    rows = []
    for g in gammas:
        row = {"gamma": g}
        for method in methods:
            try:
                row[method.value] = decide(ps, method, g, alpha, lambda_=lambda_).n_reject
            except (DomainError, NegativeVariance):
                row[method.value] = None
        rows.append(row)
    return rows


def curve_to_csv(rows: list[dict], methods: Sequence[Method] = CURVE_METHODS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma"] + [m.value for m in methods])
    for r in rows:
        w.writerow([_cell(r["gamma"])] + [_cell(r[m.value]) for m in methods])
    return buf.getvalue()
