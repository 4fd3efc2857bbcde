"""Monte Carlo harness: replicate simulations, estimate, and summarise.

Replicate ``r`` always uses the seed ``replicate_seed(seed, r)`` whatever
``n`` and the number of workers, and rows are emitted in ``(n, replicate)``
order, so the CSV body depends on the configuration only. The ``wall_ms``
column is the one exception; it is written as 0 when timing is off.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import MfstableError
from .estim import estimate, rate_dn
from .sim import replicate_seed, simulate

__all__ = [
    "COLUMNS",
    "FAILED",
    "ExperimentRecord",
    "run_replicate",
    "run_experiment",
    "format_records",
    "parse_records",
    "summarize",
    "format_summary",
    "format_failures",
    "write_experiment",
]

COLUMNS = (
    "n", "replicate", "seed_used", "H_true_at_t0", "H_hat", "alpha_true", "alpha_hat",
    "V_beta1", "V_beta2", "upsilon", "guard_hits", "d_n_theoretical", "wall_ms",
)
_INT_COLUMNS = {"n", "replicate", "seed_used", "upsilon", "guard_hits", "wall_ms"}
FAILED = "failed"


@dataclass
class ExperimentRecord:
    n: int
    replicate: int
    seed_used: int
    H_true_at_t0: float
    H_hat: object
    alpha_true: float
    alpha_hat: object
    V_beta1: object
    V_beta2: object
    upsilon: object
    guard_hits: object
    d_n_theoretical: object
    wall_ms: int
    error: str = ""

    @property
    def failed(self) -> bool:
        return self.H_hat == FAILED

    def row(self) -> list:
        return [getattr(self, c) for c in COLUMNS]


def run_replicate(cfg, n: int, r: int) -> ExperimentRecord:
    """Simulate and estimate one ``(n, replicate)`` cell of the experiment."""
    t_begin = time.perf_counter()
    seed = replicate_seed(cfg.seed, r)
    est = cfg.estimator
    H_true = float(cfg.model.hurst(est.t0))
    alpha = cfg.model.alpha
    try:
        d_n = rate_dn(n, alpha, H_true, est.gamma, est.filter.L)
    except MfstableError:
        d_n = FAILED
    try:
        path = simulate(replace(cfg.model, n=n, seed=seed))
        res = estimate(path, est, H_true=H_true, alpha_true=alpha)
        fields = dict(
            H_hat=res.H_hat,
            alpha_hat=res.alpha_hat,
            V_beta1=res.V_values[(n, est.beta1)],
            V_beta2=res.V_values[(n, est.beta2)],
            upsilon=res.counts[n],
            guard_hits=res.guard_hits,
        )
        err = ""
    except MfstableError as exc:
        fields = dict.fromkeys(
            ("H_hat", "alpha_hat", "V_beta1", "V_beta2", "upsilon", "guard_hits"), FAILED
        )
        err = f"{type(exc).__name__}: {exc}"
    wall = int(round(1000 * (time.perf_counter() - t_begin))) if cfg.timing else 0
    return ExperimentRecord(n, r, seed, H_true, alpha_true=alpha, d_n_theoretical=d_n,
                            wall_ms=wall, error=err, **fields)


def _task(args):
    cfg, n, r = args
    return run_replicate(cfg, n, r)


def run_experiment(cfg, progress=None) -> list:
    """All records in ``(n, replicate)`` order."""
    tasks = [(cfg, n, r) for n in cfg.n_values for r in range(cfg.replicates)]
    if cfg.workers == 1:
        out = []
        for t in tasks:
            out.append(_task(t))
            if progress:
                progress(out[-1])
        return out
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        out = []
        for rec in pool.map(_task, tasks, chunksize=max(1, len(tasks) // (8 * cfg.workers))):
            out.append(rec)
            if progress:
                progress(rec)
        return out


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def format_records(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for rec in records:
        w.writerow([_fmt(v) for v in rec.row()])
    return buf.getvalue()


def parse_records(text: str) -> list:
    """Inverse of :func:`format_records`; ``#`` lines are skipped."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    if tuple(header) != COLUMNS:
        raise ValueError(f"unexpected header {header}")
    out = []
    for row in reader:
        vals = {}
        for col, raw in zip(COLUMNS, row):
            if raw == FAILED:
                vals[col] = FAILED
            elif col in _INT_COLUMNS:
                vals[col] = int(raw)
            else:
                vals[col] = float(raw)
        out.append(ExperimentRecord(**vals))
    return out


def _slope(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(y)
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(x[ok], y[ok], 1)[0])


def summarize(records) -> dict:
    """Per-``n`` bias and RMSE of both estimators plus the log2 slopes."""
    by_n = {}
    for rec in records:
        by_n.setdefault(rec.n, []).append(rec)
    rows = []
    for n in sorted(by_n):
        recs = by_n[n]
        ok = [r for r in recs if not r.failed]
        eh = np.array([r.H_hat - r.H_true_at_t0 for r in ok])
        ea = np.array([r.alpha_hat - r.alpha_true for r in ok])
        nan = float("nan")
        d_n = recs[0].d_n_theoretical
        rows.append({
            "n": n,
            "ok": len(ok),
            "failed": len(recs) - len(ok),
            "bias_H": float(eh.mean()) if len(ok) else nan,
            "rmse_H": float(np.sqrt(np.mean(eh**2))) if len(ok) else nan,
            "bias_alpha": float(ea.mean()) if len(ok) else nan,
            "rmse_alpha": float(np.sqrt(np.mean(ea**2))) if len(ok) else nan,
            "d_n": nan if d_n == FAILED else float(d_n),
        })
    lg = [math.log2(r["n"]) for r in rows]
    return {
        "per_n": rows,
        "slope_rmse_H": _slope(lg, [math.log2(r["rmse_H"]) if r["rmse_H"] > 0
                                    else float("nan") for r in rows]),
        "slope_rmse_alpha": _slope(lg, [math.log2(r["rmse_alpha"]) if r["rmse_alpha"] > 0
                                        else float("nan") for r in rows]),
        "slope_d_n": _slope(lg, [math.log2(r["d_n"]) if r["d_n"] > 0 else float("nan")
                                 for r in rows]),
    }


def format_summary(summary: dict) -> str:
    lines = ["# summary"]
    for r in summary["per_n"]:
        lines.append(
            f"# n={r['n']} ok={r['ok']} failed={r['failed']} "
            f"bias_H={r['bias_H']:.6g} rmse_H={r['rmse_H']:.6g} "
            f"bias_alpha={r['bias_alpha']:.6g} rmse_alpha={r['rmse_alpha']:.6g} "
            f"d_n={r['d_n']:.6g}"
        )
    lines.append(
        f"# slope log2(rmse_H) vs log2(n): {summary['slope_rmse_H']:.6g}; "
        f"log2(rmse_alpha): {summary['slope_rmse_alpha']:.6g}; "
        f"theoretical log2(d_n): {summary['slope_d_n']:.6g}"
    )
    return "\n".join(lines) + "\n"


def format_failures(records) -> str:
    return "".join(
        f"# failed n={r.n} replicate={r.replicate}: {r.error}\n" for r in records if r.failed
    )


def write_experiment(records, target) -> str:
    text = format_records(records) + format_summary(summarize(records)) + format_failures(records)
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w") as fh:
            fh.write(text)
    return text
