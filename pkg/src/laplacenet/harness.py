"""Sweep orchestration: build nets and graphs over a ladder of scales,
compare graph spectra to the exact spectra, fit convergence slopes, run
eigenfunction alignment experiments, and emit machine-readable reports.

Levels may run concurrently (``LAPLACENET_WORKERS``); every level owns a
counter-based RNG stream keyed by (seed, level index), so results are
independent of worker count.  A level that raises is recorded with
``status=failed`` and skipped by downstream fits, never silently dropped.
"""

from __future__ import annotations

import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .eigensolve import (
    NoConvergence,
    SpectrumResult,
    cluster_eigenvalues,
    smallest_k,
    spectral_projection,
)
from .errors import ClusterMismatch, ConfigError, IntervalNotResolved
from .graph import WeightedGraph, build_graph
from .manifolds import Manifold, make_rng, manifold_from_spec
from .net import DEFAULT_OVERSAMPLE, EpsNet, build_net
from .transfer import TransferContext, discretize_P, interpolate_I

__all__ = [
    "RhoRule",
    "SweepConfig",
    "LevelResult",
    "ConvergenceReport",
    "run_sweep",
    "alignment_experiment",
    "emit_report",
    "worker_count",
]

SOLVER_MARGIN = 5  # extra eigenpairs beyond k_target, for gap/cluster context


def worker_count() -> int:
    """Concurrency cap from LAPLACENET_WORKERS (default 1)."""
    raw = os.environ.get("LAPLACENET_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"LAPLACENET_WORKERS={raw!r} is not an integer") from None


@dataclass(frozen=True)
class RhoRule:
    """Connectivity-radius schedule: fixed rho or rho = c * eps**alpha."""

    kind: str            # "fixed" | "pow"
    c: float
    alpha: float = 0.0

    def rho(self, eps: float) -> float:
        if self.kind == "fixed":
            return self.c
        return self.c * eps**self.alpha

    def spec_string(self) -> str:
        if self.kind == "fixed":
            return f"fixed:{self.c:g}"
        return f"pow:{self.c:g},{self.alpha:g}"

    @classmethod
    def parse(cls, text: str) -> "RhoRule":
        try:
            kind, _, args = text.partition(":")
            vals = [float(v) for v in args.split(",")]
            if kind == "fixed" and len(vals) == 1 and vals[0] > 0:
                return cls("fixed", vals[0])
            if kind == "pow" and len(vals) == 2 and vals[0] > 0 and 0 < vals[1] < 1:
                return cls("pow", vals[0], vals[1])
        except ValueError:
            pass
        raise ConfigError(
            f"bad rho rule {text!r}; expected fixed:r or pow:c,alpha with alpha in (0,1)"
        )


@dataclass
class SweepConfig:
    """One convergence experiment: a manifold, scales, and solver knobs.

    ``eps_levels`` must be strictly descending; every level must satisfy
    eps < rho < i0/2.  The stricter rho > 2*eps needed by the
    interpolation map is checked where interpolation is actually used, so
    a ladder may include coarse levels with rho <= 2*eps and still report
    their spectra.
    """

    manifold: str
    eps_levels: List[float]
    rho_rule: str = "pow:1.0,0.5"
    k_target: int = 10
    seed: int = 7
    oversample: int = DEFAULT_OVERSAMPLE
    solver_tol: float = 1e-9
    out: Optional[str] = None

    def validate(self) -> Tuple[Manifold, RhoRule]:
        try:
            m = manifold_from_spec(self.manifold)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        rule = RhoRule.parse(self.rho_rule)
        eps = list(self.eps_levels)
        if not eps:
            raise ConfigError("eps_levels must be nonempty")
        if any(e <= 0 for e in eps):
            raise ConfigError("eps levels must be positive")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigError("eps_levels must be strictly descending")
        half_inj = 0.5 * m.injectivity_radius
        for e in eps:
            r = rule.rho(e)
            if not e < r < half_inj:
                raise ConfigError(
                    f"level eps={e}: rho={r} violates eps < rho < i0/2={half_inj}"
                )
        if self.k_target < 1:
            raise ConfigError("k_target must be >= 1")
        if self.oversample < 1:
            raise ConfigError("oversample must be >= 1")
        if self.solver_tol <= 0:
            raise ConfigError("solver_tol must be positive")
        return m, rule

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        allowed = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as e:
            raise ConfigError(str(e)) from None

    @classmethod
    def from_json_file(cls, path) -> "SweepConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class LevelResult:
    """Everything one level produced; artifacts stay in memory only."""

    level: int
    eps: float
    rho: float
    status: str = "ok"            # "ok" | "failed"
    error: Optional[str] = None
    N: int = 0
    edges: int = 0
    eigenvalues: Optional[np.ndarray] = None   # first k_target
    runtime: float = 0.0
    net: Optional[EpsNet] = field(default=None, repr=False)
    graph: Optional[WeightedGraph] = field(default=None, repr=False)
    spectrum: Optional[SpectrumResult] = field(default=None, repr=False)

    @property
    def regressor(self) -> float:
        return self.eps / self.rho + self.rho


@dataclass
class ConvergenceReport:
    config: SweepConfig
    exact: np.ndarray                 # first k_target exact eigenvalues
    levels: List[LevelResult]
    slope: Optional[float]            # log-log slope of mean rel err

    def ok_levels(self) -> List[LevelResult]:
        return [lv for lv in self.levels if lv.status == "ok"]

    def mean_rel_err(self, lv: LevelResult) -> float:
        """Mean relative eigenvalue error over modes 2..k_target."""
        if lv.eigenvalues is None or self.config.k_target < 2:
            return float("nan")
        lam = self.exact[1:]
        return float(np.mean(np.abs(lv.eigenvalues[1:] - lam) / lam))

    def to_dict(self) -> dict:
        levels = []
        for lv in self.levels:
            d = {
                "level": lv.level,
                "eps": lv.eps,
                "rho": lv.rho,
                "status": lv.status,
                "N": lv.N,
                "edges": lv.edges,
                "runtime": lv.runtime,
                "regressor": lv.regressor,
            }
            if lv.status == "ok":
                lam = lv.eigenvalues
                d["lambda_graph"] = lam.tolist()
                d["abs_err"] = np.abs(lam - self.exact).tolist()
                rel = np.abs(lam - self.exact) / np.where(self.exact > 0, self.exact, 1.0)
                d["rel_err"] = rel.tolist()
                d["mean_rel_err"] = self.mean_rel_err(lv)
            else:
                d["error"] = lv.error
            levels.append(d)
        return {
            "config": self.config.to_dict(),
            "lambda_exact": self.exact.tolist(),
            "levels": levels,
            "slope": self.slope,
        }


def _run_level(m: Manifold, cfg: SweepConfig, level: int, eps: float,
               rho: float) -> LevelResult:
    lv = LevelResult(level=level, eps=eps, rho=rho)
    t0 = time.perf_counter()
    try:
        rng = make_rng(cfg.seed, level)
        net = build_net(m, eps, rng, oversample=cfg.oversample)
        graph = build_graph(net, m, rho)
        k = min(cfg.k_target + SOLVER_MARGIN, graph.N)
        try:
            spec = smallest_k(graph, k, tol=cfg.solver_tol, seed=cfg.seed)
        except NoConvergence as e:
            spec = e.result  # partial result; residuals recorded there
        lv.net, lv.graph, lv.spectrum = net, graph, spec
        lv.N, lv.edges = graph.N, graph.edge_count
        lv.eigenvalues = spec.eigenvalues[: cfg.k_target].copy()
    except Exception as e:  # failed levels are data, not crashes
        lv.status = "failed"
        lv.error = f"{type(e).__name__}: {e}"
    lv.runtime = time.perf_counter() - t0
    return lv


def _fit_slope(report_levels: Sequence[LevelResult],
               errs: Sequence[float]) -> Optional[float]:
    xs = [lv.regressor for lv in report_levels]
    pairs = [(x, e) for x, e in zip(xs, errs) if e > 0 and np.isfinite(e)]
    if len(pairs) < 3:
        return None
    lx = np.log([p[0] for p in pairs])
    ly = np.log([p[1] for p in pairs])
    return float(np.polyfit(lx, ly, 1)[0])


def run_sweep(cfg: SweepConfig) -> ConvergenceReport:
    """Run every level of the ladder and fit the convergence slope.

    The slope is fitted over successful levels only and requires at least
    three of them; otherwise it is reported as None.
    """
    m, rule = cfg.validate()
    tasks = [(i, e, rule.rho(e)) for i, e in enumerate(cfg.eps_levels)]
    workers = worker_count()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            levels = list(pool.map(
                lambda t: _run_level(m, cfg, t[0], t[1], t[2]), tasks))
    else:
        levels = [_run_level(m, cfg, i, e, r) for i, e, r in tasks]
    exact = m.spectrum(cfg.k_target).eigenvalues
    report = ConvergenceReport(config=cfg, exact=exact, levels=levels, slope=None)
    ok = report.ok_levels()
    report.slope = _fit_slope(ok, [report.mean_rel_err(lv) for lv in ok])
    return report


# ---------------------------------------------------------------------------
# Eigenfunction alignment


def _procrustes(C: np.ndarray) -> np.ndarray:
    """Orthogonal matrix maximizing trace(O^T C) (nearest-rotation fit)."""
    W, _, Zt = np.linalg.svd(C)
    return W @ Zt


def _exact_clusters(m: Manifold, k_target: int):
    """Clusters of the exact spectrum, exact ties only, fully inside k_target."""
    spec = m.spectrum(k_target + 1)
    evs = spec.eigenvalues
    clusters = []
    start = 0
    for a in range(len(evs) - 1):
        if evs[a + 1] - evs[a] > 1e-12 * max(1.0, evs[a]):
            clusters.append((start, a))
            start = a + 1
    # Keep only clusters whose closure is visible within the first
    # k_target modes (the sentinel mode k_target detects truncation).
    return spec, [c for c in clusters if c[1] < k_target]


def alignment_experiment(cfg: SweepConfig, cluster_rel_gap: float,
                         report: Optional[ConvergenceReport] = None) -> dict:
    """Match graph eigenvector clusters to exact eigenfunction clusters.

    For each exact eigenvalue cluster (value lambda, multiplicity mult)
    and each successful level with rho > 2*eps, finds the orthonormal
    recombination g of the exact eigenfunctions minimizing the total
    mu-norm misfit sum_j ||u_j - P g_j||^2 (orthogonal Procrustes on the
    cross-Gram matrix), and reports that misfit, the interpolation misfit
    sum_j ||g_j - I u_j||^2 over the manifold, and the spectral-window
    leakage of P g_j outside (lambda - gamma, lambda + gamma] for
    gamma = delta_lambda / 2, where delta_lambda is the cluster's
    isolation gap capped at 1.  A level whose graph spectrum has no
    gap-separated cluster of the right size at lambda is marked
    cluster_ok=false (the experiment continues).
    """
    if report is None:
        report = run_sweep(cfg)
    m, _ = cfg.validate()
    spec, clusters = _exact_clusters(m, cfg.k_target)
    evs = spec.eigenvalues
    out = {"manifold": cfg.manifold, "cluster_rel_gap": cluster_rel_gap,
           "clusters": []}
    for (a, b) in clusters:
        lam = float(evs[a])
        mult = b - a + 1
        gaps = [1.0]
        if a > 0:
            gaps.append(lam - float(evs[a - 1]))
        if b + 1 < len(evs):
            gaps.append(float(evs[b + 1]) - lam)
        delta = min(gaps)
        entry = {
            "lambda": lam, "multiplicity": mult,
            "index_range": [a, b], "delta_lambda": delta,
            "levels": [],
        }
        F_labels = spec.labels[a : b + 1]
        for lv in report.ok_levels():
            if lv.spectrum is None or lv.spectrum.eigenvalues.shape[0] <= b:
                continue
            # The interpolation radius rho - 2*eps only exists on levels
            # with rho > 2*eps; the discretization-side quantities do not
            # need it, so coarser levels still report them.
            has_interp = lv.rho > 2.0 * lv.eps
            if has_interp:
                ctx = TransferContext.for_interpolation(lv.net, m, lv.rho)
            else:
                ctx = TransferContext(manifold=m, net=lv.net, r=lv.eps)
            F = np.column_stack([
                m.eigenfunction(lab, ctx.quadrature.samples) for lab in F_labels
            ])
            Pf = discretize_P(ctx, F)
            U = lv.spectrum.eigenvectors[:, a : b + 1]
            # Does the graph spectrum isolate a same-size cluster here?
            granges = cluster_eigenvalues(lv.spectrum, cluster_rel_gap)
            cluster_ok = any(r == (a, b) for r in granges)
            C = Pf.T @ (lv.graph.mu[:, None] * U)
            O = _procrustes(C)
            A = Pf @ O
            misfit_P = float(sum(
                lv.graph.norm(U[:, j] - A[:, j]) ** 2 for j in range(mult)
            ))
            G = F @ O
            misfit_I = None
            if has_interp:
                Iu = interpolate_I(ctx, U)
                misfit_I = float(sum(
                    ctx.l2_norm(G[:, j] - Iu[:, j]) ** 2 for j in range(mult)
                ))
            gamma = 0.5 * delta
            leakage = None
            try:
                leak = 0.0
                for j in range(mult):
                    inside = spectral_projection(
                        lv.spectrum, lv.graph, (lam - gamma, lam + gamma), Pf[:, j])
                    leak += lv.graph.norm(Pf[:, j] - inside) ** 2
                leakage = float(leak)
            except IntervalNotResolved:
                pass  # window above the resolved spectrum; leave null
            entry["levels"].append({
                "level": lv.level, "eps": lv.eps, "rho": lv.rho,
                "cluster_ok": bool(cluster_ok),
                "misfit_P": misfit_P, "misfit_I": misfit_I,
                "leakage": leakage,
            })
        out["clusters"].append(entry)
    return out


# ---------------------------------------------------------------------------
# Report serialization


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def report_csv(report: ConvergenceReport) -> str:
    """Fixed-column CSV; one row per (level, mode), failed levels blank."""
    buf = io.StringIO()
    buf.write("level,eps,rho,N,edges,k,lambda_graph,lambda_exact,abs_err,rel_err\n")
    k_target = report.config.k_target
    for lv in report.levels:
        for k in range(1, k_target + 1):
            lam_m = report.exact[k - 1]
            if lv.status == "ok":
                lam_g = lv.eigenvalues[k - 1]
                abs_err = abs(lam_g - lam_m)
                rel_err = abs_err / lam_m if lam_m > 0 else abs_err
                tail = f"{_fmt(lam_g)},{_fmt(lam_m)},{_fmt(abs_err)},{_fmt(rel_err)}"
            else:
                tail = f",{_fmt(lam_m)},,"
            buf.write(
                f"{lv.level},{_fmt(lv.eps)},{_fmt(lv.rho)},{lv.N},{lv.edges},"
                f"{k},{tail}\n"
            )
    return buf.getvalue()


def report_json(report: ConvergenceReport) -> str:
    return json.dumps(report.to_dict(), indent=1, sort_keys=True)


def emit_report(report: ConvergenceReport, fmt: str, out_dir) -> List[Path]:
    """Write report.csv and/or report.json under out_dir; returns paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create report directory {out}: {e}") from e
    written = []
    if fmt not in ("csv", "json", "both"):
        raise ConfigError(f"unknown report format {fmt!r}")
    try:
        if fmt in ("csv", "both"):
            p = out / "report.csv"
            p.write_text(report_csv(report))
            written.append(p)
        if fmt in ("json", "both"):
            p = out / "report.json"
            p.write_text(report_json(report))
            written.append(p)
    except OSError as e:
        raise OSError(f"cannot write report under {out}: {e}") from e
    return written
