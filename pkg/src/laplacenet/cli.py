"""Command-line interface.

Subcommands: ``net`` (build and dump an eps-net), ``spectrum`` (graph
eigenvalues of a dumped net), ``converge`` (full sweep with report files),
``eigenfunctions`` (cluster alignment experiment), ``diagnostics``
(fitted-constant inequality suite).
"""

from __future__ import annotations

import csv as _csv
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .diagnostics import LEMMA_IDS, level_diagnostics
from .eigensolve import NoConvergence, smallest_k
from .errors import LaplaceNetError
from .graph import build_graph
from .harness import (
    SweepConfig,
    alignment_experiment,
    emit_report,
    run_sweep,
)
from .manifolds import make_rng, manifold_from_spec
from .net import DEFAULT_OVERSAMPLE, EpsNet, build_net


def _fail(e: Exception) -> None:
    click.echo(f"error: {e}", err=True)
    sys.exit(1)


@click.group()
@click.version_option(__version__, prog_name="laplacenet")
def main():
    """Graph-Laplacian spectral approximation on model manifolds."""


@main.command("net")
@click.option("--manifold", required=True, help="circle:R | sphere2:R | torus2:a,b")
@click.option("--eps", required=True, type=float, help="covering scale")
@click.option("--seed", default=7, show_default=True, type=int)
@click.option("--oversample", default=DEFAULT_OVERSAMPLE, show_default=True, type=int,
              help="quadrature samples per net point")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="output JSON path")
def net_cmd(manifold, eps, seed, oversample, out):
    """Build an eps-net with cell measures and dump it as JSON."""
    try:
        m = manifold_from_spec(manifold)
        net = build_net(m, eps, make_rng(seed, 0), oversample=oversample)
        Path(out).write_text(net.to_json(seed=seed))
    except (LaplaceNetError, ValueError, OSError) as e:
        _fail(e)
    click.echo(f"net: N={net.size} covering_radius={net.covering_radius:.4g} "
               f"separation={net.separation:.4g} -> {out}")


@main.command("spectrum")
@click.option("--net", "net_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="net JSON file")
@click.option("--rho", required=True, type=float, help="connectivity radius")
@click.option("--k", default=10, show_default=True, type=int)
@click.option("--tol", default=1e-9, show_default=True, type=float)
@click.option("--method", default="auto", show_default=True,
              type=click.Choice(["auto", "dense", "lanczos"]))
def spectrum_cmd(net_path, rho, k, tol, method):
    """Smallest k graph-Laplacian eigenvalues of a dumped net."""
    try:
        net = EpsNet.from_json(Path(net_path).read_text())
        graph = build_graph(net, net.manifold, rho)
        try:
            spec = smallest_k(graph, k, tol=tol, method=method)
        except NoConvergence as e:
            click.echo(f"warning: {e}", err=True)
            spec = e.result
    except (LaplaceNetError, ValueError, OSError) as e:
        _fail(e)
    click.echo(f"N={graph.N} edges={graph.edge_count} method={spec.method}")
    for a, lam in enumerate(spec.eigenvalues, start=1):
        click.echo(f"lambda_{a} = {lam:.12g}  (residual {spec.residuals[a-1]:.2e})")


def _load_config(config, manifold, eps, rho_rule, k, seed, oversample, tol, out):
    if config is not None:
        cfg = SweepConfig.from_json_file(config)
        if out is not None:
            cfg.out = out
        return cfg
    if manifold is None or eps is None:
        raise click.UsageError("provide --config or both --manifold and --eps")
    levels = [float(v) for v in eps.split(",")]
    return SweepConfig(manifold=manifold, eps_levels=levels, rho_rule=rho_rule,
                       k_target=k, seed=seed, oversample=oversample,
                       solver_tol=tol, out=out)


_sweep_options = [
    click.option("--config", type=click.Path(exists=True, dir_okay=False),
                 help="JSON file mirroring SweepConfig"),
    click.option("--manifold", help="circle:R | sphere2:R | torus2:a,b"),
    click.option("--eps", help="comma-separated descending eps levels"),
    click.option("--rho-rule", default="pow:1.0,0.5", show_default=True,
                 help="fixed:r or pow:c,alpha (rho = c*eps^alpha)"),
    click.option("--k", default=10, show_default=True, type=int),
    click.option("--seed", default=7, show_default=True, type=int),
    click.option("--oversample", default=DEFAULT_OVERSAMPLE, show_default=True,
                 type=int),
    click.option("--tol", default=1e-9, show_default=True, type=float),
]


def _with_sweep_options(f):
    for opt in reversed(_sweep_options):
        f = opt(f)
    return f


@main.command("converge")
@_with_sweep_options
@click.option("--format", "fmt", default="csv", show_default=True,
              type=click.Choice(["csv", "json", "both"]))
@click.option("--out", default="report", show_default=True,
              type=click.Path(file_okay=False), help="report directory")
def converge_cmd(config, manifold, eps, rho_rule, k, seed, oversample, tol,
                 fmt, out):
    """Run an (eps, rho) sweep and emit a convergence report."""
    try:
        cfg = _load_config(config, manifold, eps, rho_rule, k, seed,
                           oversample, tol, out)
        report = run_sweep(cfg)
        paths = emit_report(report, fmt, cfg.out or out)
    except (LaplaceNetError, OSError) as e:
        _fail(e)
    for lv in report.levels:
        if lv.status == "ok":
            click.echo(f"level {lv.level}: eps={lv.eps:g} rho={lv.rho:g} "
                       f"N={lv.N} edges={lv.edges} "
                       f"mean_rel_err={report.mean_rel_err(lv):.4g} "
                       f"({lv.runtime:.1f}s)")
        else:
            click.echo(f"level {lv.level}: eps={lv.eps:g} rho={lv.rho:g} "
                       f"status=failed ({lv.error})")
    slope = "n/a" if report.slope is None else f"{report.slope:.3f}"
    click.echo(f"log-log slope of mean relative error: {slope}")
    for p in paths:
        click.echo(f"wrote {p}")


@main.command("eigenfunctions")
@_with_sweep_options
@click.option("--cluster-gap", default=0.1, show_default=True, type=float,
              help="relative gap splitting eigenvalue clusters")
@click.option("--out", type=click.Path(dir_okay=False),
              help="write the alignment report JSON here")
def eigenfunctions_cmd(config, manifold, eps, rho_rule, k, seed, oversample,
                       tol, cluster_gap, out):
    """Cluster-by-cluster eigenfunction alignment across a sweep."""
    try:
        cfg = _load_config(config, manifold, eps, rho_rule, k, seed,
                           oversample, tol, None)
        result = alignment_experiment(cfg, cluster_gap)
        if out:
            Path(out).write_text(json.dumps(result, indent=1))
    except (LaplaceNetError, OSError) as e:
        _fail(e)
    for cl in result["clusters"]:
        click.echo(f"cluster lambda={cl['lambda']:g} "
                   f"mult={cl['multiplicity']} delta={cl['delta_lambda']:g}")
        for lv in cl["levels"]:
            leak = "n/a" if lv["leakage"] is None else f"{lv['leakage']:.3e}"
            mi = "n/a" if lv["misfit_I"] is None else f"{lv['misfit_I']:.3e}"
            flag = "" if lv["cluster_ok"] else "  [cluster mismatch]"
            click.echo(f"  level {lv['level']}: misfit_P={lv['misfit_P']:.3e} "
                       f"misfit_I={mi} leakage={leak}{flag}")
    if out:
        click.echo(f"wrote {out}")


@main.command("diagnostics")
@_with_sweep_options
@click.option("--lemmas", default=",".join(LEMMA_IDS), show_default=True,
              help="comma-separated diagnostic ids")
@click.option("--out", type=click.Path(dir_okay=False),
              help="write CSV rows here (default: stdout)")
def diagnostics_cmd(config, manifold, eps, rho_rule, k, seed, oversample,
                    tol, lemmas, out):
    """Fitted-constant inequality diagnostics per sweep level."""
    ids = [s.strip() for s in lemmas.split(",") if s.strip()]
    unknown = set(ids) - set(LEMMA_IDS)
    if unknown:
        _fail(ValueError(f"unknown diagnostic ids: {sorted(unknown)} "
                         f"(known: {', '.join(LEMMA_IDS)})"))
    try:
        cfg = _load_config(config, manifold, eps, rho_rule, k, seed,
                           oversample, tol, None)
        m, _ = cfg.validate()
        report = run_sweep(cfg)
        rows = []
        for lv in report.ok_levels():
            if lv.rho <= 2.0 * lv.eps:
                click.echo(f"level {lv.level}: skipped (rho <= 2*eps, "
                           "no interpolation radius)", err=True)
                continue
            for row in level_diagnostics(m, lv.net, lv.graph, lv.spectrum, ids):
                rows.append((lv.level, row))
    except (LaplaceNetError, OSError) as e:
        _fail(e)
    sink = open(out, "w", newline="") if out else sys.stdout
    try:
        w = _csv.writer(sink)
        w.writerow(["level", "lemma_id", "r_or_rho", "lhs", "rhs_envelope",
                    "fitted_constant"])
        for level, row in rows:
            w.writerow([level, row.lemma_id, "%.17g" % row.r_or_rho,
                        "%.17g" % row.lhs, "%.17g" % row.rhs_envelope,
                        "%.17g" % row.fitted_constant])
    finally:
        if out:
            sink.close()
            click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()
