"""Figure rendering for experiment reports; PNG files next to the CSV output."""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _save(fig, outdir, name):
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, name), dpi=130)
    plt.close(fig)


def limit_check_figure(report, outdir):
    runs = report.results["runs"]
    ns = [run["N"] for run in runs]
    tvs = [run["tv"] for run in runs]
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    ax = axes[0]
    ax.loglog(ns, tvs, "o-", label="TV(DP law, chamber BM)")
    guide = [tvs[0] * math.sqrt(ns[0] / n) for n in ns]
    ax.loglog(ns, guide, "k--", alpha=0.5, label=r"$N^{-1/2}$ guide")
    ax.set_xlabel("N")
    ax.set_ylabel("total variation")
    ax.legend(fontsize=8)
    ax.set_title("%s kernel" % report.config["kernel"])

    ax = axes[1]
    rows = report.law_tables[max(report.law_tables)]
    r = report.config["rank"]
    resc = np.array([row[r + 1] for row in rows])
    dens = np.array([row[r + 2] for row in rows])
    order = np.argsort(dens)
    ax.plot(dens[order], resc[order], ".", ms=2, alpha=0.5)
    lim = max(dens.max(), resc.max()) if len(rows) else 1.0
    ax.plot([0, lim], [0, lim], "k-", lw=0.8)
    ax.set_xlabel("chamber-BM density")
    ax.set_ylabel("rescaled DP mass")
    ax.set_title("N = %d" % max(report.law_tables))
    _save(fig, outdir, "limit_check.png")


def bridge_check_figure(report, outdir):
    runs = report.results["runs"]
    ns = [run["N"] for run in runs]
    errs = [run["max_rel_err"] for run in runs]
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.loglog(ns, errs, "o-", label="max relative error")
    guide = [errs[0] * ns[0] / n for n in ns]
    ax.loglog(ns, guide, "k--", alpha=0.5, label=r"$N^{-1}$ guide")
    ax.set_xlabel("N")
    ax.set_ylabel("max |ratio/target - 1|")
    ax.legend(fontsize=8)
    _save(fig, outdir, "bridge_check.png")


def tightness_check_figure(report, outdir):
    grid = report.results["grid"]
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    keys = sorted({(g["N"], g["alpha"]) for g in grid if g["alpha"] > 0})
    for big_n, alpha in keys:
        pts = sorted(
            (g["eta"], g["estimate"], g["se"])
            for g in grid
            if g["N"] == big_n and g["alpha"] == alpha
        )
        etas = [p[0] for p in pts]
        est = [p[1] for p in pts]
        se = [p[2] for p in pts]
        ax.errorbar(
            etas, est, yerr=[2 * s for s in se], marker="o", ms=3,
            label="N=%d, alpha=%g" % (big_n, alpha),
        )
    ax.set_xscale("log")
    ax.set_xlabel("eta")
    ax.set_ylabel("P[sup |Y| >= alpha]")
    ax.legend(fontsize=7)
    _save(fig, outdir, "tightness_check.png")


def interior_start_figure(report, outdir):
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.4))
    run = report.results["runs"][-1]
    ts = [s["t"] for s in run["stats"]]
    axes[0].plot(ts, [s["mean_rel_err"] for s in run["stats"]], "o-", label="mean drift")
    axes[0].plot(ts, [s["cov_rel_err"] for s in run["stats"]], "s-", label="covariance")
    axes[0].set_xlabel("t")
    axes[0].set_ylabel("relative error")
    axes[0].legend(fontsize=8)
    axes[1].plot(ts, [s["energy_pvalue"] for s in run["stats"]], "o-")
    axes[1].axhline(report.config["tolerances"]["energy_alpha"], color="k", ls="--", lw=0.8)
    axes[1].set_xlabel("t")
    axes[1].set_ylabel("energy-distance p-value")
    axes[1].set_ylim(0, 1)
    _save(fig, outdir, "interior_start_check.png")


def render_report_figures(report, outdir):
    if report.name == "limit-check":
        limit_check_figure(report, outdir)
    elif report.name == "bridge-check":
        bridge_check_figure(report, outdir)
    elif report.name == "tightness-check":
        tightness_check_figure(report, outdir)
    elif report.name == "interior-start-check":
        interior_start_figure(report, outdir)
