"""Command-line interface: data tables, kernels, walks, and experiments."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .exactnum import QSqrt
from .ibm import gue_sampler, gue_sigma2_per_t
from .kernel import assemble_kernel, doob_transform, simple_rw_params, spectral_gap
from .qcount import n_lambda, q_t, qt_exponent
from .rootsys import RankConfig, cone_window, fundamental_weight, root_system
from .spectral import F0Table, p_n_table
from .walk import dp_law, mc_paths
from .experiments import (
    ExperimentConfig,
    bridge_check,
    interior_start_check,
    limit_check,
    tightness_check,
    write_report,
)

EXPERIMENTS = {
    "limit-check": limit_check,
    "bridge-check": bridge_check,
    "tightness-check": tightness_check,
    "interior-start-check": interior_start_check,
}


def _out_stream(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _emit(path, text):
    stream, close = _out_stream(path)
    stream.write(text)
    if close:
        stream.close()


def cmd_root_data(args):
    rs = root_system(args.rank)
    orbits = {}
    for i in range(1, args.rank + 1):
        orbits["lambda_%d" % i] = sorted(
            list(m) for m in rs.weyl_orbit(fundamental_weight(args.rank, i))
        )
    data = {
        "rank": args.rank,
        "simple_roots": [list(v) for v in rs.simple_roots()],
        "positive_roots": [list(v) for v in rs.positive_roots()],
        "fundamental_weights": [
            [str(c) for c in w] for w in rs.fundamental_weights()
        ],
        "orbit_sizes": {
            "lambda_%d" % i: rs.orbit_size(i) for i in range(1, args.rank + 1)
        },
        "orbits": orbits,
        "norm_ratio_c": str(rs.norm_ratio),
    }
    _emit(args.out, json.dumps(data, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_q_table(args):
    cfg = RankConfig(args.rank, args.q)
    cols = ["m%d" % (k + 1) for k in range(args.rank)] + ["qt_exponent", "N_lambda"]
    rows = []
    for m in cone_window(args.rank, args.radius):
        rows.append(list(m) + [q_t(cfg, m).exponent, n_lambda(cfg, m)])
    lines = ["# rank=%d" % args.rank, "# q=%d" % args.q, ",".join(cols)]
    lines += [",".join(str(x) for x in row) for row in rows]
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_f0_table(args):
    cfg = RankConfig(args.rank, args.q)
    tab = F0Table(cfg, args.radius)
    cols = ["m%d" % (k + 1) for k in range(args.rank)] + ["F0", "envelope_ratio"]
    lines = ["# rank=%d" % args.rank, "# q=%d" % args.q, ",".join(cols)]
    for m in tab.states:
        lines.append(
            ",".join(
                [str(x) for x in m] + [repr(tab.f0(m)), repr(tab.envelope_ratio(m))]
            )
        )
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_pn(args):
    cfg = RankConfig(args.rank, args.q)
    window = args.radius if args.radius is not None else args.n + 1
    tab = p_n_table(cfg, args.n, window)
    cols = ["m%d" % (k + 1) for k in range(args.rank)] + ["p_n", "sphere_mass"]
    lines = [
        "# rank=%d" % args.rank,
        "# q=%d" % args.q,
        "# n=%d" % args.n,
        ",".join(cols),
    ]
    for m in sorted(tab):
        lines.append(
            ",".join(
                [str(x) for x in m]
                + [repr(tab[m]), repr(tab[m] * n_lambda(cfg, m))]
            )
        )
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_kernel(args):
    cfg = RankConfig(args.rank, args.q)
    sd = simple_rw_params(cfg)
    kern = assemble_kernel(sd, args.window)
    rho = spectral_gap(sd)
    rs = root_system(args.rank)
    if args.doob:
        tab = F0Table(cfg, args.window + 1)
        kern_out = doob_transform(kern, tab.log_f0, rho)
    else:
        kern_out = kern
    cols = (
        ["from_m%d" % (k + 1) for k in range(args.rank)]
        + ["to_m%d" % (k + 1) for k in range(args.rank)]
        + ["prob_num", "prob_den", "prob_float", "provenance"]
    )
    lines = [
        "# rank=%d" % args.rank,
        "# q=%d" % args.q,
        "# kernel=%s" % ("doob" if args.doob else "plain"),
        "# window=%d" % args.window,
        "# rho=%r" % float(rho),
        ",".join(cols),
    ]
    for lam in kern_out.states:
        if sum(lam) >= kern_out.window:
            continue
        prov = "closed_form" if rs.is_regular_dominant(lam) else "solved"
        for mu in sorted(kern_out.row(lam)):
            val = kern_out.row(lam)[mu]
            if isinstance(val, QSqrt) and val.is_rational:
                fr = val.as_fraction()
                num, den, flt = fr.numerator, fr.denominator, repr(float(val))
            else:
                num, den, flt = "", "", repr(float(val))
            lines.append(
                ",".join(
                    [str(x) for x in lam]
                    + [str(x) for x in mu]
                    + [str(num), str(den), flt, prov]
                )
            )
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def _parse_start(text, rank):
    if text is None:
        return (0,) * rank
    parts = tuple(int(x) for x in text.split(","))
    if len(parts) != rank or any(x < 0 for x in parts):
        raise SystemExit("start must be %d nonnegative integers" % rank)
    return parts


def cmd_dp(args):
    cfg = RankConfig(args.rank, args.q)
    sd = simple_rw_params(cfg)
    start = _parse_start(args.start, args.rank)
    window = args.window or (sum(start) + args.steps + 2)
    kern = assemble_kernel(sd, window)
    if args.kernel == "doob":
        tab = F0Table(cfg, window + 1)
        kern = doob_transform(kern, tab.log_f0, spectral_gap(sd))
    law = dp_law(kern, start, args.steps)
    cols = ["m%d" % (k + 1) for k in range(args.rank)] + ["mass"]
    lines = [
        "# rank=%d" % args.rank,
        "# q=%d" % args.q,
        "# kernel=%s" % args.kernel,
        "# window=%d" % window,
        "# steps=%d" % args.steps,
        "# start=%s" % ",".join(str(x) for x in start),
        ",".join(cols),
    ]
    for m in sorted(law.support):
        lines.append(
            ",".join([str(x) for x in m] + [repr(float(law.support[m]))])
        )
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_simulate(args):
    cfg = RankConfig(args.rank, args.q)
    sd = simple_rw_params(cfg)
    start = _parse_start(args.start, args.rank)
    window = args.window or (sum(start) + args.steps + 2)
    kern = assemble_kernel(sd, window)
    if args.kernel == "doob":
        tab = F0Table(cfg, window + 1)
        kern = doob_transform(kern, tab.log_f0, spectral_gap(sd))
    paths = mc_paths(kern, start, args.steps, args.paths, args.seed)
    cols = ["path", "step"] + ["m%d" % (k + 1) for k in range(args.rank)]
    lines = [
        "# rank=%d" % args.rank,
        "# q=%d" % args.q,
        "# kernel=%s" % args.kernel,
        "# window=%d" % window,
        "# seed=%d" % args.seed,
        ",".join(cols),
    ]
    for p in range(paths.shape[0]):
        for s in range(paths.shape[1]):
            m = kern.states[paths[p, s]]
            lines.append(",".join([str(p), str(s)] + [str(x) for x in m]))
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_ibm(args):
    samples = gue_sampler(args.rank, args.t, args.samples, args.seed)
    cols = ["x%d" % (k + 1) for k in range(args.rank + 1)]
    lines = [
        "# rank=%d" % args.rank,
        "# t=%r" % args.t,
        "# seed=%d" % args.seed,
        "# sigma2_per_t=%r" % gue_sigma2_per_t(args.rank),
        ",".join(cols),
    ]
    for row in samples:
        lines.append(",".join(repr(float(x)) for x in row))
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def _parse_override(text):
    if "=" not in text:
        raise SystemExit("override must look like key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def cmd_experiment(args):
    fn = EXPERIMENTS[args.experiment]
    overrides = [_parse_override(o) for o in args.override or []]
    if args.config:
        config = ExperimentConfig.from_json(args.config, overrides)
    else:
        config = ExperimentConfig()
        for key, value in overrides:
            if not hasattr(config, key):
                raise SystemExit("unknown config key %r" % key)
            setattr(config, key, value)
        config.__post_init__()
    report = fn(config)
    outdir = args.out or config.outdir or ("chamberwalk_out/%s" % args.experiment)
    write_report(outdir, report, figures=not args.no_figures)
    summary = {
        "experiment": report.name,
        "passed": report.passed,
        "passes": report.passes,
        "outdir": outdir,
    }
    print(json.dumps(summary, sort_keys=True, indent=2))
    return 0 if report.passed else 2


def build_parser():
    top = argparse.ArgumentParser(
        prog="chamberwalk",
        description="Radial random walks on A_r affine buildings and their "
        "Weyl-chamber Brownian limit.",
    )
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("root-data", help="roots, weights and orbit tables as JSON")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_root_data)

    p = sub.add_parser("q-table", help="q_t exponents and sphere sizes as CSV")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_q_table)

    p = sub.add_parser("f0-table", help="F0 values and envelope ratios as CSV")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_f0_table)

    p = sub.add_parser("pn", help="n-step per-vertex probabilities by quadrature")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_pn)

    p = sub.add_parser("kernel", help="one-step radial kernel rows as CSV")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--doob", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("dp", help="exact n-step law by dynamic programming")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--kernel", choices=["plain", "doob"], default="plain")
    p.add_argument("--start", default=None, help="comma-separated coordinates")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_dp)

    p = sub.add_parser("simulate", help="Monte Carlo paths of the radial walk")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kernel", choices=["plain", "doob"], default="doob")
    p.add_argument("--start", default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ibm", help="samples of the chamber Brownian motion (GUE)")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ibm)

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help="experiment: %s" % name)
        p.add_argument("--config", default=None, help="JSON config path")
        p.add_argument("--override", action="append", metavar="key=val")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--no-figures", action="store_true")
        p.set_defaults(func=cmd_experiment, experiment=name)

    return top


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
