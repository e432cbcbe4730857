"""Command line entry point: ``lab``."""
from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from ..levelset import LevelSetGeometry, verify_lev_bounds
from ..weights import WeightField, whitney_cover
from .config import build_model, load_config, load_model_file
from .runner import (DESCRIPTIONS, load_baselines, run_experiment, save_baselines, summary_text,
                     write_report)
from .experiments import REGISTRY


def _config(args):
    cfg = load_config(args.config, args.experiment)
    if args.model:
        cfg.model = load_model_file(args.model)
    return cfg


def cmd_list(args):
    for name in sorted(REGISTRY):
        print(f"{name:20s} {DESCRIPTIONS.get(name, '')}")
    return 0


def cmd_run(args):
    cfg = _config(args)
    rep = run_experiment(args.experiment, cfg, load_baselines(args.baselines))
    paths = write_report(rep, args.out)
    sys.stdout.write(summary_text(rep))
    print(f"wrote {len(paths)} files to {args.out} ({rep.seconds:.1f} s)")
    return 0 if rep.passed else 1


def cmd_baseline(args):
    if args.action != "update":
        raise SystemExit(f"unknown baseline action {args.action!r}")
    cfg = _config(args)
    rep = run_experiment(args.experiment, cfg, None)
    data = load_baselines(args.baselines)
    data[args.experiment] = {k: float(v) for k, v in sorted(rep.stats.items())}
    save_baselines(data, args.baselines)
    for k, v in sorted(rep.stats.items()):
        print(f"{args.experiment}.{k} = {v:.6g}")
    return 0


def _model_arg(args):
    return build_model(load_model_file(args.model))


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_levelset(args):
    model = _model_arg(args)
    geo = LevelSetGeometry(model, args.eps, args.delta, tuple(args.x_range))
    fh = _open_out(args.out)
    w = csv.writer(fh, lineterminator="\n")
    if args.raster:
        X, Y, D = geo.raster(args.nx, args.ny)
        w.writerow(["x", "y", "d_eps"])
        for x, y, d in zip(X.ravel(), Y.ravel(), D.ravel()):
            w.writerow([repr(float(x)), repr(float(y)), repr(float(d))])
    elif args.stats:
        zs = _stat_points(model, args)
        st = verify_lev_bounds(model, zs, args.eps, args.delta)
        w.writerow(["x", "y", "d0", "d_eps", "bound", "ratio", "knorm2"])
        for p in st.reports:
            w.writerow([repr(p.z.real), repr(p.z.imag), repr(p.d0), repr(p.d_eps), repr(p.bound),
                        repr(p.ratio), repr(p.knorm2)])
    else:
        w.writerow(["level", "x", "y", "abs_theta"])
        for which, lev in (("eps", args.eps), ("delta", args.delta)):
            for x, y, t in geo.boundary(which).samples():
                w.writerow([repr(lev), repr(float(x)), repr(float(y)), repr(float(t))])
    if args.out:
        fh.close()
    return 0


def _stat_points(model, args):
    # a grid over the window, kept where |Theta| >= delta
    lo, hi = args.x_range
    X, Y = np.meshgrid(np.linspace(lo, hi, args.nx), np.linspace(0.0, args.y_max, args.ny + 1)[1:])
    Z = (X + 1j * Y).ravel()
    return Z[model.abs_theta(Z) >= args.delta]


def cmd_weights(args):
    model = _model_arg(args)
    fh = _open_out(args.out)
    w = csv.writer(fh, lineterminator="\n")
    lo, hi = args.x_range
    if args.cover:
        cover = whitney_cover(model, args.eps, args.delta, (lo, hi), kappa=args.kappa, L_max=args.l_max)
        w.writerow(["a", "b", "dist"])
        for a, b, d in cover.rows():
            w.writerow([repr(float(a)), repr(float(b)), repr(float(d))])
    else:
        kw = {}
        if args.kind in ("W_main", "W_tilde"):
            geo = LevelSetGeometry(model, args.eps, args.delta, (lo - 2, hi + 2))
            kw = {"eps": args.eps, "delta": args.delta, "geometry": geo}
            if args.kind == "W_tilde":
                kw = {"cover": whitney_cover(model, args.eps, args.delta, (lo, hi), kappa=args.kappa,
                                             L_max=args.l_max, geometry=geo)}
        elif args.kind == "W_one1":
            kw = {"delta": args.delta}
        elif args.kind == "W_spec":
            from ..weights import spectral_data
            kw = {"spectral": spectral_data(model, (lo - args.margin, hi + args.margin), r0=args.r0)}
        W = WeightField(args.kind, model, **kw)
        xs = np.linspace(lo, hi, args.nx)
        ys = np.linspace(0.0, args.y_max, args.ny)
        X, Y = np.meshgrid(xs, ys)
        Z = (X + 1j * Y).ravel()
        om = W.relative(Z)
        le = model.log_E(Z)[0].real
        w.writerow(["x", "y", "omega", "log_W"])
        for z, o, l in zip(Z, om, le):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(o)), repr(float(np.log(o) - l))])
    if args.out:
        fh.close()
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="lab", description="de Branges / Fock weight laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list experiments").set_defaults(func=cmd_list)

    r = sub.add_parser("run", help="run one experiment")
    r.add_argument("experiment", choices=sorted(REGISTRY))
    r.add_argument("--config", help="YAML config (default: packaged config)")
    r.add_argument("--out", default="out", help="output directory")
    r.add_argument("--model", help="YAML model file overriding the config's model")
    r.add_argument("--baselines", help="baselines JSON (default: packaged)")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("baseline", help="record baseline statistics")
    b.add_argument("action", choices=["update"])
    b.add_argument("experiment", choices=sorted(REGISTRY))
    b.add_argument("--config")
    b.add_argument("--model")
    b.add_argument("--baselines")
    b.set_defaults(func=cmd_baseline)

    for name, fn, help_ in (("levelset", cmd_levelset, "eps/delta level curves as CSV"),
                            ("weights", cmd_weights, "weight raster or interval cover as CSV")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--model", required=True, help="YAML model file")
        s.add_argument("--eps", type=float, default=0.1)
        s.add_argument("--delta", type=float, default=0.5)
        s.add_argument("--x-range", type=float, nargs=2, default=[-4.0, 4.0])
        s.add_argument("--out", help="CSV path (default: stdout)")
        s.add_argument("--y-max", type=float, default=2.0)
        s.add_argument("--nx", type=int, default=81)
        s.add_argument("--ny", type=int, default=21)
        s.set_defaults(func=fn)
        if name == "levelset":
            g = s.add_mutually_exclusive_group()
            g.add_argument("--raster", action="store_true", help="distance field d_eps on a grid")
            g.add_argument("--stats", action="store_true", help="distance ratios on grid points outside Omega_delta")
        if name == "weights":
            s.add_argument("--kind", default="W0",
                           choices=["W0", "W_main", "W_tilde", "W_one1", "W_one2", "W2", "W_spec"])
            s.add_argument("--cover", action="store_true", help="emit the interval cover instead")
            s.add_argument("--kappa", type=float, default=0.25)
            s.add_argument("--l-max", type=float, default=1.0)
            s.add_argument("--r0", type=float, default=None, help="spectral disc radius constant")
            s.add_argument("--margin", type=float, default=2.0, help="node range beyond the x window")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
