"""Command-line front end: ``histoq <subcommand> [flags]``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
Bare invocations use the parameters of the corresponding published figure.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

import numpy as np

from . import continuum, discrete, histories
from .hilbert import HilbertError, Tolerances, classify_set, candidate_probability
from .histories import conditional_probability
from .modelfile import ModelFileError, load_model
from .quadrature import QuadratureError, QuadratureSpec
from .report import Report, clean_fixed

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


class ConfigError(ValueError):
    pass


def _tolerances(args) -> Tolerances:
    try:
        return Tolerances(args.tol_md, args.tol_rlp, args.tol_lp)
    except HilbertError as exc:
        raise ConfigError(str(exc)) from None


def _tol_dict(t: Tolerances) -> dict:
    return {"md": t.md, "rlp": t.rlp, "lp": t.lp}


def _map(fn, items, jobs):
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _grid(lo, hi, n, name):
    if n < 1:
        raise ConfigError(f"{name} needs at least one point")
    if n == 1:
        return np.array([float(lo)])
    return np.linspace(lo, hi, n)


# --------------------------------------------------------------------------


def cmd_threebox(args) -> Report:
    tb = discrete.three_box_model()
    tol = _tolerances(args)
    rep = Report("threebox", {}, ["table", "label", "value", "provenance"], tolerances=_tol_dict(tol))
    for label, c in zip(tb.coarse_set.labels, tb.coarse_set.members):
        rep.add("coarse", label, clean_fixed(candidate_probability(tb.psi, c)), "threebox:coarse-set")
    for label, c in zip(tb.fine_set.labels, tb.fine_set.members):
        rep.add("fine", label, clean_fixed(candidate_probability(tb.psi, c)), "threebox:fine-set")
    cond = tb.phi_condition()
    for i_a in (0, 1):
        for i_b in (0, 1):
            label = f"({tb.box_a.labels[i_a]},{tb.box_b.labels[i_b]}|{tb.final.labels[0]})"
            value = conditional_probability(tb.psi, tb.conditioned(i_a, i_b), cond)
            rep.add("conditional", label, clean_fixed(value), "threebox:conditionals")
    for name, s in (("coarse", tb.coarse_set), ("fine", tb.fine_set)):
        c = classify_set(tb.psi, s, tol)
        rep.add("verdict", name, c.verdict.value, "classify:decision-ladder")
        rep.summary[name] = {"verdict": c.verdict.value, "md_residual": c.md_residual,
                             "rlp_residual": c.rlp_residual, "lp_violation": c.lp_violation}
    return rep


def cmd_spin(args) -> Report:
    delta = args.delta
    if not 0 <= delta <= math.pi:
        raise ConfigError("delta must lie in [0, pi]")
    theta = _grid(args.theta_min, args.theta_max, args.n_theta, "theta grid")
    phi = _grid(args.phi_min, args.phi_max, args.n_phi, "phi grid")
    if theta.min() < 0 or theta.max() > math.pi or phi.min() < 0 or phi.max() >= 2 * math.pi:
        raise ConfigError("theta must lie in [0, pi] and phi in [0, 2 pi)")
    tol = _tolerances(args)
    rep = Report("spin", {"delta": delta, "theta": [args.theta_min, args.theta_max, args.n_theta],
                          "phi": [args.phi_min, args.phi_max, args.n_phi]},
                 ["theta", "phi", "p++", "p+-", "p-+", "p--", "lp_flag", "md_residual", "provenance"],
                 tolerances=_tol_dict(tol))
    geom = discrete.SpinGeometry(delta)
    region = discrete.spin_positivity_region(delta, theta, phi)
    for i, th in enumerate(theta):
        for j, ph in enumerate(phi):
            s = discrete.SpinState(float(th), float(ph))
            p = discrete.spin_candidate_probabilities(s, geom)
            md = max(abs(z) for z in discrete.spin_md_offdiagonals(s, geom))
            rep.add(float(th), float(ph), *p, bool(region.positive[i, j]), md, "spin:closed-form")
    rep.summary = {"cells": int(region.positive.size), "negative_cells": region.negative_cells,
                   "threshold": region.threshold}
    return rep


DEFAULT_WIDTHS = (12.0, 10.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0)


def cmd_twoslit(args) -> Report:
    try:
        g = continuum.TwoSlitGeometry.from_dimensionless(args.kd, args.kD)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    q = _quad(args)
    y_range = (args.y_min, args.y_max)
    if not args.y_max > args.y_min:
        raise ConfigError("need y-max > y-min")
    params = {"kd": args.kd, "kD": args.kD, "k": 1.0, "y_range": list(y_range)}
    if args.densities:
        ys = _grid(args.y_min, args.y_max, args.densities, "density grid")
        wu, wl, wt = continuum.two_slit_densities(ys, g)
        rep = Report("twoslit", params, ["y", "w_U", "w_L", "w_tot", "provenance"])
        for row in zip(ys, wu, wl, wt):
            rep.add(*map(float, row), "twoslit:density")
        return rep
    search = continuum.min_lp_binwidth(g, y_range, DEFAULT_WIDTHS, q)
    width = args.width if args.width is not None else search.width
    if width is None:
        raise ConfigError("no width in the default list gives positive bins; pass --width")
    params["width"] = width
    edges = continuum.uniform_bins(y_range, width)
    table = continuum.two_slit_bin_table(g, edges, q)
    rep = Report("twoslit", params, ["y_lo", "y_hi", "p_U", "p_L", "p_tot", "provenance"])
    for lo, hi, (pu, pl) in zip(edges[:-1], edges[1:], table):
        rep.add(float(lo), float(hi), float(pu), float(pl), float(pu + pl), "twoslit:bin-integral")
    rep.summary = {"fringe_spacing": g.fringe_spacing, "smallest_positive_width": search.width,
                   "tested_widths": list(DEFAULT_WIDTHS), "min_bin_probability": float(table.min()),
                   "linearly_positive": bool(table.min() >= 0)}
    return rep


def _particle_point(h, lam, q):
    return continuum.localization_probability(h, continuum.GaussianPacket(), lam, q)


def cmd_particle(args) -> Report:
    lam = args.lambda_over_sigma
    if lam <= 0:
        raise ConfigError("lambda/sigma must be positive")
    q = _quad(args)
    deltas = _grid(0.0, args.delta_max, args.n, "delta grid")
    vals = _map(partial(_particle_point, lam=lam, q=q), [float(d) for d in deltas], args.jobs)
    rep = Report("particle", {"lambda_over_sigma": lam, "delta_max": args.delta_max, "n": args.n},
                 ["delta_over_sigma", "p_L", "p_Lbar", "provenance"])
    for d, v in zip(deltas, vals):
        rep.add(float(d), v, 1.0 - v, "particle:localization")
    rep.summary = {"min_p_L": min(vals), "max_p_L": max(vals)}
    return rep


def _spacetime_point(X, k0, q):
    packet, T = continuum.packet_for_centre(X, k0)
    r = continuum.spacetime_remain_probability(packet, T, q, check_regime=False)
    d = continuum.spacetime_decoherence(packet, T, q, check_regime=False)
    return r.value, d.value, r.in_validated_range


def cmd_spacetime(args) -> Report:
    q = _quad(args)
    xs = _grid(args.x_min, args.x_max, args.n, "X grid")
    vals = _map(partial(_spacetime_point, k0=args.k0_sigma, q=q), [float(x) for x in xs], args.jobs)
    rep = Report("spacetime", {"K0_sigma": args.k0_sigma, "X": [args.x_min, args.x_max, args.n]},
                 ["X_over_sigma", "p_R", "p_Rbar", "re_D", "im_D", "validated", "provenance"])
    for x, (p, d, ok) in zip(xs, vals):
        rep.add(float(x), p, 1.0 - p, d.real, d.imag, ok, "spacetime:images")
    rep.summary = {"min_p_R": min(v[0] for v in vals), "max_abs_re_D": max(abs(v[1].real) for v in vals)}
    return rep


def cmd_ensemble(args) -> Report:
    if not 0 <= args.amplitude <= 1:
        raise ConfigError("amplitude must lie in [0, 1]")
    if args.n_max < 1:
        raise ConfigError("n-max must be at least 1")
    z = args.amplitude * complex(math.cos(args.phase), math.sin(args.phase))
    hit = histories.ensemble_positivity_horizon(z, args.n_max)
    last = hit.n_total if hit else args.n_max
    rep = Report("ensemble", {"amplitude": args.amplitude, "phase": args.phase, "n_max": args.n_max},
                 ["N", "n_C", "p", "provenance"])
    for n in range(1, last + 1):
        for k, v in enumerate(histories.ensemble_row(args.amplitude, args.phase, n)):
            rep.add(n, k, float(v), "ensemble:polar-form")
    rep.summary = {"horizon": None if hit is None else hit.n_total,
                   "witness": None if hit is None else {"N": hit.n_total, "n_C": hit.n_c, "p": hit.value}}
    return rep


def cmd_classify(args) -> Report:
    try:
        model = load_model(args.model)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.model}: {exc.strerror}") from None
    tol = model.tolerances or _tolerances(args)
    if args.tol_override:
        tol = _tolerances(args)
    c = classify_set(model.state, model.histories, tol)
    rep = Report("classify", {"model": Path(args.model).name, "name": model.name, "dimension": model.state.dim},
                 ["label", "p", "im", "provenance"], tolerances=_tol_dict(tol))
    for label, p, im in zip(c.labels, c.probabilities, c.imaginary_parts):
        rep.add(label, float(p), float(im), "classify:candidate-probability")
    rep.summary = c.to_dict()
    return rep


# --------------------------------------------------------------------------


def _quad(args) -> QuadratureSpec:
    try:
        return QuadratureSpec(args.quad_abs, args.quad_rel)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--tol-md", type=float, default=1e-8)
    common.add_argument("--tol-rlp", type=float, default=1e-8)
    common.add_argument("--tol-lp", type=float, default=1e-10)
    common.add_argument("--quad-abs", type=float, default=1e-10, help="absolute quadrature tolerance")
    common.add_argument("--quad-rel", type=float, default=1e-8, help="relative quadrature tolerance")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")

    p = argparse.ArgumentParser(prog="histoq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("threebox", parents=[common], help="three-box tables and verdicts")
    s.set_defaults(func=cmd_threebox)

    s = sub.add_parser("spin", parents=[common], help="spin-1/2 positivity scan")
    s.add_argument("--delta", type=float, default=math.pi / 2)
    s.add_argument("--theta-min", type=float, default=0.0)
    s.add_argument("--theta-max", type=float, default=math.pi)
    s.add_argument("--n-theta", type=int, default=51)
    s.add_argument("--phi-min", type=float, default=0.0)
    s.add_argument("--phi-max", type=float, default=math.pi)
    s.add_argument("--n-phi", type=int, default=51)
    s.set_defaults(func=cmd_spin)

    s = sub.add_parser("twoslit", parents=[common], help="two-slit bin probabilities")
    s.add_argument("--kd", type=float, default=60.0)
    s.add_argument("--kD", type=float, default=60.0)
    s.add_argument("--y-min", type=float, default=-60.0)
    s.add_argument("--y-max", type=float, default=60.0)
    s.add_argument("--width", type=float, default=None, help="bin width (default: smallest positive from a search)")
    s.add_argument("--densities", type=int, default=0, metavar="N", help="emit densities on N points instead")
    s.set_defaults(func=cmd_twoslit)

    s = sub.add_parser("particle", parents=[common], help="free-particle localization sweep")
    s.add_argument("--lambda-over-sigma", type=float, default=1e-2)
    s.add_argument("--delta-max", type=float, default=10.0, help="largest half-width, in units of sigma")
    s.add_argument("--n", type=int, default=100)
    s.set_defaults(func=cmd_particle)

    s = sub.add_parser("spacetime", parents=[common], help="remain-right probability sweep")
    s.add_argument("--k0-sigma", type=float, default=-20.0)
    s.add_argument("--x-min", type=float, default=-2.0)
    s.add_argument("--x-max", type=float, default=6.0)
    s.add_argument("--n", type=int, default=50)
    s.set_defaults(func=cmd_spacetime)

    s = sub.add_parser("ensemble", parents=[common], help="ensemble candidate probabilities")
    s.add_argument("--amplitude", type=float, default=0.5)
    s.add_argument("--phase", type=float, default=math.pi / 4)
    s.add_argument("--n-max", type=int, default=64)
    s.set_defaults(func=cmd_ensemble)

    s = sub.add_parser("classify", parents=[common], help="classify a JSON model file")
    s.add_argument("model")
    s.add_argument("--tol-override", action="store_true", help="use command-line tolerances over the file's")
    s.set_defaults(func=cmd_classify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", continuum.RegimeWarning)
            rep = args.func(args)
        text = rep.render(args.format)
    except (ConfigError, ModelFileError, HilbertError) as exc:
        print(f"histoq: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, ArithmeticError) as exc:
        print(f"histoq: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
