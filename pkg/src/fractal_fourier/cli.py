"""Command-line interface.

Subcommands: dims, bounds, fourier, decay, convolve, arith-check.  All
experiment parameters live in JSON config files (committed next to their
outputs they make reruns reproducible); every random choice funnels
through a single integer seed, defaulting to 0, never the clock.

Exit codes: 0 ok, 2 invalid config, 3 inconsistent profile, 4 resource
budget exceeded, 5 internal error.  FRACTAL_FOURIER_BUDGET overrides the
cylinder-leaf budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds as bnd
from . import dimensions as dims
from . import experiments as xp
from . import fourier as fr
from . import ifs as ifsmod
from .errors import (
    BadConfig,
    CenterInsideSupport,
    FractalFourierError,
    InconsistentProfile,
    InvalidIFS,
    MissingExponent,
    MissingHessianBound,
    NotApplicable,
    ResourceExceeded,
    SupportNotPositive,
    Unsupported,
)

_VALIDATION_ERRORS = (
    BadConfig,
    InvalidIFS,
    Unsupported,
    NotApplicable,
    MissingExponent,
    MissingHessianBound,
    SupportNotPositive,
    CenterInsideSupport,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INCONSISTENT = 3
EXIT_RESOURCE = 4
EXIT_INTERNAL = 5


def _budget() -> int:
    raw = os.environ.get("FRACTAL_FOURIER_BUDGET")
    if raw is None:
        return ifsmod.DEFAULT_LEAF_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise BadConfig(f"FRACTAL_FOURIER_BUDGET must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise BadConfig("FRACTAL_FOURIER_BUDGET must be positive")
    return value


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise BadConfig(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadConfig(f"{path} is not valid JSON: {exc}") from exc


def _dump_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require_fields(doc: dict, required, optional, what: str) -> None:
    missing = set(required) - set(doc)
    if missing:
        raise BadConfig(f"{what} missing fields: {sorted(missing)}")
    unknown = set(doc) - set(required) - set(optional)
    if unknown:
        raise BadConfig(f"{what} has unknown fields: {sorted(unknown)}")


_MAP_BUILDERS = {
    "square": lambda ifs, spec: fr.square_map(ifs),
    "cube": lambda ifs, spec: fr.cube_map(ifs),
    "identity": lambda ifs, spec: fr.identity_map(ifs),
    "sum_of_squares": lambda ifs, spec: fr.sum_of_squares_map(ifs),
    "constant": lambda ifs, spec: fr.constant_map(ifs, float(spec.get("value", 0.0))),
    "log": lambda ifs, spec: fr.log_map(ifs, float(spec.get("shift", 0.0))),
    "neg_log": lambda ifs, spec: fr.neg_log_map(ifs, float(spec.get("shift", 0.0))),
    "quadratic": lambda ifs, spec: _quadratic_from_spec(ifs, spec),
}


def _quadratic_from_spec(ifs, spec):
    comps = []
    for comp in spec["coefficients"]:
        comps.append({(int(p), int(q)): float(c) for p, q, c in comp})
    return fr.quadratic_map(
        ifs, comps, linear=spec.get("linear"), constant=spec.get("constant")
    )


def _build_map(ifs, spec: dict) -> fr.PushforwardMap:
    if "kind" not in spec:
        raise BadConfig("map spec needs a 'kind' field")
    kind = spec["kind"]
    if kind not in _MAP_BUILDERS:
        raise BadConfig(f"unknown map kind {kind!r} (have {sorted(_MAP_BUILDERS)})")
    return _MAP_BUILDERS[kind](ifs, spec)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- dims -------------------------------------------------------------------


def cmd_dims(args) -> int:
    doc = ifsmod.load_ifs(args.ifs)
    separation = args.separation or doc.declared_separation
    profile = dims.build_profile(doc.ifs, separation, doc.exponents)
    table = profile.to_dict()
    print(f"ambient dimension     k       = {profile.k}")
    print(f"similarity dim (set)  s       = {profile.s_sim_set:.6f}")
    print(f"similarity dim (meas) k_sim   = {profile.s_sim_meas:.6f}")
    print(f"correlation dim       kappa2  = {profile.kappa2:.6f}  [{profile.provenance.get('kappa2')}]")
    print(f"Assouad dim           kappa_* = {profile.kappa_star:.6f}  [{profile.provenance.get('kappa_star')}]")
    print(f"Frostman exponent     d_inf   = {profile.d_inf:.6f}  [{profile.provenance.get('d_inf')}]")
    if profile.kappa1 is not None:
        print(f"Fourier l^1 dim       kappa1  = {profile.kappa1:.6f}  [user_supplied]")
    print(f"ad_regular = {str(profile.ad_regular).lower()}")
    for w in profile.warnings:
        print(f"warning: {w}")
    if args.out:
        out = _out_dir(args)
        _dump_json(out / "profile.json", table)
        print(f"wrote {out / 'profile.json'}")
    return EXIT_OK


# -- bounds -----------------------------------------------------------------


def cmd_bounds(args) -> int:
    if args.profile:
        profile = dims.load_profile(args.profile)
    elif args.ifs:
        doc = ifsmod.load_ifs(args.ifs)
        separation = args.separation or doc.declared_separation
        profile = dims.build_profile(doc.ifs, separation, doc.exponents)
    else:
        raise BadConfig("bounds needs --ifs or --profile")
    curvature_ok = True if args.assume_curvature else None
    non_expanding = True if args.assume_non_expanding else None
    if args.ifs and non_expanding is None:
        doc = ifsmod.load_ifs(args.ifs)
        verdict = ifsmod.non_expanding_heuristic(doc.ifs)
        if verdict is ifsmod.GrowthVerdict.NON_EXPANDING:
            non_expanding = True
    bound = bnd.decay_bound(profile, curvature_ok=curvature_ok, non_expanding=non_expanding)
    report = bound.to_dict()
    report["profile"] = profile.to_dict()
    if args.thresholds:
        t2, t3 = bnd.symmetric_thresholds()
        report["thresholds"] = {"two_fold": t2, "three_fold": t3}
        print(f"symmetric thresholds: two-fold {t2:.9f}, three-fold {t3:.9f}")
    print(f"sigma = {bound.sigma:.9f} (best p = {bound.best_p})")
    if bound.gamma is not None:
        print(f"gamma = {bound.gamma:.9f}, (2-gamma)/gamma = {(2 - bound.gamma) / bound.gamma:.9f}")
    print(f"applicable = {str(bound.applicable).lower()}")
    for note in bound.notes:
        print(f"note: {note}")
    if args.vdc:
        value = bnd.vdc_exponent(profile, args.vdc, refined=args.refined)
        report["vdc_exponent"] = {"l": args.vdc, "refined": args.refined, "value": value}
        print(f"oscillatory exponent (l={args.vdc}, refined={args.refined}): {value:.6f}")
    if args.out:
        out = _out_dir(args)
        _dump_json(out / "bounds.json", report)
        print(f"wrote {out / 'bounds.json'}")
    return EXIT_OK


# -- fourier ----------------------------------------------------------------


def cmd_fourier(args) -> int:
    doc = ifsmod.load_ifs(args.ifs)
    budget = _budget()
    if args.xi_list:
        xis = np.array([float(x) for x in args.xi_list.split(",")])
    else:
        if args.count < 1:
            raise BadConfig("--count must be >= 1")
        xis = np.linspace(args.xi_min, args.xi_max, args.count)
    scheme = args.scheme
    if scheme == "recursion":
        samples = [fr.mu_hat(doc.ifs, x, tol=args.tol, budget=budget) for x in xis]
        values = np.array([s.value for s in samples])
        errors = np.array([s.error_bound for s in samples])
        leaves = np.array([s.leaves_used for s in samples])
        scheme_name = "exact_recursion"
    else:
        if not args.map:
            raise BadConfig("order0/order1 schemes need --map")
        pmap = _build_map(doc.ifs, json.loads(args.map))
        values, errors, leaves = fr.pushforward_batch(
            doc.ifs,
            pmap,
            xis,
            tol=args.tol,
            scheme=scheme,
            threads=args.threads,
            budget=budget,
        )
        scheme_name = scheme
    out = Path(args.out or "fourier.csv")
    fr.write_samples_csv(out, xis, values, errors, scheme_name, leaves)
    print(f"wrote {out} ({len(xis)} rows)")
    return EXIT_OK


# -- decay ------------------------------------------------------------------


_DECAY_REQUIRED = ("ifs", "map", "octaves")
_DECAY_OPTIONAL = (
    "samples_per_octave",
    "seed",
    "tol",
    "scheme",
    "separation",
    "theoretical_sigma",
)


def cmd_decay(args) -> int:
    cfg = _load_json(args.config)
    _require_fields(cfg, _DECAY_REQUIRED, _DECAY_OPTIONAL, "decay config")
    base = Path(args.config).parent
    doc = ifsmod.load_ifs(base / cfg["ifs"])
    pmap = _build_map(doc.ifs, cfg["map"])
    octaves = tuple(int(o) for o in cfg["octaves"])
    if len(octaves) != 2:
        raise BadConfig("octaves must be [first, last]")
    theoretical = cfg.get("theoretical_sigma")
    if theoretical is None:
        separation = cfg.get("separation", doc.declared_separation)
        profile = dims.build_profile(doc.ifs, separation, doc.exponents)
        theoretical = bnd.decay_bound(profile).sigma
    experiment = xp.measure_decay_slope(
        doc.ifs,
        pmap,
        octaves=octaves,
        samples_per_octave=int(cfg.get("samples_per_octave", 64)),
        seed=int(cfg.get("seed", 0)),
        tol=float(cfg.get("tol", 1e-3)),
        scheme=cfg.get("scheme", "order1"),
        theoretical_sigma=theoretical,
        threads=args.threads,
    )
    out = _out_dir(args)
    xp.write_octave_csv(out / "octaves.csv", experiment)
    fr.write_samples_csv(
        out / "samples.csv",
        experiment.frequencies,
        experiment.values,
        experiment.error_bounds,
        experiment.scheme,
        experiment.leaves,
    )
    summary = experiment.to_summary()
    verdict = (
        "empirical decay is at least the theoretical bound"
        if theoretical is not None and experiment.empirical_exponent >= theoretical
        else "empirical decay below the theoretical bound (check reliability warnings)"
    )
    summary["verdict_note"] = verdict
    _dump_json(out / "summary.json", summary)
    print(
        f"fitted slope {experiment.fitted_slope:.4f} "
        f"(empirical exponent {experiment.empirical_exponent:.4f}, "
        f"theoretical sigma {theoretical if theoretical is None else round(theoretical, 6)})"
    )
    print(f"wrote {out / 'octaves.csv'}, {out / 'samples.csv'}, {out / 'summary.json'}")
    return EXIT_OK


# -- convolve ---------------------------------------------------------------


_CONV_REQUIRED = ("factors",)
_CONV_OPTIONAL = (
    "max_frequency",
    "density_points",
    "density_budget",
    "tol",
    "seed",
)


def cmd_convolve(args) -> int:
    cfg = _load_json(args.config)
    _require_fields(cfg, _CONV_REQUIRED, _CONV_OPTIONAL, "convolve config")
    base = Path(args.config).parent
    factors = []
    for entry in cfg["factors"]:
        _require_fields(entry, ("ifs",), ("map",), "factor")
        doc = ifsmod.load_ifs(base / entry["ifs"])
        spec = entry.get("map", {"kind": "log"})
        kind = spec.get("kind", "log")
        shift = float(spec.get("shift", 0.0))
        if kind == "log":
            factors.append(xp.log_factor(doc.ifs, shift))
        elif kind == "neg_log":
            factors.append(xp.neg_log_factor(doc.ifs, shift))
        else:
            raise BadConfig("convolution factors use map kinds 'log' or 'neg_log'")
    experiment = xp.multiplicative_convolution(
        factors,
        max_frequency=float(cfg.get("max_frequency", 2.0**14)),
        density_points=int(cfg.get("density_points", 512)),
        density_budget=float(cfg.get("density_budget", 0.01)),
        tol=float(cfg.get("tol", 1e-4)),
        threads=args.threads,
        budget=_budget(),
    )
    out = _out_dir(args)
    xp.write_density_csv(out / "density.csv", experiment)
    fr.write_samples_csv(
        out / "product_transform.csv",
        experiment.frequencies,
        experiment.product,
        experiment.product_error,
        "order1-product",
        np.zeros(len(experiment.frequencies), dtype=int),
    )
    _dump_json(out / "summary.json", experiment.to_summary())
    print(
        f"mass {experiment.mass:.4f}, certified inversion error "
        f"{experiment.density_error_certified:.2e}, tail estimate {experiment.tail_estimate:.2e}"
    )
    print(f"L1/L2 octave slopes: {experiment.l1_octave_slope:.3f} / {experiment.l2_octave_slope:.3f}")
    print(f"wrote {out / 'density.csv'}, {out / 'product_transform.csv'}, {out / 'summary.json'}")
    return EXIT_OK


# -- arith-check ------------------------------------------------------------


def cmd_arith_check(args) -> int:
    kind = args.check
    vals = [float(v) for v in args.values]
    report: dict = {"check": kind, "inputs": vals}
    if kind == "two-set":
        if len(vals) != 2:
            raise BadConfig("two-set needs exactly 2 dimensions")
        verdict = bnd.two_set_condition(*vals)
        margin = vals[0] * vals[1] + max(
            1.5 * vals[0] + vals[1], 1.5 * vals[1] + vals[0]
        ) - 2.5
        report.update({"verdict": verdict, "margin": margin})
        if abs(margin) < 1e-9:
            report["note"] = "boundary case: strict inequality fails"
    elif kind == "three-set":
        if len(vals) != 3:
            raise BadConfig("three-set needs exactly 3 dimensions")
        report["verdict"] = bnd.three_set_condition(*vals)
    elif kind == "two-measures":
        if len(vals) != 2:
            raise BadConfig("two-measures needs 2 correlation dimensions")
        verdict, bullets = bnd.two_measure_density_conditions(
            vals[0], vals[1], args.ad_regular
        )
        report.update(
            {"verdict": verdict, "satisfied_bullets": list(bullets), "note": bnd.TWO_MEASURE_NOTE}
        )
    elif kind == "log-sigma":
        if len(vals) != 1:
            raise BadConfig("log-sigma needs 1 correlation dimension")
        report["sigma"] = bnd.log_pushforward_sigma(vals[0])
        report["verdict"] = True
    elif kind == "high-dim":
        if len(vals) != 2:
            raise BadConfig("high-dim needs k and kappa2")
        report["verdict"] = bnd.high_dim_condition(int(vals[0]), vals[1])
    elif kind == "thresholds":
        t2, t3 = bnd.symmetric_thresholds()
        report.update({"two_fold": t2, "three_fold": t3, "verdict": True})
    else:  # pragma: no cover - argparse restricts choices
        raise BadConfig(f"unknown check {kind!r}")
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractal-fourier",
        description=(
            "Self-similar measures: dimension profiles, decay-bound calculators, "
            "certified Fourier evaluation, and nonlinear-arithmetic experiments."
        ),
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="max worker threads; outputs are identical for any value",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", help="compute a dimension profile from an IFS file")
    p.add_argument("--ifs", required=True, help="IFS description JSON")
    p.add_argument("--separation", choices=ifsmod.SEPARATION_KINDS, default=None,
                   help="override the file's declared separation")
    p.add_argument("--out", default=None, help="directory for profile.json")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("bounds", help="decay exponents and condition report")
    p.add_argument("--ifs", default=None)
    p.add_argument("--profile", default=None, help="profile.json from 'dims'")
    p.add_argument("--separation", choices=ifsmod.SEPARATION_KINDS, default=None)
    p.add_argument("--thresholds", action="store_true", help="include t2/t3 thresholds")
    p.add_argument("--vdc", type=int, default=None, metavar="L",
                   help="include the holomorphic exponent for derivative order L")
    p.add_argument("--refined", action="store_true")
    p.add_argument("--assume-curvature", action="store_true",
                   help="declare the curvature hypothesis verified")
    p.add_argument("--assume-non-expanding", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("fourier", help="evaluate transforms on a frequency sweep")
    p.add_argument("--ifs", required=True)
    p.add_argument("--scheme", choices=("recursion", "order0", "order1"),
                   default="recursion")
    p.add_argument("--map", default=None, help="JSON map spec for order0/order1")
    p.add_argument("--xi-min", type=float, default=0.0)
    p.add_argument("--xi-max", type=float, default=100.0)
    p.add_argument("--count", type=int, default=101)
    p.add_argument("--xi-list", default=None, help="comma-separated frequencies")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", default=None, help="output CSV path")
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("decay", help="per-octave decay-slope experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="decay_out")
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("convolve", help="multiplicative convolution experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="convolve_out")
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("arith-check", help="closed-form arithmetic condition checkers")
    p.add_argument(
        "check",
        choices=(
            "two-set",
            "three-set",
            "two-measures",
            "log-sigma",
            "high-dim",
            "thresholds",
        ),
    )
    p.add_argument("values", nargs="*", help="numeric arguments for the check")
    p.add_argument("--ad-regular", action="store_true",
                   help="second measure is AD-regular (two-measures)")
    p.set_defaults(func=cmd_arith_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InconsistentProfile as exc:
        print(f"inconsistent profile: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except ResourceExceeded as exc:
        print(f"resource exceeded ({exc.budget_name}): {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except FractalFourierError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - safety net
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
