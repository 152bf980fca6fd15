"""Command-line entry point: ``twlab {figure1,verify-ordering,lpp,tails,sample}``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ensemble import beta_grid, coupled_curves, curve_diagnostics, curves_array, edge_rescale, sample_beta_ensemble
from .errors import InsufficientDataError, InvalidParameterError
from .lpp import (
    SymmetryKind,
    WeightGrid,
    WeightLaw,
    centering_for,
    last_passage,
    rescale_lpp,
    verify_couplings,
)
from .ordering import (
    admissible_alpha_range,
    admissible_s_range,
    coupled_tw_samples,
    coupling_from_alpha,
    coupling_from_s,
    dominance_test,
    pathwise_spectrum_check,
    synthetic_tail_samples,
    tail_slope,
    tail_theory,
)
from .output import RunConfig, write_csv, write_json
from .rng import make_stream
from .runner import default_threads, parallel_map
from .sao import SaoGrid, sample_tw
from .svg import line_chart

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
CHUNK = 100
# Stream-id offsets keep every family of tasks on disjoint streams.
COUPLED_IDS = 1_000_000
PROBE_IDS = 2_000_000
LPP_FLUCT_IDS = 3_000_000


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--threads", type=int, default=None)


def _grid_flags(p, L=10.0, h=0.01):
    p.add_argument("--grid-L", type=float, default=L)
    p.add_argument("--grid-h", type=float, default=h)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"twlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure1", help="coupled beta-ensemble eigenvalue curves versus beta")
    _common(p)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--beta-min", type=float, default=1.0)
    p.add_argument("--beta-max", type=float, default=30.0)
    p.add_argument("--beta-step", type=float, default=0.1)

    p = sub.add_parser("verify-ordering", help="pathwise and statistical checks of TW_beta >= alpha TW_beta'")
    _common(p)
    _grid_flags(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--beta-prime", type=float, required=True)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--n", type=int, default=2000, help="coupled samples per dominance test")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--strict", action="store_true", help="refuse parameters outside the admissible range")

    p = sub.add_parser("lpp", help="last-passage coupling checks and fluctuations")
    _common(p)
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--weights", type=str, default="exp", help="'exp' or 'geom:q'")

    p = sub.add_parser("tails", help="tail exponent fits")
    _common(p)
    _grid_flags(p)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--synthetic", action="store_true", help="fit exact-quantile samples of the theoretical tail law")

    p = sub.add_parser("sample", help="raw TW_beta or beta-ensemble samples")
    _common(p)
    _grid_flags(p)
    p.add_argument("--source", choices=("sao", "ensemble"), default="sao")
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--n", type=int, default=1000, help="number of samples")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--size", type=int, default=100, help="matrix size for --source ensemble")
    return parser


def _config(args) -> RunConfig:
    params = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()
              if k not in ("command", "seed", "out", "threads")}
    return RunConfig(args.command, args.seed, str(args.out), params)


def _require(cond: bool, msg: str):
    if not cond:
        raise UsageError(msg)


def _grid(args) -> SaoGrid:
    try:
        return SaoGrid(args.grid_L, args.grid_h)
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from exc


# figure1 ---------------------------------------------------------------------

def cmd_figure1(args) -> int:
    _require(args.n >= 1, "--n must be positive")
    _require(1 <= args.k <= args.n, "--k must lie in [1, n]")
    _require(0 < args.beta_min < args.beta_max and args.beta_step > 0, "need 0 < beta-min < beta-max and beta-step > 0")
    cfg = _config(args)
    betas = beta_grid(args.beta_min, args.beta_max, args.beta_step)
    rows = coupled_curves(args.seed, args.n, betas, args.k)
    write_csv(args.out / "curves.csv", cfg, ["beta", "index", "value"], rows)
    curves = curves_array(rows, args.k)
    series = [(f"eigenvalue {i + 1}", betas.tolist(), curves[:, i].tolist()) for i in range(args.k)]
    line_chart(
        args.out / "figure1.svg",
        series,
        title=f"Top {args.k} rescaled eigenvalues, n={args.n}",
        x_label="beta",
        y_label="(lambda - 2 sqrt(n)) n^(1/6) / beta^(2/3)",
        metadata=cfg.header_line()[2:],
    )
    print(json.dumps(curve_diagnostics(curves), sort_keys=True))
    return EXIT_OK


# verify-ordering ---------------------------------------------------------------

def _coupled(params, grid, n, base_id, seed, threads):
    chunks = [(base_id + c, min(CHUNK, n - c * CHUNK)) for c in range(math.ceil(n / CHUNK))]
    parts = parallel_map(lambda t: coupled_tw_samples(make_stream(seed, t[0]), params, grid, t[1]), chunks, threads)
    return np.concatenate(parts)


def cmd_verify_ordering(args) -> int:
    _require(args.beta > 0, "--beta must be positive")
    _require(args.beta_prime > args.beta, "--beta-prime must exceed --beta")
    _require(not (args.s is not None and args.alpha is not None), "give at most one of --s and --alpha")
    _require(args.trials >= 1 and args.k >= 1, "--trials and --k must be positive")
    _require(args.n >= 100, "--n must be at least 100 for the dominance test")
    _require(0 < args.delta < 1, "--delta must lie in (0, 1)")
    grid = _grid(args)
    if args.alpha is not None:
        _require(args.alpha > 0, "--alpha must be positive")
        params = coupling_from_alpha(args.beta, args.beta_prime, args.alpha)
    else:
        s = 1.0 if args.s is None else args.s
        _require(s > 0, "--s must be positive")
        params = coupling_from_s(args.beta, args.beta_prime, s)
    s_lo, s_hi = admissible_s_range(args.beta, args.beta_prime)
    a_lo, a_hi = admissible_alpha_range(args.beta, args.beta_prime)
    if args.strict and not params.admissible:
        raise UsageError(
            f"s={params.s:.6g} (alpha={params.alpha:.6g}) lies outside the admissible range "
            f"[{s_lo:.6g}, {s_hi:.6g}] (alpha in [{a_lo:.6g}, {a_hi:.6g}]); the difference operator "
            "has a negative coefficient and the ordering is not guaranteed"
        )
    cfg = _config(args)
    threads = args.threads or default_threads()

    reports = parallel_map(lambda t: pathwise_spectrum_check(make_stream(args.seed, t), params, grid, args.k),
                           range(args.trials), threads)
    eig_violations = sum(r.violations for r in reports)
    psd_failures = sum(not r.psd_certificate.psd for r in reports)

    pairs = _coupled(params, grid, args.n, COUPLED_IDS, args.seed, threads)
    pair_violations = int(np.count_nonzero(pairs[:, 0] < params.alpha * pairs[:, 1] - 1e-6))
    test = dominance_test(pairs[:, 0], pairs[:, 1], params.alpha, args.delta)

    probes = []
    probe_alphas = [0.9 * a_lo, a_lo, 0.5 * (a_lo + a_hi), a_hi, 1.1 * a_hi]
    for i, alpha in enumerate(probe_alphas):
        pp = coupling_from_alpha(args.beta, args.beta_prime, alpha)
        sp = _coupled(pp, grid, args.n, PROBE_IDS + 10_000 * i, args.seed, threads)
        pt = dominance_test(sp[:, 0], sp[:, 1], alpha, args.delta)
        probes.append({
            "alpha": alpha,
            "s": pp.s,
            "admissible": pp.admissible,
            "expected": "not rejected" if pp.admissible else "rejected",
            "verdict": pt.verdict,
            "D_plus": pt.d_plus,
            "threshold": pt.threshold,
            "empirical": not pp.admissible,
        })

    tails = {}
    for side in ("upper", "lower"):
        try:
            fit = tail_slope(pairs[:, 0], side)
            tails[side] = {"slope": fit.slope, "theory": tail_theory(args.beta)[side], "n_points": fit.n_points}
        except InsufficientDataError:
            tails[side] = None

    ok = eig_violations == 0 and psd_failures == 0 and pair_violations == 0
    payload = {
        "params": params.as_dict(),
        "grid": {"L": grid.L, "h": grid.h, "m": grid.m},
        "s_range": [s_lo, s_hi],
        "alpha_range": [a_lo, a_hi],
        "trials": args.trials,
        "k": args.k,
        "n_samples": int(pairs.shape[0]),
        "violations": eig_violations,
        "psd_failures": psd_failures,
        "pair_violations": pair_violations,
        "D_plus": test.d_plus,
        "threshold": test.threshold,
        "verdict": test.verdict,
        "probes": probes,
        "tail_slopes": tails,
        "expected_failure": not params.admissible,
    }
    write_json(args.out / "report.json", cfg, payload)
    print(f"violations={eig_violations} pair_violations={pair_violations} verdict={test.verdict}")
    if params.admissible and not ok:
        return EXIT_FAIL
    return EXIT_OK


# lpp -------------------------------------------------------------------------

def cmd_lpp(args) -> int:
    _require(args.N >= 2 and args.N % 2 == 0, f"--N must be a positive even integer, got {args.N}")
    _require(args.trials >= 1, "--trials must be positive")
    try:
        law = WeightLaw.parse(args.weights)
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from exc
    cfg = _config(args)
    report = verify_couplings(make_stream(args.seed, 0), args.N, args.trials, law)
    a, b = centering_for(law)

    kinds = list(SymmetryKind)

    def one_trial(t):
        stream = make_stream(args.seed, LPP_FLUCT_IDS + t)
        return [last_passage(WeightGrid.sample(stream, args.N, law), kind) for kind in kinds]

    G = np.array(parallel_map(one_trial, range(args.trials), args.threads))
    R = rescale_lpp(G, args.N, a, b)
    rows = [(t, kind.value, args.N, float(G[t, j]), float(R[t, j]))
            for t in range(args.trials) for j, kind in enumerate(kinds)]
    for j, kind in enumerate(kinds):
        rows.append(("mean", kind.value, args.N, float(G[:, j].mean()), float(R[:, j].mean())))
        rows.append(("sd", kind.value, args.N, float(G[:, j].std(ddof=1)) if args.trials > 1 else 0.0,
                     float(R[:, j].std(ddof=1)) if args.trials > 1 else 0.0))
    write_csv(args.out / "lpp.csv", cfg, ["trial", "symmetry", "N", "G", "rescaled"], rows)
    payload = report.as_dict()
    payload["centering"] = {"a": a, "b": b}
    write_json(args.out / "coupling_report.json", cfg, payload)
    print(f"coupling violations={report.total_violations}")
    return EXIT_OK if report.total_violations == 0 else EXIT_FAIL


# tails -----------------------------------------------------------------------

def cmd_tails(args) -> int:
    _require(args.beta > 0, "--beta must be positive")
    _require(args.n >= 1, "--n must be positive")
    grid = _grid(args)
    cfg = _config(args)
    theory = tail_theory(args.beta)
    warning = args.n < 10_000
    if args.synthetic:
        samples = {
            "upper": synthetic_tail_samples(theory["upper"], args.n, "upper", 1.5),
            "lower": synthetic_tail_samples(theory["lower"], args.n, "lower", 3.0),
        }
    else:
        ids = range(math.ceil(args.n / CHUNK))

        def chunk(c):
            stream = make_stream(args.seed, c)
            return [sample_tw(stream, args.beta, grid)[0] for _ in range(min(CHUNK, args.n - c * CHUNK))]

        x = np.concatenate([np.asarray(p) for p in parallel_map(chunk, ids, args.threads)])
        samples = {"upper": x, "lower": x}
    fits = {}
    for side in ("upper", "lower"):
        try:
            fit = tail_slope(samples[side], side)
        except InsufficientDataError as exc:
            warning = True
            fits[side] = {"theory": theory[side], "slope": None, "error": str(exc)}
            continue
        fits[side] = {
            "slope": fit.slope,
            "theory": theory[side],
            "relative_error": abs(fit.slope - theory[side]) / theory[side],
            "n_points": fit.n_points,
            "window": list(fit.window),
        }
    payload = {"beta": args.beta, "n_samples": args.n, "synthetic": args.synthetic, "tails": fits, "warning": warning}
    status = EXIT_OK
    if args.synthetic:
        passed = all(f["slope"] is not None and f["relative_error"] <= 0.05 for f in fits.values())
        payload["self_test_pass"] = passed
        status = EXIT_OK if passed else EXIT_FAIL
    write_json(args.out / "tails.json", cfg, payload)
    print(json.dumps(fits, sort_keys=True))
    return status


# sample ----------------------------------------------------------------------

def cmd_sample(args) -> int:
    _require(args.beta > 0, "--beta must be positive")
    _require(args.n >= 1 and args.k >= 1, "--n and --k must be positive")
    cfg = _config(args)
    rows = []
    if args.source == "sao":
        grid = _grid(args)
        _require(args.k <= grid.m, "--k exceeds the grid size")
        stream = make_stream(args.seed, 0)
        for i in range(args.n):
            for j, v in enumerate(sample_tw(stream, args.beta, grid, args.k)):
                rows.append((i, j, float(v)))
        write_csv(args.out / "samples.csv", cfg, ["sample", "index", "value"], rows)
    else:
        _require(1 <= args.k <= args.size, "--k must lie in [1, size]")
        stream = make_stream(args.seed, 0)
        for i in range(args.n):
            ev = sample_beta_ensemble(stream, args.size, args.beta, args.k).eigenvalues
            for j, v in enumerate(ev):
                rows.append((i, j + 1, float(v), float(edge_rescale(v, args.size))))
        write_csv(args.out / "samples.csv", cfg, ["sample", "index", "value", "edge_rescaled"], rows)
    return EXIT_OK


COMMANDS = {
    "figure1": cmd_figure1,
    "verify-ordering": cmd_verify_ordering,
    "lpp": cmd_lpp,
    "tails": cmd_tails,
    "sample": cmd_sample,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"twlab: cannot create output directory {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"twlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"twlab: I/O error on {getattr(exc, 'filename', None) or args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
