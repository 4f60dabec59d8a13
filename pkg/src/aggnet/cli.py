"""Command-line driver.

Every subcommand writes a CSV table (``--out`` or stdout) plus a JSON
manifest next to it; with ``--out`` a short JSON summary goes to stdout.
Exit codes: 0 success, 2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .closedform import (
    increment_series,
    maximal_efficiency,
    per_generation_rate,
    planner_counts,
    silo_rates,
    symmetric_efficiency,
)
from .equilibrium import (
    efficiency_estimate,
    equilibrium,
    equilibrium_profile,
    mentorship_weights,
)
from .montecarlo import SimConfig, empirical_signal_count, random_ensemble, simulate_paths
from .netcore import (
    GenerationsSpec,
    Network,
    NetworkError,
    build_network_from_spec,
    chain,
    complete_prefix,
    maximal_spec,
    validate_symmetry,
)
from .output import RunManifest, jsonable, to_csv, write_json
from .welfare import attainment, utility_curve, utility_series

EXIT_INPUT = 2
EXIT_NUMERIC = 3
FIGURES = ("fig1mid", "fig1right", "fig2")


class InputError(ValueError):
    pass


# ---------------------------------------------------------------- sources

def _parse_maximal(text: str) -> int:
    key, _, val = text.partition("=")
    if key.strip() != "K" or not val.strip().isdigit() or int(val) < 1:
        raise InputError(f"--maximal expects K=<positive int>, got {text!r}")
    return int(val)


def _load_source(args):
    """(network, generations spec or None, family tag)."""
    T = args.generations
    if args.maximal is not None:
        spec = maximal_spec(_parse_maximal(args.maximal), T or 100)
        return build_network_from_spec(spec), spec, "maximal"
    if args.chain is not None:
        return chain(args.chain), None, "chain"
    if args.complete is not None:
        return complete_prefix(args.complete), None, "complete"
    if args.spec is not None:
        try:
            data = json.loads(Path(args.spec).read_text())
        except OSError as exc:
            raise InputError(f"cannot read {args.spec}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.spec}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise InputError(f"{args.spec}: expected a JSON object")
        if "K" in data:
            if T is not None:
                data = {**data, "generations": T}
            spec = GenerationsSpec.from_dict(data)
            return build_network_from_spec(spec), spec, spec.kind
        if T is not None:
            raise InputError("--generations applies only to generations specs")
        return Network.from_dict(data), None, "network"
    raise InputError("choose a network: --maximal K=<k>, --spec <file>, --chain <n> or --complete <n>")


def _counts(net: Network, backend: str):
    if net.spec is not None and net.spec.kind == "mentorship":
        return mentorship_weights(net, backend)
    W, _, r = equilibrium(net, backend)
    return W, r


def _default_window(n: int, spec) -> int:
    if spec is not None:
        return min(n, 2 * spec.K)
    return max(1, n // 10)


def _prediction(spec, family: str, n: int):
    """Closed-form long-run efficiency for tagged families, else None."""
    if family == "chain" or family == "complete":
        return Fraction(1)
    if spec is None:
        return None
    if family == "maximal":
        return maximal_efficiency(spec.K)
    if family == "silo":
        # the executive (position 1) gathers every silo's rate, members their own
        total, rates = silo_rates(spec.partition)
        per_pos = [total] + [rate for part, rate in zip(spec.partition, rates) for _ in part]
        return sum(per_pos, Fraction(0)) / (spec.K * spec.K)
    if family == "mentorship":
        return Fraction(1)
    rep = validate_symmetry(spec)
    if rep.is_symmetric and rep.c is not None and (rep.c >= 1 or rep.d == 1):
        return symmetric_efficiency(rep.d, rep.c, spec.K)
    return None


# ---------------------------------------------------------------- commands

def cmd_efficiency(args):
    net, spec, family = _load_source(args)
    W, r = _counts(net, args.backend)
    window = args.window or _default_window(net.n, spec)
    est = efficiency_estimate(r, window)
    rows = [(i, r.r[i - 1], r.as_float()[i - 1] / i) for i in range(1, net.n + 1)]
    table = to_csv(["agent", "r", "r_over_i"], rows)
    pred = _prediction(spec, family, net.n)
    summary = {"family": family, "n": net.n, "window": window, "efficiency": est,
               "prediction": None if pred is None else float(pred)}
    if pred is not None:
        summary["gap"] = abs(est - float(pred))
    return table, summary


def cmd_weights(args):
    net, spec, family = _load_source(args)
    W, r = _counts(net, args.backend)
    rows = [(i, j, w) for i in range(1, net.n + 1) for j, w in W.support(i)]
    return to_csv(["agent", "signal", "weight"], rows), {"family": family, "n": net.n, "nonzero": len(rows)}


def _profile(net, spec, args):
    if args.profile == "planner":
        if spec is None:
            raise InputError("the planner profile needs a generations spec")
        profile, _, r = planner_counts(spec)
        return profile, r
    if net.has_signal_links:
        raise InputError("simulation supports networks without signal links")
    W, B, r = equilibrium(net)
    return equilibrium_profile(net, B), r


def cmd_simulate(args):
    net, spec, family = _load_source(args)
    profile, exact = _profile(net, spec, args)
    cfg = SimConfig(args.sigma2, args.reps, args.seed, args.state)
    m = simulate_paths(net, profile, cfg)
    est = empirical_signal_count(m)
    rows = zip(range(1, net.n + 1), m.mean, m.var, m.r_hat_mean, m.r_hat_var, m.se_r_mean)
    table = to_csv(["agent", "mean", "var", "r_hat_mean", "r_hat_var", "se"], rows)
    z_exact = (m.r_hat_mean - exact.as_float()) / m.se_r_mean
    summary = {"n": net.n, "replications": cfg.replications, "max_abs_z_exact": float(np.abs(z_exact).max()),
               "max_abs_z_consistency": float(np.abs(est.z).max())}
    return table, summary


def cmd_random(args):
    grid = _int_list(args.n_grid, "--n-grid")
    res = random_ensemble(grid, args.d, args.draws, args.seed)
    rows = [(n, k, res.r[k, g], res.ratio[k, g]) for g, n in enumerate(res.n_grid) for k in range(res.draws)]
    table = to_csv(["n", "draw", "r_n", "r_over_n"], rows)
    q = res.summary()
    qr = res.summary(res.ratio)
    summary = {
        "n_grid": list(res.n_grid),
        "median_r": res.median_r(),
        "quartiles_r": q[:, [0, 2]],
        "median_r_over_n": res.median_ratio(),
        "quartiles_r_over_n": qr[:, [0, 2]],
        "trend_ok": res.trend_ok(),
    }
    return table, summary


def cmd_planner(args):
    net, spec, family = _load_source(args)
    if spec is None:
        raise InputError("the planner needs a generations spec (--maximal or --spec)")
    profile, W, r = planner_counts(spec, backend=args.backend)
    inc = increment_series(r, spec.K, bound=np.inf)
    per_gen = r.by_generation(spec.K)
    rows = [(i, r.r[i - 1], r.as_float()[i - 1] / i) for i in range(1, net.n + 1)]
    last = float(np.mean([float(x) for x in per_gen[-1]]) - np.mean([float(x) for x in per_gen[-2]])) \
        if spec.generations > 1 else None
    summary = {"K": spec.K, "generations": spec.generations, "per_generation_at_horizon": last,
               "max_increment_at_horizon": float(inc.per_generation()[-1]) if len(inc.values) else None}
    return to_csv(["agent", "r", "r_over_i"], rows), summary


def cmd_welfare(args):
    if args.curve:
        r_vals = np.arange(1.0, args.r_max + 1e-9, args.r_step)
        c = utility_curve(args.sigma2, r_vals)
        table = to_csv(["r", "v"], zip(c.r, c.v))
        return table, {"sigma2": args.sigma2, "increasing": c.is_increasing(), "bounded": c.in_bounds()}
    net, spec, family = _load_source(args)
    W, r = _counts(net, "float")
    v = utility_series(r.as_float(), args.sigma2)
    table = to_csv(["agent", "v"], zip(range(1, net.n + 1), v))
    summary = {"sigma2": args.sigma2, "n": net.n}
    if args.v_bar is not None:
        a = attainment(r.as_float(), args.sigma2, args.v_bar)
        summary.update(v_bar=args.v_bar, strong=a.strong, weak=a.weak, horizon=a.horizon)
    return table, summary


def cmd_figure(args):
    if args.name not in FIGURES:
        raise InputError(f"unknown figure {args.name!r}; choose from {', '.join(FIGURES)}")
    if args.name == "fig1mid":
        # maximal networks are symmetric with d = c = K
        rows = [(K, float(per_generation_rate(K, K))) for K in range(1, args.k_max + 1)]
        return to_csv(["K", "per_generation"], rows), {"figure": args.name}
    if args.name == "fig1right":
        rows = [(K, float(maximal_efficiency(K))) for K in range(1, args.k_max + 1)]
        return to_csv(["K", "efficiency"], rows), {"figure": args.name}
    horizon = args.horizon
    rows = []
    for K in (2, 3, 4, 5):
        T = -(-horizon // K)
        _, _, r = equilibrium(build_network_from_spec(maximal_spec(K, T)))
        rows += [(K, i, r.r[i - 1]) for i in range(1, horizon + 1)]
    return to_csv(["K", "agent", "r"], rows), {"figure": args.name, "horizon": horizon}


def _int_list(text: str, flag: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"{flag} expects comma-separated integers, got {text!r}") from None
    if not vals or min(vals) < 1:
        raise InputError(f"{flag} needs positive integers")
    return vals


# ---------------------------------------------------------------- parser

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=("float", "rational"), default="float")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--out", type=Path, help="CSV path; manifest goes to <out>.manifest.json")
    common.add_argument("--window", type=_positive_int, help="agents in the efficiency tail")

    source = argparse.ArgumentParser(add_help=False)
    g = source.add_mutually_exclusive_group()
    g.add_argument("--maximal", metavar="K=k")
    g.add_argument("--spec", metavar="FILE", help="network or generations JSON")
    g.add_argument("--chain", type=_positive_int, metavar="N")
    g.add_argument("--complete", type=_positive_int, metavar="N")
    source.add_argument("--generations", type=_positive_int, metavar="T")

    p = argparse.ArgumentParser(prog="aggnet", description="Signal aggregation in observation networks.")
    p.add_argument("--version", action="version", version=f"aggnet {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("efficiency", parents=[common, source], help="per-agent signal counts and efficiency")
    sub.add_parser("weights", parents=[common, source], help="equilibrium weight matrix")

    s = sub.add_parser("simulate", parents=[common, source], help="Monte Carlo check of action laws")
    s.add_argument("--sigma2", type=_positive_float, default=1.0)
    s.add_argument("--reps", type=_positive_int, default=100_000)
    s.add_argument("--state", type=int, choices=(0, 1), default=1)
    s.add_argument("--profile", choices=("equilibrium", "planner"), default="equilibrium")

    s = sub.add_parser("random", parents=[common], help="fixed-degree random network ensemble")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--n-grid", default="100,300,1000")
    s.add_argument("--draws", type=_positive_int, default=100)

    sub.add_parser("planner", parents=[common, source], help="planner profile signal counts")

    s = sub.add_parser("welfare", parents=[common, source], help="expected utility curves and series")
    s.add_argument("--curve", action="store_true", help="tabulate v(r) instead of a network series")
    s.add_argument("--sigma2", type=_positive_float, default=1.0)
    s.add_argument("--r-max", type=float, default=20.0)
    s.add_argument("--r-step", type=_positive_float, default=0.5)
    s.add_argument("--v-bar", type=float)

    s = sub.add_parser("figure", parents=[common], help="figure data")
    s.add_argument("name")
    s.add_argument("--k-max", type=_positive_int, default=10)
    s.add_argument("--horizon", type=_positive_int, default=200)
    return p


COMMANDS = {
    "efficiency": cmd_efficiency,
    "weights": cmd_weights,
    "simulate": cmd_simulate,
    "random": cmd_random,
    "planner": cmd_planner,
    "welfare": cmd_welfare,
    "figure": cmd_figure,
}


def run(args, argv) -> dict:
    table, summary = COMMANDS[args.command](args)
    config = {k: v for k, v in vars(args).items() if k not in ("out",)}
    manifest = RunManifest(args.command, list(argv), config, args.seed, __version__)
    manifest.record("csv", table)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(table, newline="\n")
        write_json(str(args.out) + ".manifest.json", {**manifest.to_dict(), "summary": summary})
        print(json.dumps(jsonable(summary)))
    else:
        sys.stdout.write(table)
        sys.stderr.write(json.dumps(jsonable({**manifest.to_dict(), "summary": summary})) + "\n")
    return summary


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    try:
        run(args, argv)
    except (InputError, NetworkError, ValueError, OSError, KeyError) as exc:
        print(f"aggnet: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"aggnet: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
