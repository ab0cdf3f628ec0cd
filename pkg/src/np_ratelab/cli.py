"""Command-line entry point: analyze / learn / construct / simulate.

Exit codes: 0 success (and regime match when --expect is given), 1 regime
mismatch, 2 bad flags, 3 unreadable or invalid input files, 4 infeasible
instance, 5 construction or verification failure.  All randomness flows from
--seed; timestamps are confined to the metadata block of written reports.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .adversary import (
    build_nomax_family,
    build_packing_family,
    transport_measure,
)
from .errors import ConstructionError, InfeasibleLevelError, PackingError
from .fixtures import FIXTURE_NAMES, get_fixture
from .learners import LearnerConfig, erm_learner, maximal_first_learner, required_n0
from .ratelab import ExperimentConfig, run_experiment
from .serialize import (
    FORMAT,
    distribution_to_json,
    dumps_canonical,
    instance_from_json_dict,
    instance_to_json_dict,
    mass_file_to_distribution,
    write_rate_csv,
)
from .space import RNG_ALGORITHM, Distribution, constrained_subclass, derive_seed, draw_sample
from .structure import analyze_class, is_totally_ordered, vc_dimension
from .learners import epsilon_n  # noqa: F401  (re-exported for scripting convenience)

PROBE_ALPHAS = (0.1, 0.2, 0.25, 0.3, 0.4)


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(args, payload: dict) -> None:
    text = dumps_canonical(payload)
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _resolve_class(args):
    """Fixture name or class file -> (space, hclass, dists)."""
    if getattr(args, "fixture", None):
        fx = get_fixture(args.fixture)
        dists = {}
        if fx.mu0 is not None:
            dists["mu0"] = fx.mu0
        if fx.mu1 is not None:
            dists["mu1"] = fx.mu1
        return fx.space, fx.hclass, dists
    if not getattr(args, "class_file", None):
        raise ValueError("need --fixture or --class")
    return instance_from_json_dict(_load_json(args.class_file))


def _cmd_analyze(args) -> int:
    space, hclass, dists = _resolve_class(args)
    report = analyze_class(hclass)
    totally_ordered_at = []
    mu0 = dists.get("mu0")
    if mu0 is not None:
        for a in PROBE_ALPHAS:
            view = constrained_subclass(hclass, mu0, a)
            if len(view) >= 1 and is_totally_ordered(view).is_chain:
                totally_ordered_at.append(a)
    payload = {
        "format": FORMAT,
        **report.to_json_dict(),
        "totally_ordered_at": totally_ordered_at,
    }
    if args.json or args.out:
        _emit(args, payload)
    else:
        w = report.witness
        print(f"vc_dimension: {report.vc_dimension}")
        print(f"separates_three_points: {report.separates_three_points}")
        if w is not None:
            print(f"witness: h1={w.h1} h2={w.h2} x0={w.x0} x1={w.x1} x2={w.x2}")
        if mu0 is not None:
            print(f"totally_ordered_at: {totally_ordered_at}")
    return 0


def _cmd_learn(args) -> int:
    space, hclass, dists = _resolve_class(args)
    if args.mu0:
        dists["mu0"] = mass_file_to_distribution(_load_json(args.mu0))
    if args.mu1:
        dists["mu1"] = mass_file_to_distribution(_load_json(args.mu1))
    if "mu0" not in dists or "mu1" not in dists:
        raise ValueError("learn needs both mu0 and mu1 (embedded or via flags)")
    mu0, mu1 = dists["mu0"], dists["mu1"]
    known = not args.mu0_sample
    cfg = LearnerConfig(
        alpha=args.alpha,
        epsilon0=0.0 if known else args.epsilon0,
        delta0=0.0 if known else args.delta0,
        delta=args.delta,
        mu0_known=known,
        open_chain=args.open_chain,
    )
    d_h = vc_dimension(hclass)
    if known:
        mu0_input = mu0
    else:
        n0 = required_n0(d_h, cfg.epsilon0 / 2, cfg.delta0)
        mu0_input = draw_sample(mu0, n0, derive_seed(args.seed, 0))
    s1 = draw_sample(mu1, args.n, derive_seed(args.seed, 1))
    learner = erm_learner if args.algorithm == "erm" else maximal_first_learner
    out = learner(hclass, mu0_input, s1, cfg, d_h=d_h)
    payload = {
        "format": FORMAT,
        "chosen": out.chosen,
        "chosen_bits": list(hclass[out.chosen].bits()),
        "constraint_set_size": out.constraint_set_size,
        "used_maximal_element": out.used_maximal_element,
        "epsilon_n": out.epsilon_n,
        "metadata": {"rng": RNG_ALGORITHM, "seed": args.seed, "algorithm": args.algorithm},
    }
    _emit(args, payload)
    return 0


def _cmd_construct(args) -> int:
    if args.kind == "packing":
        fam = build_packing_family(args.d_h, args.alpha, args.n, args.c1, args.seed)
        gaps_ok = all(v.m == fam.space.m for v in fam.mu1_variants)
        payload = instance_to_json_dict(
            fam.space,
            fam.hclass,
            {"mu0": fam.mu0},
        )
        payload["distributions"]["mu1_variants"] = [
            distribution_to_json(v) for v in fam.mu1_variants
        ]
        payload["provenance"] = {
            "kind": "packing",
            "parameters": {
                "d_h": args.d_h,
                "alpha": args.alpha,
                "n": args.n,
                "c1": args.c1,
                "layout": fam.layout,
                "delta_gap": fam.delta_gap,
                "sigma_codes": [list(s) for s in fam.sigma_codes],
            },
            "seed": args.seed,
            "rng": RNG_ALGORITHM,
            "verification": {"variants_valid": gaps_ok},
        }
        _emit(args, payload)
        return 0
    space, hclass, dists = _resolve_class(args)
    if "mu0" not in dists:
        raise ValueError("construction needs a mu0")
    mu0 = dists["mu0"]
    if args.kind == "transport":
        mu0p = transport_measure(hclass, mu0, args.alpha, args.epsilon0)
        lo = constrained_subclass(hclass, mu0p, args.alpha).indices
        hi = constrained_subclass(hclass, mu0p, args.alpha + args.epsilon0).indices
        payload = instance_to_json_dict(space, hclass, {"mu0": mu0, "mu0_prime": mu0p})
        payload["provenance"] = {
            "kind": "transport",
            "parameters": {"alpha": args.alpha, "epsilon0": args.epsilon0},
            "seed": args.seed,
            "rng": RNG_ALGORITHM,
            "verification": {
                "levels_identical": list(lo) == list(hi),
                "feasible_indices": list(lo),
            },
        }
        _emit(args, payload)
        return 0
    if args.kind == "nomax":
        if args.transport:
            mu0 = transport_measure(hclass, mu0, args.alpha, args.epsilon0)
        fam = build_nomax_family(hclass, mu0, args.alpha, args.n, None)
        variant = fam.variant(args.n)
        payload = instance_to_json_dict(space, hclass, {"mu0": mu0, "mu1": variant})
        payload["provenance"] = {
            "kind": "nomax",
            "parameters": {
                "alpha": args.alpha,
                "n": args.n,
                "transport": bool(args.transport),
                "h0": fam.h0,
                "x0": fam.x0,
                "h1": fam.h1,
                "x1": fam.x1,
            },
            "seed": args.seed,
            "rng": RNG_ALGORITHM,
            "verification": {"escape_mass": 1.0 / args.n},
        }
        _emit(args, payload)
        return 0
    raise ValueError(f"unknown construction kind {args.kind!r}")


def _cmd_simulate(args) -> int:
    cfg_dict = _load_json(args.experiment)
    if args.seed is not None:
        cfg_dict["master_seed"] = args.seed
    cfg = ExperimentConfig.from_json_dict(cfg_dict)
    report = run_experiment(cfg)
    payload = report.to_json_dict()
    payload["format"] = FORMAT
    payload["metadata"]["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    payload["metadata"]["threads"] = args.threads
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(dumps_canonical(payload), encoding="utf-8")
    with open(out_dir / "report.csv", "w", encoding="utf-8") as fh:
        write_rate_csv(fh, report.per_n)
    print(f"regime: {report.regime}  slope: {report.slope}  ci: {report.slope_ci}")
    if args.expect is not None and report.regime != args.expect:
        print(f"expected regime {args.expect!r}, got {report.regime!r}", file=sys.stderr)
        return 1
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="np-ratelab",
        description="Laboratory for constrained classification over finite "
        "hypothesis classes: structure analysis, learners, adversarial "
        "constructions, and Monte-Carlo rate estimation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--out", type=str, default=None, help="write output to a file")
        p.add_argument("--threads", type=int, default=None,
                       help="worker hint; results are order-independent")

    def add_class_source(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--fixture", choices=FIXTURE_NAMES)
        g.add_argument("--class", dest="class_file", metavar="FILE")

    p = sub.add_parser("analyze", help="structure report for a class")
    add_class_source(p)
    add_common(p)

    p = sub.add_parser("learn", help="run one learner on given distributions")
    add_class_source(p)
    p.add_argument("--mu0", metavar="FILE")
    p.add_argument("--mu0-sample", action="store_true",
                   help="treat mu0 as unknown and sample it")
    p.add_argument("--mu1", metavar="FILE")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--epsilon0", type=float, default=0.1)
    p.add_argument("--delta0", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--algorithm", choices=("erm", "maximal-first"), default="erm")
    p.add_argument("--open-chain", action="store_true",
                   help="treat the class as an open-above truncation")
    add_common(p)

    p = sub.add_parser("construct", help="emit an adversarial instance")
    p.add_argument("--kind", choices=("packing", "nomax", "transport"), required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--fixture", choices=FIXTURE_NAMES)
    g.add_argument("--class", dest="class_file", metavar="FILE")
    p.add_argument("--d-h", dest="d_h", type=int, default=2)
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--epsilon0", type=float, default=0.1)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--c1", type=float, default=0.5)
    p.add_argument("--transport", action="store_true",
                   help="rewrite mu0 before the escape construction")
    add_common(p)

    p = sub.add_parser("simulate", help="run a rate experiment from a config file")
    p.add_argument("--experiment", required=True, metavar="FILE")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--expect", choices=("sqrt", "linear", "trivial", "indeterminate"))
    p.add_argument("--seed", type=int, default=None,
                   help="override the config's master seed")
    p.add_argument("--json", action="store_true")
    p.add_argument("--threads", type=int, default=None)
    return parser


_COMMANDS = {
    "analyze": _cmd_analyze,
    "learn": _cmd_learn,
    "construct": _cmd_construct,
    "simulate": _cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InfeasibleLevelError as e:
        print(f"infeasible instance: {e}", file=sys.stderr)
        return 4
    except (ConstructionError, PackingError) as e:
        print(f"verification failure: {e}", file=sys.stderr)
        return 5
    except (OSError, json.JSONDecodeError, KeyError, ValueError, TypeError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
