"""Monte-Carlo rate estimation: run trials across n, fit slopes, name the regime.

An experiment draws ``trials_per_n`` independent seeded trials at each sample
size in a grid, reports the per-n mean score (in adversarial mode the maximum
of the means over the instance's mu1 variants), fits an OLS slope to
(log n, log mean) over the sizes with positive mean, bootstraps a confidence
interval for the slope, and classifies the decay as "sqrt", "linear",
"trivial" (every single trial scored exactly zero), or "indeterminate".

Reports are bit-reproducible: all randomness derives from the master seed,
and aggregation folds trial scores in trial-index order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import binom

from .adversary import NoMaxFamily, PackingFamily, build_nomax_family, build_packing_family
from .errors import InfeasibleLevelError
from .fixtures import get_fixture, transported_mu0
from .learners import (
    _LEARNERS,
    LEARNER_KINDS,
    LearnerConfig,
    run_learner_trial,
)
from .space import RNG_ALGORITHM, Distribution, FiniteSpace, HypothesisClass, derive_seed
from .structure import vc_dimension

SQRT_WINDOW = (-0.7, -0.3)
LINEAR_WINDOW = (-1.3, -0.8)
BOOTSTRAP_RESAMPLES = 1000


@dataclass(frozen=True)
class Instance:
    """A concrete problem: class, true distributions, level, and metadata."""

    space: FiniteSpace
    hclass: HypothesisClass
    mu0: Distribution
    mu1_variants: tuple[Distribution, ...]
    alpha: float
    d_h: int
    open_chain: bool = False
    label: str = ""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce a rate experiment bit for bit.

    ``source`` names the instance: {"fixture": name}, {"packing": {...}}, or
    {"nomax": {...}}.  ``delta_rule`` and ``delta0_rule`` are either the
    string "1/n" or a fixed float; the per-n learner configs are derived from
    them.  Slope windows are overridable acceptance parameters.
    """

    source: dict
    learner: str
    alpha: float
    n_grid: tuple[int, ...]
    trials_per_n: int
    master_seed: int
    adversarial: bool = False
    mu0_known: bool = True
    epsilon0: float = 0.0
    delta_rule: str | float = "1/n"
    delta0_rule: str | float = "1/n"
    sqrt_window: tuple[float, float] = SQRT_WINDOW
    linear_window: tuple[float, float] = LINEAR_WINDOW

    def __post_init__(self):
        if self.learner not in LEARNER_KINDS:
            raise ValueError(f"unknown learner kind {self.learner!r}")
        if len(self.n_grid) < 2:
            raise ValueError("n_grid needs at least 2 points")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if self.trials_per_n < 100:
            raise ValueError("trials_per_n must be at least 100 for slope fitting")
        if not self.mu0_known and min(self.n_grid) < 2:
            raise ValueError("unknown mu0 with delta0 = 1/n needs n >= 2")

    def to_json_dict(self) -> dict:
        return {
            "source": self.source,
            "learner": self.learner,
            "alpha": self.alpha,
            "n_grid": list(self.n_grid),
            "trials_per_n": self.trials_per_n,
            "master_seed": self.master_seed,
            "adversarial": self.adversarial,
            "mu0_known": self.mu0_known,
            "epsilon0": self.epsilon0,
            "delta_rule": self.delta_rule,
            "delta0_rule": self.delta0_rule,
            "sqrt_window": list(self.sqrt_window),
            "linear_window": list(self.linear_window),
        }

    @staticmethod
    def from_json_dict(d: dict) -> "ExperimentConfig":
        return ExperimentConfig(
            source=d["source"],
            learner=d["learner"],
            alpha=d["alpha"],
            n_grid=tuple(d["n_grid"]),
            trials_per_n=d["trials_per_n"],
            master_seed=d["master_seed"],
            adversarial=d.get("adversarial", False),
            mu0_known=d.get("mu0_known", True),
            epsilon0=d.get("epsilon0", 0.0),
            delta_rule=d.get("delta_rule", "1/n"),
            delta0_rule=d.get("delta0_rule", "1/n"),
            sqrt_window=tuple(d.get("sqrt_window", SQRT_WINDOW)),
            linear_window=tuple(d.get("linear_window", LINEAR_WINDOW)),
        )


@dataclass(frozen=True)
class PerN:
    n: int
    mean_score: float
    stderr: float
    feasibility_freq: float
    variant: int


@dataclass(frozen=True)
class RateReport:
    per_n: tuple[PerN, ...]
    slope: float | None
    slope_ci: tuple[float, float] | None
    regime: str
    metadata: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "per_n": [
                {
                    "n": p.n,
                    "mean_score": p.mean_score,
                    "stderr": p.stderr,
                    "feasibility_freq": p.feasibility_freq,
                    "variant": p.variant,
                }
                for p in self.per_n
            ],
            "slope": self.slope,
            "slope_ci": None if self.slope_ci is None else list(self.slope_ci),
            "regime": self.regime,
            "metadata": self.metadata,
        }


def _rule_value(rule: str | float, n: int) -> float:
    if rule == "1/n":
        return 1.0 / n
    return float(rule)


def _learner_config(cfg: ExperimentConfig, n: int, open_chain: bool) -> LearnerConfig:
    delta = _rule_value(cfg.delta_rule, n)
    if cfg.mu0_known:
        return LearnerConfig(
            alpha=cfg.alpha, delta=delta, mu0_known=True, open_chain=open_chain
        )
    return LearnerConfig(
        alpha=cfg.alpha,
        epsilon0=cfg.epsilon0,
        delta0=_rule_value(cfg.delta0_rule, n),
        delta=delta,
        mu0_known=False,
        open_chain=open_chain,
    )


def resolve_source(cfg: ExperimentConfig) -> Callable[[int], Instance]:
    """Turn a config's instance source into a per-n instance builder."""
    src = cfg.source
    if "fixture" in src:
        fx = get_fixture(src["fixture"])
        if fx.mu0 is None or fx.mu1 is None:
            raise ValueError(f"fixture {fx.name!r} has no distributions to run on")
        inst = Instance(
            space=fx.space,
            hclass=fx.hclass,
            mu0=fx.mu0,
            mu1_variants=(fx.mu1,),
            alpha=cfg.alpha,
            d_h=vc_dimension(fx.hclass),
            open_chain=fx.open_chain,
            label=fx.name,
        )
        return lambda n: inst
    if "packing" in src:
        spec = src["packing"]
        d_h = int(spec["d_h"])
        c1 = float(spec.get("c1", 0.5))
        seed = int(spec.get("seed", 0))

        def build_packing(n: int) -> Instance:
            fam = build_packing_family(d_h, cfg.alpha, n, c1, seed)
            return Instance(
                space=fam.space,
                hclass=fam.hclass,
                mu0=fam.mu0,
                mu1_variants=fam.mu1_variants,
                alpha=cfg.alpha,
                d_h=fam.d_h,
                open_chain=False,
                label=f"packing[{fam.layout}]",
            )

        return build_packing
    if "nomax" in src:
        spec = src["nomax"]
        fx = get_fixture(spec["fixture"])
        if fx.mu0 is None:
            raise ValueError(f"fixture {fx.name!r} has no mu0")
        mu0 = fx.mu0
        if spec.get("transport", False):
            mu0 = transported_mu0(fx, epsilon0=float(spec.get("epsilon0", fx.epsilon0)))
        d_h = vc_dimension(fx.hclass)

        def build_nomax(n: int) -> Instance:
            lcfg = _learner_config(cfg, n, open_chain=True)
            if cfg.mu0_known:
                learner = _LEARNERS[cfg.learner]

                def probe(sample):
                    return learner(fx.hclass, mu0, sample, lcfg, d_h=d_h).chosen

                fam = build_nomax_family(fx.hclass, mu0, cfg.alpha, n, probe)
            else:
                # randomized learners get the fixed-escape approximation
                fam = build_nomax_family(fx.hclass, mu0, cfg.alpha, n, None)
            return Instance(
                space=fx.space,
                hclass=fx.hclass,
                mu0=mu0,
                mu1_variants=(fam.variant(n),),
                alpha=cfg.alpha,
                d_h=d_h,
                open_chain=True,
                label=f"nomax[{fx.name}]",
            )

        return build_nomax
    raise ValueError(f"unrecognized instance source {src!r}")


def _ols_slope(xs: np.ndarray, ys: np.ndarray) -> float:
    xbar = xs.mean()
    ybar = ys.mean()
    dx = xs - xbar
    return float(dx @ (ys - ybar) / (dx @ dx))


def run_experiment(cfg: ExperimentConfig) -> RateReport:
    """Run the full grid of seeded trials and classify the rate regime."""
    builder = resolve_source(cfg)
    per_n: list[PerN] = []
    kept_scores: list[np.ndarray] = []
    every_score_zero = True
    for n in cfg.n_grid:
        inst = builder(n)
        lcfg = _learner_config(cfg, n, inst.open_chain)
        variants = inst.mu1_variants if cfg.adversarial else inst.mu1_variants[:1]
        best: tuple[float, int, np.ndarray, np.ndarray] | None = None
        for v, mu1 in enumerate(variants):
            scores = np.empty(cfg.trials_per_n)
            feas = np.empty(cfg.trials_per_n, dtype=bool)
            for t in range(cfg.trials_per_n):
                seed = derive_seed(cfg.master_seed, n, v, t)
                tr = run_learner_trial(
                    cfg.learner, inst.hclass, inst.mu0, mu1, lcfg, n, seed, d_h=inst.d_h
                )
                scores[t] = tr.score
                feas[t] = tr.feasible
            if (scores != 0.0).any():
                every_score_zero = False
            mean = float(scores.mean())
            if best is None or mean > best[0]:
                best = (mean, v, scores, feas)
        assert best is not None
        mean, v, scores, feas = best
        std = float(scores.std(ddof=1)) if len(scores) > 1 else 0.0
        per_n.append(
            PerN(
                n=n,
                mean_score=mean,
                stderr=std / math.sqrt(len(scores)),
                feasibility_freq=float(feas.mean()),
                variant=v,
            )
        )
        kept_scores.append(scores)

    slope, slope_ci = _fit_slope(cfg, per_n, kept_scores)
    if every_score_zero:
        regime = "trivial"
    elif slope_ci is None:
        regime = "indeterminate"
    elif cfg.sqrt_window[0] <= slope_ci[0] and slope_ci[1] <= cfg.sqrt_window[1]:
        regime = "sqrt"
    elif cfg.linear_window[0] <= slope_ci[0] and slope_ci[1] <= cfg.linear_window[1]:
        regime = "linear"
    else:
        regime = "indeterminate"
    metadata = {
        "rng": RNG_ALGORITHM,
        "config": cfg.to_json_dict(),
        "bootstrap_resamples": BOOTSTRAP_RESAMPLES,
    }
    return RateReport(
        per_n=tuple(per_n), slope=slope, slope_ci=slope_ci, regime=regime,
        metadata=metadata,
    )


def _fit_slope(
    cfg: ExperimentConfig, per_n: list[PerN], kept_scores: list[np.ndarray]
) -> tuple[float | None, tuple[float, float] | None]:
    """OLS slope over positive-mean sizes plus a seeded bootstrap CI."""
    pos = [i for i, p in enumerate(per_n) if p.mean_score > 0.0]
    if len(pos) < 2:
        return None, None
    xs = np.log(np.array([per_n[i].n for i in pos], dtype=float))
    ys = np.log(np.array([per_n[i].mean_score for i in pos]))
    slope = _ols_slope(xs, ys)

    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence((int(cfg.master_seed), 0xB00C)))
    )
    boot_means = np.empty((BOOTSTRAP_RESAMPLES, len(pos)))
    for col, i in enumerate(pos):
        scores = kept_scores[i]
        idx = rng.integers(0, len(scores), size=(BOOTSTRAP_RESAMPLES, len(scores)))
        boot_means[:, col] = scores[idx].mean(axis=1)
    slopes = []
    for b in range(BOOTSTRAP_RESAMPLES):
        row = boot_means[b]
        keep = row > 0.0
        if keep.sum() < 2:
            continue
        slopes.append(_ols_slope(xs[keep], np.log(row[keep])))
    if len(slopes) < BOOTSTRAP_RESAMPLES // 2:
        return slope, None
    lo, hi = np.percentile(np.array(slopes), [2.5, 97.5])
    return slope, (float(lo), float(hi))


def minimax_floor(
    family: PackingFamily, n: int, replicates: int = 100_000, seed: int = 0
) -> float:
    """Expected score of the Bayes-optimal learner under the uniform prior
    over the family's variants, at sample size ``n``.

    Exact binomial computation for the three-atom layout; seeded Monte-Carlo
    (default 1e5 replicates) for the paired-atoms layout.  This is a floor no
    learner can beat on the family, up to Monte-Carlo error.
    """
    if family.layout == "triple":
        return _floor_triple(family, n)
    return _floor_pairs(family, n, replicates, seed)


def _floor_triple(family: PackingFamily, n: int) -> float:
    delta = family.delta_gap
    if delta == 0.0:
        return 0.0
    p = 0.5 + delta / 2.0
    below = (n - 1) // 2
    wrong = float(binom.cdf(below, n, p))
    if n % 2 == 0:
        wrong += 0.5 * float(binom.pmf(n // 2, n, p))
    return delta * wrong


def _floor_pairs(family: PackingFamily, n: int, replicates: int, seed: int) -> float:
    if replicates < 1:
        raise ValueError("replicates must be positive")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    probs = np.array([v.mass for v in family.mu1_variants])  # (M, m)
    M, m = probs.shape
    d = family.d
    half = d // 2
    sigma = np.array(family.sigma_codes)  # (M, half)
    with np.errstate(divide="ignore"):
        logp = np.where(probs > 0.0, np.log(probs), 0.0)
    true_idx = rng.integers(0, M, size=replicates)
    counts = np.empty((replicates, m), dtype=np.int64)
    for v in range(M):
        rows = true_idx == v
        if rows.any():
            counts[rows] = rng.multinomial(n, probs[v], size=int(rows.sum()))
    loglik = counts @ logp.T  # (R, M); zero-prob atoms never drawn under any variant
    loglik -= loglik.max(axis=1, keepdims=True)
    w = np.exp(loglik)
    w /= w.sum(axis=1, keepdims=True)
    mean_measure = w @ probs  # (R, m)
    # per pair, pick the atom with the larger posterior-mean mass (ties to x_i)
    picked = np.where(mean_measure[:, 1 : 1 + half] >= mean_measure[:, 1 + half :], 1, -1)
    wrong = picked != sigma[true_idx]
    per_wrong_gap = family.delta_gap / d
    return float((wrong.sum(axis=1) * per_wrong_gap).mean())
