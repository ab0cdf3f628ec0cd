"""Learning procedures: constrained ERM, maximal-element-first, trial runner.

Two learners are provided.  The ERM learner minimizes empirical mu1-risk over
the feasible subclass (level alpha when mu0 is known, level alpha + eps0/2 on
the empirical mu0 otherwise).  The maximal-first learner returns the maximal
element of the feasible subclass when one exists and falls back to ERM.

Finite truncations of infinite nested families need one extra knob: a finite
chain always attains its union, so a class that models an infinite chain with
no attained supremum sets ``open_chain=True`` in the config, which disables
the maximal-element shortcut (on the ideal object that branch never fires).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import InfeasibleLevelError
from .space import (
    Distribution,
    HypothesisClass,
    Sample,
    SubclassView,
    _empirical,
    constrained_subclass,
    derive_seed,
    draw_sample,
    excess_risk,
    risk_mu0,
    risk_mu1,
)
from .structure import maximal_element, vc_dimension

LEARNER_KINDS = ("erm", "maximal-first", "constant")


@dataclass(frozen=True)
class LearnerConfig:
    """Level, slack, and confidence parameters for a learning run.

    With ``mu0_known`` the slack parameters must be zero.  With mu0 unknown
    the learner works at level alpha + epsilon0/2 on the empirical measure
    and needs alpha + epsilon0 < 1/2.  ``delta`` is the confidence split used
    in the concentration scale ``epsilon_n``.
    """

    alpha: float
    epsilon0: float = 0.0
    delta0: float = 0.0
    delta: float = 0.05
    mu0_known: bool = True
    open_chain: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if self.epsilon0 < 0.0:
            raise ValueError("epsilon0 must be nonnegative")
        if not 0.0 <= self.delta0 < 1.0:
            raise ValueError("delta0 must lie in [0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.mu0_known:
            if self.epsilon0 != 0.0 or self.delta0 != 0.0:
                raise ValueError("epsilon0 and delta0 must be 0 when mu0 is known")
        else:
            if self.epsilon0 <= 0.0:
                raise ValueError("unknown mu0 requires a positive epsilon0")
            if self.alpha + self.epsilon0 >= 0.5:
                raise ValueError("unknown mu0 requires alpha + epsilon0 < 1/2")


@dataclass(frozen=True)
class LearnerOutput:
    chosen: int  # index into the full class; always a member of the constraint set
    constraint_set_size: int
    used_maximal_element: bool
    epsilon_n: float


@dataclass(frozen=True)
class TrialResult:
    output: LearnerOutput
    excess: float
    feasible: bool  # h_hat in the level alpha + epsilon0 subclass of the true mu0

    @property
    def score(self) -> float:
        return self.excess if self.feasible else 0.0


def epsilon_n(d_h: int, n: int, delta: float) -> float:
    """Concentration scale (d_h * log(2n) + log(8/delta)) / n, natural log."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if d_h < 0:
        raise ValueError("d_h must be nonnegative")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    return (d_h * math.log(2 * n) + math.log(8.0 / delta)) / n


@lru_cache(maxsize=None)
def required_n0(d_h: int, epsilon0: float, delta0: float) -> int:
    """Smallest n with sqrt(epsilon_n) + epsilon_n <= epsilon0 at confidence delta0.

    This is the sufficient sample size for uniform mu0-risk estimation within
    epsilon0, from the relative VC bound with set masses bounded by 1.  Found
    by doubling then bisection; the criterion is decreasing in n.
    """
    if epsilon0 <= 0.0:
        raise ValueError("epsilon0 must be positive")
    if not 0.0 < delta0 < 1.0:
        raise ValueError("delta0 must lie in (0, 1)")

    def ok(n: int) -> bool:
        e = epsilon_n(d_h, n, delta0)
        return math.sqrt(e) + e <= epsilon0

    if ok(1):
        return 1
    hi = 2
    while not ok(hi):
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _resolve_d_h(hclass: HypothesisClass, d_h: int | None) -> int:
    return vc_dimension(hclass) if d_h is None else d_h


def _constraint_view(
    hclass: HypothesisClass, mu0: Distribution | Sample, cfg: LearnerConfig
) -> SubclassView:
    if cfg.mu0_known:
        if not isinstance(mu0, Distribution):
            raise TypeError("mu0_known requires a Distribution")
        view = constrained_subclass(hclass, mu0, cfg.alpha)
    else:
        if not isinstance(mu0, Sample):
            raise TypeError("unknown mu0 requires a Sample")
        mu0_hat = _empirical(mu0, hclass.m)
        view = constrained_subclass(hclass, mu0_hat, cfg.alpha + cfg.epsilon0 / 2)
    if len(view) == 0:
        raise InfeasibleLevelError("infeasible level: constraint set is empty")
    return view


def _erm_pick(view: SubclassView, s1: Sample) -> int:
    mu1_hat = _empirical(s1, view.parent.m)
    best_idx = -1
    best_risk = math.inf
    for i in view.indices:
        r = risk_mu1(view.parent[i], mu1_hat)
        if r < best_risk:
            best_risk = r
            best_idx = i
    return best_idx


def erm_learner(
    hclass: HypothesisClass,
    mu0: Distribution | Sample,
    s1: Sample,
    cfg: LearnerConfig,
    d_h: int | None = None,
) -> LearnerOutput:
    """Empirical mu1-risk minimizer over the feasible subclass.

    Ties break to the smallest hypothesis index.  Raises
    ``InfeasibleLevelError`` when the constraint set is empty.
    """
    view = _constraint_view(hclass, mu0, cfg)
    chosen = _erm_pick(view, s1)
    return LearnerOutput(
        chosen=chosen,
        constraint_set_size=len(view),
        used_maximal_element=False,
        epsilon_n=epsilon_n(_resolve_d_h(hclass, d_h), s1.n, cfg.delta),
    )


def maximal_first_learner(
    hclass: HypothesisClass,
    mu0: Distribution | Sample,
    s1: Sample,
    cfg: LearnerConfig,
    d_h: int | None = None,
) -> LearnerOutput:
    """Return the maximal element of the feasible subclass if it has one,
    otherwise fall back to ERM.

    With ``cfg.open_chain`` the shortcut is disabled: the class is declared
    to truncate an infinite nested family whose supremum is not attained, so
    no member counts as maximal.
    """
    view = _constraint_view(hclass, mu0, cfg)
    eps = epsilon_n(_resolve_d_h(hclass, d_h), s1.n, cfg.delta)
    if not cfg.open_chain:
        top = maximal_element(view)
        if top is not None:
            return LearnerOutput(
                chosen=top,
                constraint_set_size=len(view),
                used_maximal_element=True,
                epsilon_n=eps,
            )
    chosen = _erm_pick(view, s1)
    return LearnerOutput(
        chosen=chosen,
        constraint_set_size=len(view),
        used_maximal_element=False,
        epsilon_n=eps,
    )


def constant_learner(
    hclass: HypothesisClass,
    mu0: Distribution | Sample,
    s1: Sample,
    cfg: LearnerConfig,
    d_h: int | None = None,
) -> LearnerOutput:
    """Ignore the data and return the first feasible hypothesis.

    A deliberately weak baseline used to sanity-check minimax floors.
    """
    view = _constraint_view(hclass, mu0, cfg)
    return LearnerOutput(
        chosen=view.indices[0],
        constraint_set_size=len(view),
        used_maximal_element=False,
        epsilon_n=epsilon_n(_resolve_d_h(hclass, d_h), s1.n, cfg.delta),
    )


_LEARNERS = {
    "erm": erm_learner,
    "maximal-first": maximal_first_learner,
    "constant": constant_learner,
}


def run_learner_trial(
    kind: str,
    hclass: HypothesisClass,
    mu0: Distribution,
    mu1: Distribution,
    cfg: LearnerConfig,
    n: int,
    seed: int,
    d_h: int | None = None,
) -> TrialResult:
    """One seeded trial: draw samples, learn, and score the result.

    With mu0 unknown a mu0-sample of size ``required_n0(d_h, eps0/2, delta0)``
    is drawn first.  The reported quantities are the excess risk at level
    alpha and the indicator that the output lies in the level alpha + eps0
    subclass of the true mu0; the trial's score is their product.
    """
    if kind not in _LEARNERS:
        raise ValueError(f"unknown learner kind {kind!r}")
    d_h_val = _resolve_d_h(hclass, d_h)
    if cfg.mu0_known:
        mu0_input: Distribution | Sample = mu0
    else:
        n0 = required_n0(d_h_val, cfg.epsilon0 / 2, cfg.delta0)
        mu0_input = draw_sample(mu0, n0, derive_seed(seed, 0))
    s1 = draw_sample(mu1, n, derive_seed(seed, 1))
    out = _LEARNERS[kind](hclass, mu0_input, s1, cfg, d_h=d_h_val)
    h_hat = hclass[out.chosen]
    excess = excess_risk(h_hat, hclass, mu0, mu1, cfg.alpha)
    feasible = risk_mu0(h_hat, mu0) <= cfg.alpha + cfg.epsilon0
    return TrialResult(output=out, excess=excess, feasible=feasible)
