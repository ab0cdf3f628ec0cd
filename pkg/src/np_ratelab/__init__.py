"""Desk-scale laboratory for Neyman-Pearson classification over finite
hypothesis classes: structural analyzers, constrained learners, adversarial
instance constructions, and a Monte-Carlo harness for rate estimation."""

from .errors import (
    BudgetExceededError,
    ConstructionError,
    InapplicableConstructionError,
    InfeasibleLevelError,
    PackingError,
    SpaceMismatchError,
)
from .space import (
    Distribution,
    FiniteSpace,
    Hypothesis,
    HypothesisClass,
    Sample,
    SubclassView,
    all_same_sample,
    constrained_subclass,
    derive_seed,
    draw_sample,
    empirical_distribution,
    excess_risk,
    risk_mu0,
    risk_mu1,
)
from .structure import (
    SeparationWitness,
    StructureReport,
    TotalOrderCertificate,
    analyze_class,
    difference_class,
    is_totally_ordered,
    maximal_element,
    separates_three_points,
    vc_dimension,
)
from .learners import (
    LearnerConfig,
    LearnerOutput,
    TrialResult,
    constant_learner,
    epsilon_n,
    erm_learner,
    maximal_first_learner,
    required_n0,
    run_learner_trial,
)
from .adversary import (
    NoMaxFamily,
    PackingFamily,
    build_nomax_family,
    build_packing_family,
    gilbert_varshamov_packing,
    transport_measure,
)
from .ratelab import (
    ExperimentConfig,
    Instance,
    PerN,
    RateReport,
    minimax_floor,
    run_experiment,
)
from .fixtures import CATALOG, FIXTURE_NAMES, Fixture, get_fixture

__version__ = "0.1.0"
