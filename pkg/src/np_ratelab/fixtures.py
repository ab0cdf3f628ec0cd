"""Compiled-in fixture catalog.

Seven named instances exercise the structural dichotomy: nested threshold
chains (closed and open-above), singleton indicators, two-sided thresholds,
the punctured-composite class of dimension 2 that still fails
three-points-separation, and the full power set on three atoms.

Chains marked ``open_chain`` are finite truncations of infinite nested
families: their feasible tops stand in for an unattained supremum, and
learners run on them with the maximal-element shortcut disabled.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .space import Distribution, FiniteSpace, HypothesisClass


@dataclass(frozen=True)
class Fixture:
    name: str
    space: FiniteSpace
    hclass: HypothesisClass
    mu0: Distribution | None
    mu1: Distribution | None
    alpha: float
    epsilon0: float
    open_chain: bool
    expected_vc: int
    expected_separation: bool
    description: str


def _tails_ascending(m: int) -> list[int]:
    """Masks of the sets {k..m-1}, smallest set first."""
    full = (1 << m) - 1
    return [full & ~((1 << k) - 1) for k in range(m - 1, -1, -1)]


def _prefixes_ascending(m: int) -> list[int]:
    return [(1 << (k + 1)) - 1 for k in range(m)]


def _build_catalog() -> dict[str, Fixture]:
    fixtures: list[Fixture] = []

    m = 10
    fixtures.append(
        Fixture(
            name="one_sided_thresholds",
            space=FiniteSpace.of_size(m),
            hclass=HypothesisClass.from_masks(m, _tails_ascending(m)),
            mu0=None,
            mu1=None,
            alpha=0.25,
            epsilon0=0.1,
            open_chain=False,
            expected_vc=1,
            expected_separation=False,
            description="nested one-sided thresholds on 10 ordered atoms",
        )
    )

    two_sided = _tails_ascending(m) + [
        p for p in _prefixes_ascending(m) if p != (1 << m) - 1
    ]
    fixtures.append(
        Fixture(
            name="two_sided_thresholds",
            space=FiniteSpace.of_size(m),
            hclass=HypothesisClass.from_masks(m, two_sided),
            mu0=None,
            mu1=None,
            alpha=0.25,
            epsilon0=0.1,
            open_chain=False,
            expected_vc=2,
            expected_separation=True,
            description="thresholds in both directions on 10 ordered atoms",
        )
    )

    fixtures.append(
        Fixture(
            name="singleton_indicators",
            space=FiniteSpace.of_size(5),
            hclass=HypothesisClass.from_masks(5, [1 << i for i in range(5)]),
            mu0=None,
            mu1=None,
            alpha=0.25,
            epsilon0=0.1,
            open_chain=False,
            expected_vc=1,
            expected_separation=True,
            description="each hypothesis is 1 on exactly one of 5 atoms",
        )
    )

    mc = 6
    composite = _tails_ascending(mc) + [((1 << mc) - 1) & ~(1 << 1)]
    fixtures.append(
        Fixture(
            name="remark2_composite",
            space=FiniteSpace.of_size(mc),
            hclass=HypothesisClass.from_masks(mc, composite),
            mu0=None,
            mu1=None,
            alpha=0.25,
            epsilon0=0.1,
            open_chain=False,
            expected_vc=2,
            expected_separation=False,
            description="threshold chain plus the set punctured at one atom: "
            "dimension 2 without three-points-separation",
        )
    )

    me = 8
    fixtures.append(
        Fixture(
            name="example2_chain",
            space=FiniteSpace.of_size(me),
            hclass=HypothesisClass.from_masks(me, _tails_ascending(me)),
            mu0=Distribution((0.75, 0.25) + (0.0,) * (me - 2)),
            mu1=Distribution((0.0, 0.0) + (1.0 / 6,) * (me - 2)),
            alpha=0.25,
            epsilon0=0.1,
            open_chain=False,
            expected_vc=1,
            expected_separation=False,
            description="closed threshold chain: every feasible set attains "
            "its maximum, so learning is trivial",
        )
    )

    fixtures.append(
        Fixture(
            name="example3_chain",
            space=FiniteSpace(("x1", "g", "x2", "x3")),
            hclass=HypothesisClass.from_masks(4, _tails_ascending(4)),
            mu0=Distribution((0.75, 0.0, 0.05, 0.2)),
            mu1=None,
            alpha=0.2,
            epsilon0=0.1,
            open_chain=True,
            expected_vc=1,
            expected_separation=False,
            description="threshold chain truncating an open family: the "
            "feasible top at level alpha+eps0 stands in for an unattained "
            "supremum (atom g carries no mass)",
        )
    )

    fixtures.append(
        Fixture(
            name="powerset3",
            space=FiniteSpace.of_size(3),
            hclass=HypothesisClass.from_masks(3, range(8)),
            mu0=None,
            mu1=None,
            alpha=0.25,
            epsilon0=0.1,
            open_chain=False,
            expected_vc=3,
            expected_separation=True,
            description="all subsets of 3 atoms",
        )
    )

    return {fx.name: fx for fx in fixtures}


CATALOG: dict[str, Fixture] = _build_catalog()
FIXTURE_NAMES = tuple(CATALOG)


def get_fixture(name: str) -> Fixture:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(
            f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}"
        ) from None


@lru_cache(maxsize=None)
def transported_mu0(fx: Fixture, epsilon0: float | None = None) -> Distribution:
    """The fixture's mu0 rewritten so the feasible set matches at both levels.

    Used by escape-mass experiments, whose chains need at least two feasible
    members at the base level.
    """
    from .adversary import transport_measure

    eps = fx.epsilon0 if epsilon0 is None else epsilon0
    if fx.mu0 is None:
        raise ValueError(f"fixture {fx.name!r} has no mu0")
    return transport_measure(fx.hclass, fx.mu0, fx.alpha, eps)
