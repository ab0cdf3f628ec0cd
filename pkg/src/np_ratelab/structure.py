"""Structural analyzers for finite hypothesis classes.

These decide which learning regime a class can exhibit: exact VC dimension by
exhaustive shattering search, the three-points-separation test, total order
by inclusion, maximal elements, and the difference class.  Everything is
exhaustive and certificate-producing; the intended scale is m <= ~24 atoms
and |H| <= ~4096 hypotheses.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .errors import BudgetExceededError
from .space import Hypothesis, HypothesisClass, SubclassView


class SeparationWitness(NamedTuple):
    """Two hypotheses and three atoms certifying three-points-separation.

    h1 and h2 label x0 as 0; h1 labels x1 but not x2 as 1; h2 the reverse.
    """

    h1: int
    h2: int
    x0: int
    x1: int
    x2: int


@dataclass(frozen=True)
class TotalOrderCertificate:
    """Either a chain of indices sorted by inclusion, or a violating pair."""

    is_chain: bool
    chain: tuple[int, ...] | None = None
    violation: tuple[int, int] | None = None


@dataclass(frozen=True)
class StructureReport:
    vc_dimension: int
    separates_three_points: bool
    witness: SeparationWitness | None

    def to_json_dict(self) -> dict:
        return {
            "vc_dimension": self.vc_dimension,
            "separates_three_points": self.separates_three_points,
            "witness": None if self.witness is None else dict(self.witness._asdict()),
        }


def _shatters(bit_columns: np.ndarray, atoms: tuple[int, ...]) -> bool:
    """True iff every 0-1 labeling of ``atoms`` is realized by some mask.

    ``bit_columns[a]`` is the 0/1 vector of label bits at atom ``a`` across
    all masks; the distinct projection count is computed vectorized.
    """
    k = len(atoms)
    patterns = np.zeros(bit_columns.shape[1], dtype=np.int64)
    for j, a in enumerate(atoms):
        patterns |= bit_columns[a] << j
    return len(np.unique(patterns)) == 1 << k


def vc_dimension(hclass: HypothesisClass, budget: int | None = None) -> int:
    """Exact VC dimension by exhaustive search over atom subsets.

    Tries k = 1, 2, ... and stops at the first k with no shattered k-subset
    (shattering is downward closed, so no larger subset can be shattered).
    A single point is shattered iff both labels occur on it; if no point is,
    the dimension is 0.  ``budget`` caps the number of subset tests; when it
    runs out a ``BudgetExceededError`` carries the best lower bound found.
    """
    masks = hclass.masks
    m = hclass.m
    k_cap = min(m, max(len(masks).bit_length() - 1, 0))
    bit_columns = np.array(
        [[(mk >> a) & 1 for mk in masks] for a in range(m)], dtype=np.int64
    )
    # atoms where both labels occur; others can never belong to a shattered set
    live = tuple(
        a for a in range(m) if 0 < int(bit_columns[a].sum()) < len(masks)
    )
    k_cap = min(k_cap, len(live))
    best = 0
    tests = 0
    for k in range(1, k_cap + 1):
        shattered_here = False
        for atoms in combinations(live, k):
            if budget is not None:
                tests += 1
                if tests > budget:
                    raise BudgetExceededError(
                        f"budget of {budget} subset tests exceeded", best
                    )
            if _shatters(bit_columns, atoms):
                shattered_here = True
                break
        if not shattered_here:
            break
        best = k
    return best


def separates_three_points(hclass: HypothesisClass) -> SeparationWitness | None:
    """Search for two hypotheses whose positive sets are incomparable and
    do not jointly cover the space; returns the witness or None.

    Ties resolve to the lexicographically smallest
    (h1 index, h2 index, x0, x1, x2).
    """
    masks = hclass.masks
    m = hclass.m
    full = (1 << m) - 1
    n = len(masks)
    for i in range(n):
        a = masks[i]
        for j in range(i + 1, n):
            b = masks[j]
            only_a = a & ~b
            only_b = b & ~a
            outside = full & ~(a | b)
            if only_a and only_b and outside:
                return SeparationWitness(
                    h1=i,
                    h2=j,
                    x0=(outside & -outside).bit_length() - 1,
                    x1=(only_a & -only_a).bit_length() - 1,
                    x2=(only_b & -only_b).bit_length() - 1,
                )
    return None


def _masks_and_indices(x: HypothesisClass | SubclassView) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if isinstance(x, SubclassView):
        return x.masks(), x.indices
    return x.masks, tuple(range(len(x)))


def is_totally_ordered(x: HypothesisClass | SubclassView) -> TotalOrderCertificate:
    """Check that positive sets are pairwise nested; certify either way.

    The chain certificate lists original indices sorted by inclusion (small
    to large); the violation certificate is the first incomparable pair in
    index order.
    """
    masks, indices = _masks_and_indices(x)
    n = len(masks)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = masks[i], masks[j]
            if (a & ~b) and (b & ~a):
                return TotalOrderCertificate(
                    is_chain=False, violation=(indices[i], indices[j])
                )
    order = sorted(range(n), key=lambda t: masks[t].bit_count())
    return TotalOrderCertificate(
        is_chain=True, chain=tuple(indices[t] for t in order)
    )


def maximal_element(x: HypothesisClass | SubclassView) -> int | None:
    """Index of the hypothesis whose positive set contains all others, if any.

    Containment is non-strict: the element equal to the union of all positive
    sets qualifies.  Returns the original index, or None when the union is
    not itself a member.
    """
    masks, indices = _masks_and_indices(x)
    if not masks:
        return None
    union = 0
    for mk in masks:
        union |= mk
    for pos, mk in enumerate(masks):
        if mk == union:
            return indices[pos]
    return None


def difference_class(hclass: HypothesisClass) -> HypothesisClass:
    """All pairwise set differences of positive sets, deduplicated.

    Pairs include (h, h), so the empty set is always a member.  Order is
    first occurrence in (i, j) index order.
    """
    seen: set[int] = set()
    out: list[Hypothesis] = []
    m = hclass.m
    for a in hclass.masks:
        for b in hclass.masks:
            diff = a & ~b
            if diff not in seen:
                seen.add(diff)
                out.append(Hypothesis(diff, m))
    return HypothesisClass(tuple(out))


def analyze_class(hclass: HypothesisClass, budget: int | None = None) -> StructureReport:
    witness = separates_three_points(hclass)
    return StructureReport(
        vc_dimension=vc_dimension(hclass, budget=budget),
        separates_three_points=witness is not None,
        witness=witness,
    )
