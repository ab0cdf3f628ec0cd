"""Adversarial instance constructors for the lower-bound side of the lab.

Three constructions are provided:

* a packing family of mu1 variants indexed by sign vectors from a greedy
  Gilbert-Varshamov code, which forces errors of order sqrt(d/n) against the
  paired-atoms feasible class;
* a chain family that hides mass 1/n on an escape atom just above a probed
  learner's response, forcing errors of order 1/n on open chains;
* a mass transport that rewrites mu0 so the feasible subclass is identical
  at levels alpha and alpha + epsilon0 while keeping its chain structure,
  with all the required set identities machine-checked before returning.

Finite spaces cannot literally contain a totally ordered feasible subclass
without a largest member, so chain instances here model infinite chains by
truncation: the top of the feasible chain stands in for the unattained
supremum, and learners opt into that reading via ``open_chain``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    ConstructionError,
    InapplicableConstructionError,
    PackingError,
)
from .space import (
    Distribution,
    FiniteSpace,
    Hypothesis,
    HypothesisClass,
    Sample,
    all_same_sample,
    constrained_subclass,
    risk_mu0,
)
from .structure import is_totally_ordered

PAIRED_CASE_MIN_DH = 17  # below this the three-atom two-point family is used


def gilbert_varshamov_packing(
    d: int, min_dist: int, min_size: int | None = None, seed: int = 0
) -> list[tuple[int, ...]]:
    """Greedy packing of {-1,+1}^d at pairwise Hamming distance >= min_dist.

    The first codeword is always all-ones.  Candidates are scanned in a
    seeded random permutation of the full cube (exhaustive for d <= 20; a
    capped random stream beyond that).  Stops early once ``min_size``
    codewords are found; raises ``PackingError`` if the target is unreachable
    after the full scan.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    if min_dist < 1:
        raise ValueError("min_dist must be at least 1")
    ones = (1 << d) - 1
    kept = [ones]
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    if d <= 20:
        candidates = rng.permutation(1 << d)
    else:
        candidates = rng.integers(0, 1 << d, size=1 << 20, dtype=np.uint64)
    if min_size is None or min_size > 1:
        for cand in candidates:
            c = int(cand)
            if c == ones:
                continue
            if all((c ^ k).bit_count() >= min_dist for k in kept):
                kept.append(c)
                if min_size is not None and len(kept) >= min_size:
                    break
    if min_size is not None and len(kept) < min_size:
        raise PackingError(
            f"only {len(kept)} codewords of length {d} at distance {min_dist}; "
            f"{min_size} requested"
        )
    return [
        tuple(1 if (c >> i) & 1 else -1 for i in range(d)) for c in kept
    ]


@dataclass(frozen=True)
class PackingFamily:
    """A fixed mu0 plus a family of mu1 variants indexed by sign vectors.

    Layout "pairs": atoms x0, x_1..x_{d/2}, x'_1..x'_{d/2}; mu0 puts 1-2a on
    x0 and 2a/d on each paired atom; variant sigma tilts each pair by
    +-(sigma_i/2) * delta/d.  Layout "triple": atoms x0, x1, x2 with mu0 =
    (1-2a, a, a) and two variants putting 1/2 +- delta/2 on x1/x2.  The
    companion class is the full projection onto the atoms with x0 fixed to 0.
    """

    space: FiniteSpace
    hclass: HypothesisClass
    mu0: Distribution
    mu1_variants: tuple[Distribution, ...]
    sigma_codes: tuple[tuple[int, ...], ...]
    delta_gap: float
    alpha: float
    d: int
    d_h: int
    layout: str  # "pairs" or "triple"


def _triple_family(alpha: float, n: int, c1: float) -> PackingFamily:
    delta = c1 * math.sqrt(1.0 / n)
    space = FiniteSpace(("x0", "x1", "x2"))
    hclass = HypothesisClass.from_masks(3, (0b000, 0b010, 0b100, 0b110))
    mu0 = Distribution((1.0 - 2.0 * alpha, alpha, alpha))
    variants = tuple(
        Distribution((0.0, 0.5 + k * delta / 2.0, 0.5 - k * delta / 2.0))
        for k in (1, -1)
    )
    return PackingFamily(
        space=space,
        hclass=hclass,
        mu0=mu0,
        mu1_variants=variants,
        sigma_codes=((1,), (-1,)),
        delta_gap=delta,
        alpha=alpha,
        d=2,
        d_h=2,
        layout="triple",
    )


def _pairs_family(d_h: int, alpha: float, n: int, c1: float, seed: int) -> PackingFamily:
    d = d_h - 1 if d_h % 2 == 1 else d_h - 2
    delta = c1 * math.sqrt(d_h / n)
    if delta >= 1.0:
        raise ValueError("n too small for the requested tilt: c1*sqrt(d_h/n) >= 1")
    half = d // 2
    atoms = (
        ("x0",)
        + tuple(f"x{i}" for i in range(1, half + 1))
        + tuple(f"x{i}p" for i in range(1, half + 1))
    )
    space = FiniteSpace(atoms)
    m = 1 + d
    # all hypotheses labeling x0 as 0: subsets of the paired atoms
    hclass = HypothesisClass.from_masks(m, (s << 1 for s in range(1 << d)))
    pair_mass = 2.0 * alpha / d
    mu0 = Distribution((1.0 - 2.0 * alpha,) + (pair_mass,) * d)
    min_dist = max(1, math.ceil(d / 16))
    min_size = max(2, math.ceil(2 ** (d / 16)))
    codes = gilbert_varshamov_packing(half, min_dist, min_size, seed)
    variants = []
    for sigma in codes:
        mass = [0.0]
        mass.extend(1.0 / d + (s / 2.0) * delta / d for s in sigma)
        mass.extend(1.0 / d - (s / 2.0) * delta / d for s in sigma)
        variants.append(Distribution(tuple(mass)))
    return PackingFamily(
        space=space,
        hclass=hclass,
        mu0=mu0,
        mu1_variants=tuple(variants),
        sigma_codes=tuple(codes),
        delta_gap=delta,
        alpha=alpha,
        d=d,
        d_h=d_h,
        layout="pairs",
    )


def build_packing_family(
    d_h: int, alpha: float, n: int, c1: float = 0.5, seed: int = 0
) -> PackingFamily:
    """Construct the packing family for target dimension ``d_h`` at size ``n``.

    For d_h >= 17 the paired-atoms layout is used with d = d_h - 1 (d_h odd)
    or d_h - 2 (d_h even) and tilt c1*sqrt(d_h/n); below that the three-atom
    layout with two variants and tilt c1*sqrt(1/n).  The feasible subclass is
    identical at levels alpha and alpha + eps0 for eps0 <= alpha/d_h because
    feasibility steps in multiples of the paired-atom mass.
    """
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    if not 0.0 < c1 < 1.0:
        raise ValueError("c1 must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be at least 1")
    if d_h < 1:
        raise ValueError("d_h must be at least 1")
    if d_h >= PAIRED_CASE_MIN_DH:
        return _pairs_family(d_h, alpha, n, c1, seed)
    return _triple_family(alpha, n, c1)


@dataclass(frozen=True)
class NoMaxFamily:
    """Escape-mass family over a feasible chain, indexed by sample size.

    ``variant(n)`` puts mass 1 - 1/n on the anchor atom x0 (inside the
    chain's bottom member h0) and 1/n on the escape atom x1, which lies in
    h1 but outside both h0 and the probed learner response.  A learner that
    answers the all-x0 sample with a set missing x1 then carries excess risk
    at least 1/n, while h1 has none.
    """

    hclass: HypothesisClass
    mu0: Distribution
    alpha: float
    h0: int
    x0: int
    h1: int
    x1: int
    probe_used: bool

    def variant(self, n: int) -> Distribution:
        if n < 1:
            raise ValueError("n must be at least 1")
        mass = [0.0] * self.hclass.m
        mass[self.x0] = 1.0 - 1.0 / n
        mass[self.x1] = 1.0 / n
        return Distribution(tuple(mass))


def build_nomax_family(
    hclass: HypothesisClass,
    mu0: Distribution,
    alpha: float,
    n: int,
    learner_probe: Callable[[Sample], int] | None = None,
) -> NoMaxFamily:
    """Build the escape-mass family against a probed learner.

    The feasible subclass at level alpha must be a chain with at least two
    members (the finite stand-in for a chain with no attained supremum).
    ``learner_probe`` maps the all-x0 sample of size ``n`` to a chosen
    hypothesis index, exactly the response the adversary evades; omit it to
    use the fixed-escape approximation (escape in the first gap above the
    chain's bottom member).  Raises ``InapplicableConstructionError`` when
    the probed response already covers the whole chain, in which case no
    escape atom exists.
    """
    view = constrained_subclass(hclass, mu0, alpha)
    if len(view) < 2:
        raise InapplicableConstructionError(
            "feasible subclass has fewer than two members"
        )
    cert = is_totally_ordered(view)
    if not cert.is_chain:
        raise InapplicableConstructionError(
            f"feasible subclass is not a chain: indices {cert.violation} incomparable"
        )
    chain = cert.chain or ()
    h0 = next((i for i in chain if hclass.masks[i]), None)
    if h0 is None:
        raise InapplicableConstructionError("every feasible positive set is empty")
    h0_mask = hclass.masks[h0]
    x0 = (h0_mask & -h0_mask).bit_length() - 1
    if learner_probe is not None:
        probed = learner_probe(all_same_sample(x0, n))
        if probed not in view.indices:
            raise ConstructionError("probe returned an index outside the feasible set")
    else:
        probed = h0
    union = h0_mask | hclass.masks[probed]
    h1 = next(
        (
            i
            for i in chain
            if hclass.masks[i] & ~union and (union & ~hclass.masks[i]) == 0
        ),
        None,
    )
    if h1 is None:
        raise InapplicableConstructionError(
            "maximal response: no feasible hypothesis lies strictly above the probe"
        )
    gap = hclass.masks[h1] & ~union
    x1 = (gap & -gap).bit_length() - 1
    return NoMaxFamily(
        hclass=hclass,
        mu0=mu0,
        alpha=alpha,
        h0=h0,
        x0=x0,
        h1=h1,
        x1=x1,
        probe_used=learner_probe is not None,
    )


def _mass_of(mass: list[float], mask: int) -> float:
    acc = 0.0
    for i, x in enumerate(mass):
        if (mask >> i) & 1:
            acc += x
    return acc


def transport_measure(
    hclass: HypothesisClass,
    mu0: Distribution,
    alpha: float,
    epsilon0: float,
) -> Distribution:
    """Rewrite mu0 so the feasible subclass is the same at alpha and alpha+eps0.

    Works on chain-structured feasible sets.  Writing A, B, C for the
    subclasses at levels alpha, alpha+eps0, alpha+2eps0: if A == B the input
    is returned unchanged.  Otherwise any excess mass in the stratum between
    the tops of A and B beyond eps0 is first folded down into the top of A;
    the remaining stratum mass then moves to a point w common to every
    member of C \\ B when that stratum is nonempty (risks above B stay
    exactly unchanged), or to a point z outside every member of C (risks
    above B drop by at most the eps0 budget, which the 2eps0 gap absorbs).

    The returned measure is machine-checked to satisfy
    ``subclass(mu0', alpha) == subclass(mu0', alpha+eps0) == subclass(mu0, alpha+eps0)``
    and to preserve the chain top; any failure raises ``ConstructionError``
    rather than returning a bad measure.
    """
    if epsilon0 <= 0.0:
        raise ValueError("epsilon0 must be positive")
    if not 0.0 < alpha < 0.5 or alpha + 2 * epsilon0 >= 0.5:
        raise ValueError("need 0 < alpha and alpha + 2*epsilon0 < 1/2")
    if hclass.m != mu0.m:
        raise ValueError("class and distribution over different spaces")

    a_view = constrained_subclass(hclass, mu0, alpha)
    b_view = constrained_subclass(hclass, mu0, alpha + epsilon0)
    if a_view.indices == b_view.indices:
        return mu0
    if len(a_view) == 0:
        raise InapplicableConstructionError("no feasible hypothesis at level alpha")
    c_view = constrained_subclass(hclass, mu0, alpha + 2 * epsilon0)
    cert = is_totally_ordered(c_view)
    if not cert.is_chain:
        raise InapplicableConstructionError(
            "subclass at level alpha + 2*epsilon0 is not a chain"
        )

    def top_mask(view) -> int:
        u = 0
        for i in view.indices:
            u |= hclass.masks[i]
        return u

    s_a = top_mask(a_view)  # union of a chain equals its largest member
    s_b = top_mask(b_view)
    s_c = top_mask(c_view)
    m = hclass.m
    mass = list(mu0.mass)
    stratum = s_b & ~s_a

    # fold excess stratum mass beyond eps0 into the top of A
    moved_total = _mass_of(mass, stratum)
    if moved_total > epsilon0:
        if s_a == 0:
            raise InapplicableConstructionError(
                "stratum mass exceeds epsilon0 and level-alpha members are all empty"
            )
        scale = epsilon0 / moved_total
        y = (s_a & -s_a).bit_length() - 1
        folded = 0.0
        for i in range(m):
            if (stratum >> i) & 1:
                keep = mass[i] * scale
                folded += mass[i] - keep
                mass[i] = keep
        mass[y] += folded

    # move the remaining stratum mass to w (common point above B) or z (outside C)
    remaining = 0.0
    for i in range(m):
        if (stratum >> i) & 1:
            remaining += mass[i]
            mass[i] = 0.0
    if s_c != s_b:
        common_above = s_c & ~s_b
        for i in c_view.indices:
            mk = hclass.masks[i]
            if i not in b_view.indices:
                common_above &= mk
        if common_above == 0:
            raise ConstructionError("no common point above the level-eps0 stratum")
        target = (common_above & -common_above).bit_length() - 1
    else:
        outside = ((1 << m) - 1) & ~s_c
        if outside == 0:
            raise ConstructionError("no atom outside the widest feasible set")
        target = (outside & -outside).bit_length() - 1
    mass[target] += remaining

    result = Distribution(tuple(mass))
    a2 = constrained_subclass(hclass, result, alpha).indices
    b2 = constrained_subclass(hclass, result, alpha + epsilon0).indices
    if not (a2 == b2 == b_view.indices):
        raise ConstructionError(
            "transport postcondition failed: feasible sets "
            f"{a2} / {b2} differ from target {b_view.indices}"
        )
    return result
