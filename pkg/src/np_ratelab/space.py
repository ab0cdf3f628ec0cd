"""Core data model: finite atom spaces, hypotheses, distributions, samples, risks.

Everything lives over a finite ordered list of atoms.  A hypothesis is the
bitset of atoms it labels 1; a distribution is a probability vector over the
atoms.  Risks are computed by left-to-right summation in atom-index order so
that feasibility comparisons are reproducible bit for bit (fixtures use
exactly representable masses, which makes the comparisons tolerance-free).

All types are immutable after construction and safe to share across workers;
``draw_sample`` is pure given its seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InfeasibleLevelError, SpaceMismatchError

RNG_ALGORITHM = "numpy-philox4x64"  # fixed per release, recorded in output metadata


def derive_seed(*parts: int) -> int:
    """Derive a 64-bit seed from an integer path, order-independently usable.

    Distinct paths give independent streams, so concurrent trials seeded by
    (master, trial index) do not depend on execution order.
    """
    ss = np.random.SeedSequence(tuple(int(p) for p in parts))
    return int(ss.generate_state(1, np.uint64)[0])


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


@dataclass(frozen=True)
class FiniteSpace:
    """An ordered finite set of atoms with opaque string labels."""

    atoms: tuple[str, ...]

    def __post_init__(self):
        if len(self.atoms) < 1:
            raise ValueError("a space needs at least one atom")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("atom labels must be unique")

    @staticmethod
    def of_size(m: int, prefix: str = "x") -> "FiniteSpace":
        return FiniteSpace(tuple(f"{prefix}{i}" for i in range(m)))

    @property
    def m(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class Hypothesis:
    """A binary classifier on a space of ``m`` atoms, stored as a bitmask.

    Bit ``i`` of ``mask`` set means the hypothesis labels atom ``i`` as 1.
    """

    mask: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("hypothesis needs m >= 1")
        if self.mask < 0 or self.mask >> self.m:
            raise ValueError("mask has bits outside the space")

    @staticmethod
    def from_bits(bits: Sequence[int]) -> "Hypothesis":
        mask = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError("bits must be 0 or 1")
            mask |= b << i
        return Hypothesis(mask, len(bits))

    @staticmethod
    def from_atoms(m: int, atoms: Iterable[int]) -> "Hypothesis":
        mask = 0
        for i in atoms:
            if not 0 <= i < m:
                raise ValueError("atom index out of range")
            mask |= 1 << i
        return Hypothesis(mask, m)

    def bits(self) -> tuple[int, ...]:
        return tuple((self.mask >> i) & 1 for i in range(self.m))

    def labels(self, atom: int) -> int:
        return (self.mask >> atom) & 1

    def positive_atoms(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.m) if (self.mask >> i) & 1)

    def complement(self) -> "Hypothesis":
        return Hypothesis(~self.mask & ((1 << self.m) - 1), self.m)

    def __len__(self) -> int:
        return self.mask.bit_count()


@dataclass(frozen=True)
class HypothesisClass:
    """A deduplicated, ordered, nonempty collection of hypotheses."""

    hypotheses: tuple[Hypothesis, ...]

    def __post_init__(self):
        if not self.hypotheses:
            raise ValueError("hypothesis class must be nonempty")
        m = self.hypotheses[0].m
        masks = []
        for h in self.hypotheses:
            if h.m != m:
                raise SpaceMismatchError("hypotheses live over different spaces")
            masks.append(h.mask)
        if len(set(masks)) != len(masks):
            raise ValueError("duplicate hypotheses in class")
        object.__setattr__(self, "_masks", tuple(masks))

    @staticmethod
    def from_masks(m: int, masks: Iterable[int]) -> "HypothesisClass":
        return HypothesisClass(tuple(Hypothesis(mk, m) for mk in masks))

    @property
    def m(self) -> int:
        return self.hypotheses[0].m

    @property
    def masks(self) -> tuple[int, ...]:
        return self._masks  # type: ignore[attr-defined]

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __getitem__(self, i: int) -> Hypothesis:
        return self.hypotheses[i]

    def __iter__(self) -> Iterator[Hypothesis]:
        return iter(self.hypotheses)

    def index_of_mask(self, mask: int) -> int | None:
        try:
            return self.masks.index(mask)
        except ValueError:
            return None


@dataclass(frozen=True)
class SubclassView:
    """A possibly-empty view of a hypothesis class, preserving original indices."""

    parent: HypothesisClass
    indices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[Hypothesis]:
        for i in self.indices:
            yield self.parent[i]

    def hypothesis(self, original_index: int) -> Hypothesis:
        return self.parent[original_index]

    def masks(self) -> tuple[int, ...]:
        return tuple(self.parent.masks[i] for i in self.indices)

    def to_class(self) -> HypothesisClass:
        if not self.indices:
            raise InfeasibleLevelError("cannot materialize an empty subclass view")
        return HypothesisClass(tuple(self.parent[i] for i in self.indices))


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability vector over the atoms of a space.

    Entries must lie in [0, 1] and sum to 1 within 1e-12 (left-to-right sum).
    """

    mass: tuple[float, ...]

    def __post_init__(self):
        if not self.mass:
            raise ValueError("distribution needs at least one atom")
        total = 0.0
        for x in self.mass:
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"mass {x!r} outside [0, 1]")
            total += x
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"masses sum to {total!r}, not 1 within 1e-12")

    @staticmethod
    def point_mass(m: int, atom: int) -> "Distribution":
        if not 0 <= atom < m:
            raise ValueError("atom index out of range")
        return Distribution(tuple(1.0 if i == atom else 0.0 for i in range(m)))

    @staticmethod
    def uniform(m: int) -> "Distribution":
        return Distribution(tuple(1.0 / m for _ in range(m)))

    @property
    def m(self) -> int:
        return len(self.mass)

    @cached_property
    def _cdf(self) -> np.ndarray:
        return np.cumsum(np.asarray(self.mass, dtype=np.float64))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Distribution) and self.mass == other.mass

    def __hash__(self) -> int:
        return hash(self.mass)


@dataclass(frozen=True, eq=False)
class Sample:
    """An i.i.d. sample of atom indices plus the seed that generated it."""

    draws: np.ndarray
    seed: int

    def __post_init__(self):
        arr = np.asarray(self.draws, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "draws", arr)

    @property
    def n(self) -> int:
        return len(self.draws)


def _check_same_space(h: Hypothesis, d: Distribution) -> None:
    if h.m != d.m:
        raise SpaceMismatchError(
            f"hypothesis over {h.m} atoms, distribution over {d.m}"
        )


def risk_mu0(h: Hypothesis, d: Distribution) -> float:
    """Probability under ``d`` of predicting 1: the mass of the positive set."""
    _check_same_space(h, d)
    acc = 0.0
    mask = h.mask
    for i, x in enumerate(d.mass):
        if (mask >> i) & 1:
            acc += x
    return acc


def risk_mu1(h: Hypothesis, d: Distribution) -> float:
    """Probability under ``d`` of predicting 0: the mass of the complement."""
    _check_same_space(h, d)
    acc = 0.0
    mask = h.mask
    for i, x in enumerate(d.mass):
        if not (mask >> i) & 1:
            acc += x
    return acc


def constrained_subclass(
    hclass: HypothesisClass, d: Distribution, level: float
) -> SubclassView:
    """The members whose ``risk_mu0`` is at most ``level``, as an index view.

    Membership uses exact floating-point <= on risks computed by left-to-right
    summation; there is no tolerance.  An empty view is a valid result.
    """
    if not 0.0 <= level <= 1.0:
        raise ValueError("level must lie in [0, 1]")
    if hclass.m != d.m:
        raise SpaceMismatchError("class and distribution over different spaces")
    idx = tuple(
        i for i, h in enumerate(hclass.hypotheses) if risk_mu0(h, d) <= level
    )
    return SubclassView(hclass, idx)


def empirical_distribution(sample: Sample, space: FiniteSpace) -> Distribution:
    """The empirical measure of a sample; risk under it equals empirical risk."""
    if sample.n == 0:
        raise ValueError("cannot take the empirical distribution of an empty sample")
    return _empirical(sample, space.m)


def _empirical(sample: Sample, m: int) -> Distribution:
    draws = sample.draws
    if draws.min(initial=0) < 0 or (sample.n > 0 and draws.max() >= m):
        raise SpaceMismatchError("sample contains atom indices outside the space")
    counts = np.bincount(draws, minlength=m)
    n = sample.n
    return Distribution(tuple(float(c) / n for c in counts))


def excess_risk(
    h_hat: Hypothesis,
    hclass: HypothesisClass,
    mu0: Distribution,
    mu1: Distribution,
    alpha: float,
) -> float:
    """Clamped gap between ``h_hat``'s mu1-risk and the best feasible mu1-risk.

    The infimum is a minimum over the finite subclass at level ``alpha``; an
    empty subclass is a domain error since there is nothing to compare against.
    """
    feasible = constrained_subclass(hclass, mu0, alpha)
    if len(feasible) == 0:
        raise InfeasibleLevelError("no feasible hypothesis at level alpha")
    best = min(risk_mu1(h, mu1) for h in feasible)
    return max(0.0, risk_mu1(h_hat, mu1) - best)


def draw_sample(d: Distribution, n: int, seed: int) -> Sample:
    """Draw ``n`` i.i.d. atoms from ``d`` by inverse CDF on a Philox stream.

    Identical (d, n, seed) produce identical samples.
    """
    if n < 1:
        raise ValueError("sample size must be at least 1")
    gen = _rng(seed)
    u = gen.random(n)
    idx = np.searchsorted(d._cdf, u, side="right")
    np.clip(idx, 0, d.m - 1, out=idx)
    return Sample(idx, int(seed))


def all_same_sample(atom: int, n: int) -> Sample:
    """The deterministic sample consisting of ``n`` copies of one atom."""
    if n < 1:
        raise ValueError("sample size must be at least 1")
    return Sample(np.full(n, atom, dtype=np.int64), seed=-1)
