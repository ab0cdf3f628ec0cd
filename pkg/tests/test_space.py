"""Core data model: risks, subclasses, empirical measures, excess risk, sampling."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from np_ratelab import (
    Distribution,
    FiniteSpace,
    Hypothesis,
    HypothesisClass,
    InfeasibleLevelError,
    Sample,
    SpaceMismatchError,
    constrained_subclass,
    draw_sample,
    empirical_distribution,
    excess_risk,
    risk_mu0,
    risk_mu1,
)


def dyadic_masses(m: int, denom: int = 64):
    """Strategy producing exactly-representable masses summing to exactly 1."""
    def build(cut_list):
        cuts = sorted(cut_list)
        parts = [b - a for a, b in zip([0] + cuts, cuts + [denom])]
        return Distribution(tuple(p / denom for p in parts))

    return st.lists(
        st.integers(0, denom), min_size=m - 1, max_size=m - 1
    ).map(build)


class TestRisks:
    def test_all_zeros_hypothesis_has_zero_mu0_risk(self):
        d = Distribution((0.3, 0.3, 0.4))
        assert risk_mu0(Hypothesis(0, 3), d) == 0.0

    def test_all_ones_hypothesis_has_full_mu0_risk(self):
        d = Distribution((0.25, 0.25, 0.5))
        assert risk_mu0(Hypothesis(0b111, 3), d) == 1.0

    def test_three_atom_threshold_risk(self):
        # masses 1 - a - e/2, e/2, a with a = 0.2, e = 0.1; threshold at x3
        d = Distribution((0.75, 0.05, 0.2))
        h = Hypothesis.from_bits((0, 0, 1))
        assert risk_mu0(h, d) == 0.2

    def test_mu1_risk_is_complement_mass(self):
        d = Distribution((0.25, 0.25, 0.5))
        assert risk_mu1(Hypothesis(0b111, 3), d) == 0.0
        assert risk_mu1(Hypothesis(0, 3), d) == 1.0

    def test_dimension_mismatch_raises(self):
        d = Distribution((0.5, 0.5))
        with pytest.raises(SpaceMismatchError):
            risk_mu0(Hypothesis(0b1, 3), d)

    @given(
        dist=dyadic_masses(5),
        mask=st.integers(0, 31),
    )
    @settings(max_examples=60, deadline=None)
    def test_risks_sum_to_one_exactly_on_dyadic_masses(self, dist, mask):
        h = Hypothesis(mask, 5)
        assert risk_mu0(h, dist) + risk_mu1(h, dist) == 1.0


class TestConstrainedSubclass:
    def setup_method(self):
        self.hclass = HypothesisClass.from_masks(3, [0b000, 0b010, 0b100, 0b110])
        self.d = Distribution((0.5, 0.25, 0.25))

    def test_level_one_keeps_everything(self):
        assert constrained_subclass(self.hclass, self.d, 1.0).indices == (0, 1, 2, 3)

    def test_level_zero_on_uniform_singletons_is_empty(self):
        singles = HypothesisClass.from_masks(4, [1 << i for i in range(4)])
        u = Distribution((0.25,) * 4)
        assert constrained_subclass(singles, u, 0.0).indices == ()

    def test_threshold_chain_at_exact_level(self):
        # only the top threshold is feasible at alpha = 0.2
        chain = HypothesisClass.from_masks(3, [0b100, 0b110, 0b111])
        d = Distribution((0.75, 0.05, 0.2))
        assert constrained_subclass(chain, d, 0.2).indices == (0,)

    def test_preserves_index_order(self):
        view = constrained_subclass(self.hclass, self.d, 0.25)
        assert view.indices == (0, 1, 2)

    @given(
        dist=dyadic_masses(4),
        levels=st.tuples(st.integers(0, 64), st.integers(0, 64)),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_level(self, dist, levels):
        lo, hi = sorted(levels)
        hclass = HypothesisClass.from_masks(4, range(16))
        small = set(constrained_subclass(hclass, dist, lo / 64).indices)
        large = set(constrained_subclass(hclass, dist, hi / 64).indices)
        assert small <= large


class TestEmpiricalDistribution:
    def test_counts(self):
        space = FiniteSpace.of_size(2)
        s = Sample(np.array([0, 0, 0, 0]), seed=1)
        assert empirical_distribution(s, space).mass == (1.0, 0.0)
        s = Sample(np.array([0, 1, 1, 1]), seed=1)
        assert empirical_distribution(s, space).mass == (0.25, 0.75)

    def test_empty_sample_rejected(self):
        space = FiniteSpace.of_size(2)
        with pytest.raises(ValueError):
            empirical_distribution(Sample(np.array([], dtype=np.int64), seed=0), space)

    def test_out_of_range_index_rejected(self):
        space = FiniteSpace.of_size(2)
        with pytest.raises(SpaceMismatchError):
            empirical_distribution(Sample(np.array([0, 5]), seed=0), space)

    @given(
        draws=st.lists(st.integers(0, 3), min_size=1, max_size=40),
        mask=st.integers(0, 15),
    )
    @settings(max_examples=60, deadline=None)
    def test_risk_under_empirical_matches_direct_counting(self, draws, mask):
        space = FiniteSpace.of_size(4)
        s = Sample(np.array(draws), seed=0)
        h = Hypothesis(mask, 4)
        direct = sum(1 for x in draws if not h.labels(x)) / len(draws)
        via_measure = risk_mu1(h, empirical_distribution(s, space))
        assert via_measure == pytest.approx(direct, rel=0, abs=1e-12)


class TestExcessRisk:
    def setup_method(self):
        self.hclass = HypothesisClass.from_masks(3, [0b000, 0b010, 0b100, 0b110])
        self.mu0 = Distribution((0.5, 0.25, 0.25))
        self.mu1 = Distribution((0.0, 0.625, 0.375))

    def test_constrained_minimizer_has_zero_excess(self):
        # feasible at 0.25: indices 0,1,2; best mu1-risk is {x1}
        best = self.hclass[1]
        assert excess_risk(best, self.hclass, self.mu0, self.mu1, 0.25) == 0.0

    def test_infeasible_better_hypothesis_is_clamped_to_zero(self):
        both = self.hclass[3]  # risk_mu0 = 0.5 > 0.25 but lowest mu1-risk
        assert risk_mu1(both, self.mu1) < min(
            risk_mu1(self.hclass[i], self.mu1) for i in (0, 1, 2)
        )
        assert excess_risk(both, self.hclass, self.mu0, self.mu1, 0.25) == 0.0

    def test_empty_feasible_set_raises(self):
        singles = HypothesisClass.from_masks(3, [0b001, 0b010, 0b100])
        u = Distribution((1 / 4, 1 / 4, 1 / 2))
        with pytest.raises(InfeasibleLevelError):
            excess_risk(singles[0], singles, u, self.mu1, 0.0)

    def test_matches_exhaustive_fraction_oracle(self):
        # brute-force the same quantity in exact rational arithmetic
        mu0 = Distribution((0.5, 0.25, 0.25))
        mu1 = Distribution((0.125, 0.5, 0.375))
        mu0_f = [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]
        mu1_f = [Fraction(1, 8), Fraction(1, 2), Fraction(3, 8)]
        hclass = HypothesisClass.from_masks(3, range(8))
        alpha = Fraction(1, 4)
        feas = [
            mk for mk in range(8)
            if sum(mu0_f[i] for i in range(3) if (mk >> i) & 1) <= alpha
        ]
        best = min(
            sum(mu1_f[i] for i in range(3) if not (mk >> i) & 1) for mk in feas
        )
        for mk in range(8):
            r = sum(mu1_f[i] for i in range(3) if not (mk >> i) & 1)
            expect = max(Fraction(0), r - best)
            got = excess_risk(Hypothesis(mk, 3), hclass, mu0, mu1, 0.25)
            assert got == pytest.approx(float(expect), abs=1e-15)


class TestDrawSample:
    def test_point_mass_draws_constant(self):
        d = Distribution.point_mass(5, 2)
        s = draw_sample(d, 5, seed=123)
        assert list(s.draws) == [2, 2, 2, 2, 2]

    def test_same_seed_same_draws(self):
        d = Distribution((0.2, 0.3, 0.5))
        a = draw_sample(d, 100, seed=42)
        b = draw_sample(d, 100, seed=42)
        assert np.array_equal(a.draws, b.draws)
        c = draw_sample(d, 100, seed=43)
        assert not np.array_equal(a.draws, c.draws)

    def test_zero_size_rejected(self):
        with pytest.raises(ValueError):
            draw_sample(Distribution((1.0,)), 0, seed=1)

    def test_law_of_large_numbers_at_fixed_seed(self):
        d = Distribution.uniform(4)
        s = draw_sample(d, 100_000, seed=2024)
        freqs = np.bincount(s.draws, minlength=4) / s.n
        assert np.all(np.abs(freqs - 0.25) < 0.01)

    def test_empirical_of_point_mass_sample_is_the_point_mass(self):
        space = FiniteSpace.of_size(4)
        d = Distribution.point_mass(4, 1)
        s = draw_sample(d, 50, seed=9)
        assert empirical_distribution(s, space) == d


class TestValidation:
    def test_distribution_mass_bounds(self):
        with pytest.raises(ValueError):
            Distribution((1.5, -0.5))
        with pytest.raises(ValueError):
            Distribution((0.5, 0.4))

    def test_space_needs_unique_atoms(self):
        with pytest.raises(ValueError):
            FiniteSpace(("a", "a"))
        with pytest.raises(ValueError):
            FiniteSpace(())

    def test_class_rejects_duplicates_and_empty(self):
        with pytest.raises(ValueError):
            HypothesisClass.from_masks(3, [1, 1])
        with pytest.raises(ValueError):
            HypothesisClass(())

    def test_hypothesis_mask_must_fit(self):
        with pytest.raises(ValueError):
            Hypothesis(0b1000, 3)
