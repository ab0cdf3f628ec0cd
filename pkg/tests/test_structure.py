"""Structural analyzers: VC dimension, separation, chains, maximal elements."""

import itertools

import numpy as np
import pytest

from np_ratelab import (
    BudgetExceededError,
    Distribution,
    HypothesisClass,
    analyze_class,
    constrained_subclass,
    difference_class,
    get_fixture,
    is_totally_ordered,
    maximal_element,
    risk_mu1,
    separates_three_points,
    vc_dimension,
)
from util_instances import rand_class, rand_distribution, rand_no3sep_class


def brute_force_vc(hclass: HypothesisClass) -> int:
    """Independent reimplementation: scan every atom subset of every size."""
    m = hclass.m
    best = 0
    for subset in range(1, 1 << m):
        atoms = [i for i in range(m) if (subset >> i) & 1]
        k = len(atoms)
        if k <= best:
            continue
        projections = {
            tuple((mk >> a) & 1 for a in atoms) for mk in hclass.masks
        }
        if len(projections) == 1 << k:
            best = k
    return best


class TestVcDimension:
    def test_one_sided_thresholds(self):
        assert vc_dimension(get_fixture("one_sided_thresholds").hclass) == 1

    def test_two_sided_thresholds(self):
        assert vc_dimension(get_fixture("two_sided_thresholds").hclass) == 2

    def test_power_set_of_three(self):
        assert vc_dimension(get_fixture("powerset3").hclass) == 3

    def test_constant_class_has_dimension_zero(self):
        assert vc_dimension(HypothesisClass.from_masks(4, [0b1111])) == 0
        assert vc_dimension(HypothesisClass.from_masks(4, [0])) == 0

    def test_budget_error_carries_lower_bound(self):
        hclass = get_fixture("powerset3").hclass
        with pytest.raises(BudgetExceededError) as exc:
            vc_dimension(hclass, budget=2)
        assert exc.value.best_lower_bound >= 0

    def test_agrees_with_brute_force_on_random_classes(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            m = int(rng.integers(2, 7))
            size = int(rng.integers(1, min(64, 1 << m) + 1))
            hclass = rand_class(rng, m, size)
            assert vc_dimension(hclass) == brute_force_vc(hclass)


class TestSeparatesThreePoints:
    def test_one_sided_thresholds_do_not_separate(self):
        assert separates_three_points(get_fixture("one_sided_thresholds").hclass) is None

    def test_singletons_separate(self):
        w = separates_three_points(get_fixture("singleton_indicators").hclass)
        assert w is not None

    def test_composite_dimension_two_without_separation(self):
        hclass = get_fixture("remark2_composite").hclass
        assert separates_three_points(hclass) is None
        assert vc_dimension(hclass) == 2

    def test_witness_is_lexicographically_minimal_and_valid(self):
        hclass = get_fixture("singleton_indicators").hclass
        w = separates_three_points(hclass)
        assert (w.h1, w.h2) == (0, 1)
        assert (w.x1, w.x2) == (0, 1)
        assert w.x0 == 2  # first atom outside {x0-indicator} union {x1-indicator}

    def test_witness_satisfies_conditions_on_random_classes(self):
        rng = np.random.default_rng(5)
        for _ in range(60):
            m = int(rng.integers(3, 8))
            hclass = rand_class(rng, m, int(rng.integers(2, 33)))
            w = separates_three_points(hclass)
            if w is None:
                continue
            h1, h2 = hclass[w.h1], hclass[w.h2]
            assert h1.labels(w.x0) == 0 and h2.labels(w.x0) == 0
            assert h1.labels(w.x1) == 1 and h2.labels(w.x2) == 1
            assert h1.labels(w.x2) == 0 and h2.labels(w.x1) == 0

    def test_dimension_three_implies_separation(self):
        rng = np.random.default_rng(17)
        found = 0
        for _ in range(200):
            m = int(rng.integers(3, 7))
            hclass = rand_class(rng, m, int(rng.integers(8, min(64, 1 << m) + 1)))
            if vc_dimension(hclass) >= 3:
                found += 1
                assert separates_three_points(hclass) is not None
        assert found > 10


class TestTotalOrder:
    def test_thresholds_form_a_chain(self):
        cert = is_totally_ordered(get_fixture("one_sided_thresholds").hclass)
        assert cert.is_chain
        assert cert.chain == tuple(range(10))  # fixture lists sets ascending

    def test_two_singletons_are_incomparable(self):
        cert = is_totally_ordered(HypothesisClass.from_masks(3, [0b001, 0b010]))
        assert not cert.is_chain
        assert cert.violation == (0, 1)

    def test_feasible_subclass_of_no3sep_class_is_chain_or_singleton(self):
        rng = np.random.default_rng(23)
        checked = 0
        for _ in range(120):
            m = int(rng.integers(3, 11))
            hclass = rand_no3sep_class(rng, m)
            assert separates_three_points(hclass) is None
            mu0 = rand_distribution(rng, m)
            alpha = float(rng.uniform(0.05, 0.49))
            view = constrained_subclass(hclass, mu0, alpha)
            if len(view) >= 2:
                checked += 1
                assert is_totally_ordered(view).is_chain
        assert checked > 30


class TestMaximalElement:
    def test_feasible_top_of_truncated_chain(self):
        fx = get_fixture("example3_chain")
        at_alpha = constrained_subclass(fx.hclass, fx.mu0, fx.alpha)
        assert at_alpha.indices == (0,)
        assert maximal_element(at_alpha) == 0  # the threshold at the last atom

        # At level alpha + eps0 the finite truncation attains its union; the
        # fixture declares the chain open above, so that top is a stand-in
        # for an unattained supremum rather than a genuine maximal element.
        at_relaxed = constrained_subclass(fx.hclass, fx.mu0, fx.alpha + fx.epsilon0)
        assert at_relaxed.indices == (0, 1, 2)
        assert fx.open_chain
        assert maximal_element(at_relaxed) == 2

    def test_singleton_class_is_its_own_maximum(self):
        assert maximal_element(HypothesisClass.from_masks(4, [0b0110])) == 0

    def test_absent_when_union_not_a_member(self):
        hclass = HypothesisClass.from_masks(3, [0b001, 0b010])
        assert maximal_element(hclass) is None

    def test_maximal_element_dominates_under_any_distribution(self):
        rng = np.random.default_rng(31)
        for _ in range(60):
            m = int(rng.integers(2, 7))
            hclass = rand_class(rng, m, int(rng.integers(2, 17)))
            top = maximal_element(hclass)
            if top is None:
                continue
            d = rand_distribution(rng, m)
            top_risk = risk_mu1(hclass[top], d)
            assert all(top_risk <= risk_mu1(h, d) + 1e-15 for h in hclass)


class TestDifferenceClass:
    def test_single_hypothesis_gives_empty_set_only(self):
        dc = difference_class(HypothesisClass.from_masks(4, [0b1010]))
        assert dc.masks == (0,)

    def test_thresholds_give_all_intervals(self):
        m = 6
        tails = [((1 << m) - 1) & ~((1 << k) - 1) for k in range(m)]
        dc = difference_class(HypothesisClass.from_masks(m, tails))
        intervals = {0}
        for i in range(m):
            for j in range(i + 1, m + 1):
                intervals.add(((1 << j) - 1) & ~((1 << i) - 1))
        # differences of tails are exactly the intervals [i, j) with j <= m-1,
        # plus each tail minus the widest tail's complement; enumerate directly
        expected = set()
        for a in tails:
            for b in tails:
                expected.add(a & ~b)
        assert set(dc.masks) == expected
        assert expected <= intervals

    def test_twelve_d_bound_on_random_classes(self):
        rng = np.random.default_rng(41)
        for _ in range(60):
            m = int(rng.integers(2, 9))
            hclass = rand_class(rng, m, int(rng.integers(1, 33)))
            d_h = vc_dimension(hclass)
            d_diff = vc_dimension(difference_class(hclass))
            assert d_diff <= 12 * max(d_h, 0) or (d_h == 0 and d_diff == 0)


class TestAnalyze:
    def test_report_fields_consistent(self):
        for name in ("one_sided_thresholds", "singleton_indicators", "powerset3"):
            fx = get_fixture(name)
            rep = analyze_class(fx.hclass)
            assert rep.vc_dimension == fx.expected_vc
            assert rep.separates_three_points == fx.expected_separation
            assert (rep.witness is not None) == rep.separates_three_points
