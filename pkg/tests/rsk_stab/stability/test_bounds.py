### SPDX-License-Identifier: GPL-2.0-or-later

"""Test cases for rsk_stab.stability.bounds"""

from math import (
    comb,
    sqrt,
    log,
)

from unittest import TestCase
from nose2.tools import params

import numpy as np
from scipy.stats import binom

from rsk_stab.core.losses import LossKind
from rsk_stab.stability.bounds import (
    BoundInputError,
    BoundResult,
    stacking_bound,
    inclusion_tail,
    bag_inclusion,
    dag_inclusion,
    bag_stacking_bound,
    dag_stacking_bound,
    occupancy_sum,
    bagging_stability_bound,
    subbagging_stability_bound,
    combiner_on_bagging_bound,
    gen_bound,
    gen_bound_subbagging,
    gen_bound_bagging,
    schedule,
    recipe_bound,
)

# k-NN with k = 1, 2, 3 under a ridge combiner with lambda = 2, at m = 10
BASE_BETAS = [0.1, 0.2, 0.3]
COMBINER_BETA = 0.05

def knn_gamma(k):
    """Return the 1-NN stability at training size k."""
    return 1 / k

class TestStacking(TestCase):
    """Tests for rsk_stab.stability.bounds stacking bounds."""
    def test_stacking(self):
        """Test rsk_stab.stability.bounds.stacking_bound is the product of betas"""
        result = stacking_bound(COMBINER_BETA, BASE_BETAS)
        self.assertAlmostEqual(result['value'], 3e-4)
        self.assertEqual(result['inputs']['base_betas'], BASE_BETAS)
        self.assertTrue(result.known)
    @params(
        (-0.1, [0.1]),
        (0.1, []),
        (0.1, [float('nan')]),
        (None, [0.1]),
    )
    def test_invalid(self, combiner_beta, base_betas):
        """Test rsk_stab.stability.bounds.stacking_bound rejects bad betas"""
        self.assertRaises(BoundInputError, stacking_bound, combiner_beta, base_betas)
    def test_bag_stacking(self):
        """Test rsk_stab.stability.bounds.bag_stacking_bound scales by the inclusion tail"""
        result = bag_stacking_bound(3, 10, COMBINER_BETA, BASE_BETAS)
        q = 0.0632
        tail = 3 * q * q * (1 - q) + q ** 3
        self.assertAlmostEqual(result['inputs']['q'], q)
        self.assertAlmostEqual(result['inputs']['tail'], tail)
        self.assertAlmostEqual(result['inputs']['tail'], 0.0114778, places=7)
        self.assertAlmostEqual(result['value'], tail * 3e-4)
        self.assertIn('q_mode=paper', result['notes'])
    def test_dag_stacking(self):
        """Test rsk_stab.stability.bounds.dag_stacking_bound with q = p/m"""
        result = dag_stacking_bound(3, 2, 10, COMBINER_BETA, BASE_BETAS)
        self.assertAlmostEqual(result['inputs']['tail'], 0.104)
        self.assertAlmostEqual(result['value'], 3.12e-5)
    def test_broadcast(self):
        """Test rsk_stab.stability.bounds one base beta applies to every member"""
        result = bag_stacking_bound(4, 10, 0.5, [0.5], 'classical')
        self.assertEqual(result['inputs']['base_betas'], [0.5] * 4)
        # q = 1: every member includes the example
        self.assertAlmostEqual(result['value'], 0.5 ** 5)
        self.assertRaises(BoundInputError, bag_stacking_bound, 4, 10, 0.5, [0.5, 0.5])
    def test_classical_limit(self):
        """Test rsk_stab.stability.bounds classical q recovers the stacking bound"""
        result = dag_stacking_bound(3, 5, 10, COMBINER_BETA, BASE_BETAS, 'classical')
        self.assertAlmostEqual(result['value'], stacking_bound(COMBINER_BETA, BASE_BETAS)['value'])
    def test_tail_sweep(self):
        """Test rsk_stab.stability.bounds sampled stacking bounds grow with q"""
        values = [
            dag_stacking_bound(5, p, 20, COMBINER_BETA, BASE_BETAS[:1])['value']
            for p in range(1, 21)
        ]
        self.assertEqual(values, sorted(values))
        self.assertLessEqual(values[-1], stacking_bound(COMBINER_BETA, BASE_BETAS[:1] * 5)['value'])
    @params(*range(5))
    def test_sampled_below_stacking(self, seed):
        """Test rsk_stab.stability.bounds sampled stacking bounds never exceed stacking"""
        rng = np.random.default_rng(seed)
        for _ in range(40):
            T = int(rng.integers(1, 13)) # pylint: disable=invalid-name
            m = int(rng.integers(2, 101))
            p = int(rng.integers(1, m + 1))
            combiner_beta = float(rng.uniform(0.0, 2.0))
            base_betas = rng.uniform(0.0, 2.0, size=T).tolist()
            stacked = stacking_bound(combiner_beta, base_betas)['value']
            for q_mode in ('paper', 'standard', 'classical'):
                bagged = bag_stacking_bound(T, m, combiner_beta, base_betas, q_mode)
                self.assertLessEqual(bagged['value'], stacked * (1 + 1e-12))
                self.assertAlmostEqual(bagged['value'], bagged['inputs']['tail'] * stacked)
            for q_mode in ('paper-example', 'paper-text', 'classical'):
                subsampled = dag_stacking_bound(T, p, m, combiner_beta, base_betas, q_mode)
                self.assertLessEqual(subsampled['value'], stacked * (1 + 1e-12))

class TestInclusion(TestCase):
    """Tests for rsk_stab.stability.bounds inclusion probabilities."""
    @params(
        ('paper', 0.0632),
        ('standard', 1 - 0.9 ** 10),
        ('classical', 1.0),
    )
    def test_bag(self, q_mode, q):
        """Test rsk_stab.stability.bounds.bag_inclusion modes"""
        self.assertAlmostEqual(bag_inclusion(10, q_mode), q)
    @params(
        ('paper-example', 0.2),
        ('paper-text', 0.5),
        ('classical', 1.0),
    )
    def test_dag(self, q_mode, q):
        """Test rsk_stab.stability.bounds.dag_inclusion modes"""
        self.assertAlmostEqual(dag_inclusion(2, 10, q_mode), q)
    def test_bad_mode(self):
        """Test rsk_stab.stability.bounds inclusion rejects unknown modes"""
        self.assertRaises(BoundInputError, bag_inclusion, 10, 'paper-text')
        self.assertRaises(BoundInputError, dag_inclusion, 11, 10)
    @params((1, 1), (5, 0), (5, 2), (10, 5), (64, 32))
    def test_tail_brute_force(self, T, s): # pylint: disable=invalid-name
        """Test rsk_stab.stability.bounds.inclusion_tail against direct sums"""
        for q in (0.0, 0.0632, 0.3, 0.5, 1.0):
            direct = sum(comb(T, k) * q ** k * (1 - q) ** (T - k) for k in range(s + 1, T + 1))
            self.assertAlmostEqual(inclusion_tail(T, s, q), direct, places=12)
    @params(*range(1, 13))
    def test_tail_grid(self, T): # pylint: disable=invalid-name
        """Test rsk_stab.stability.bounds.inclusion_tail over every s and a q grid"""
        grid = (0.0, 0.05, 0.0632, 0.25, 0.5, 0.75, 0.9, 1.0)
        previous = [1.0] * len(grid)
        for s in range(T + 1):
            tails = []
            for q in grid:
                direct = sum(
                    comb(T, k) * q ** k * (1 - q) ** (T - k) for k in range(s + 1, T + 1)
                )
                tails.append(inclusion_tail(T, s, q))
                self.assertAlmostEqual(tails[-1], direct, places=12)
                self.assertTrue(0.0 <= tails[-1] <= 1.0)
            self.assertEqual(tails[0], 0.0)
            self.assertAlmostEqual(tails[-1], 0.0 if s == T else 1.0, places=12)
            # nondecreasing in q, nonincreasing in s
            for (lower, upper) in zip(tails, tails[1:]):
                self.assertLessEqual(lower, upper + 1e-12)
            for (tail, before) in zip(tails, previous):
                self.assertLessEqual(tail, before + 1e-12)
            previous = tails
    def test_tail_large(self):
        """Test rsk_stab.stability.bounds.inclusion_tail beyond exact sums"""
        self.assertAlmostEqual(inclusion_tail(100, 50, 0.4), binom.sf(50, 100, 0.4))
    @params((0, 0, 0.5), (3, 4, 0.5), (3, 1, 1.5), (2.5, 1, 0.5))
    def test_tail_invalid(self, T, s, q): # pylint: disable=invalid-name
        """Test rsk_stab.stability.bounds.inclusion_tail rejects bad inputs"""
        self.assertRaises(BoundInputError, inclusion_tail, T, s, q)

class TestBagging(TestCase):
    """Tests for rsk_stab.stability.bounds bagging bounds."""
    def test_occupancy_small(self):
        """Test rsk_stab.stability.bounds.bagging_stability_bound at m = 2"""
        result = bagging_stability_bound(knn_gamma, 2)
        self.assertAlmostEqual(result['value'], 0.5)
        self.assertIn('occupancy=exact', result['notes'])
    def test_classification(self):
        """Test rsk_stab.stability.bounds classification bounds lead with 2"""
        result = bagging_stability_bound(knn_gamma, 2, B=7.0, task='classification')
        self.assertAlmostEqual(result['value'], 1.0)
    def test_approximate(self):
        """Test rsk_stab.stability.bounds approximate occupancy"""
        (total, mode) = occupancy_sum(knn_gamma, 100, 'auto')
        self.assertEqual(mode, 'approximate')
        self.assertAlmostEqual(total, 0.632 / 63.2)
    def test_exact_close(self):
        """Test rsk_stab.stability.bounds exact and approximate occupancy agree for large m"""
        (exact, _) = occupancy_sum(knn_gamma, 60, 'exact')
        (approximate, _) = occupancy_sum(knn_gamma, 60, 'approximate')
        self.assertAlmostEqual(exact, approximate, delta=0.1 * approximate)
    @params(
        lambda k: 1 / k ** 2,
        lambda k: 1 / sqrt(k),
        lambda k: k / (k + 1),
    )
    def test_exact_close_small(self, gamma):
        """Test rsk_stab.stability.bounds exact and approximate occupancy agree at m = 20"""
        (exact, _) = occupancy_sum(gamma, 20, 'exact')
        (approximate, _) = occupancy_sum(gamma, 20, 'approximate')
        self.assertAlmostEqual(exact, approximate, delta=0.15 * exact)
    def test_exact_knn(self):
        """Test rsk_stab.stability.bounds 1-NN occupancy sums are 1/m in both modes"""
        for mode in ('exact', 'approximate'):
            self.assertAlmostEqual(occupancy_sum(knn_gamma, 20, mode)[0], 1 / 20)
    def test_constant_gamma(self):
        """Test rsk_stab.stability.bounds occupancy sum of a constant schedule"""
        (total, _) = occupancy_sum(lambda k: 1.0, 12, 'exact')
        self.assertAlmostEqual(total, 1 - (11 / 12) ** 12)
    def test_subbagging(self):
        """Test rsk_stab.stability.bounds.subbagging_stability_bound of 1-NN"""
        result = subbagging_stability_bound(0.1, 10, 100, task='classification')
        self.assertAlmostEqual(result['value'], 0.02)
        self.assertEqual(result['inputs']['C'], 2.0)
        regression = subbagging_stability_bound(0.1, 10, 100, B=3.0)
        self.assertAlmostEqual(regression['value'], 0.03)
    def test_subbagging_invalid(self):
        """Test rsk_stab.stability.bounds.subbagging_stability_bound rejects p > m"""
        self.assertRaises(BoundInputError, subbagging_stability_bound, 0.1, 101, 100)
    def test_combiner_on_bagging(self):
        """Test rsk_stab.stability.bounds.combiner_on_bagging_bound"""
        inner = subbagging_stability_bound(0.1, 10, 100, task='classification')
        result = combiner_on_bagging_bound(0.01, 1.0, inner)
        self.assertAlmostEqual(result['value'], 2e-4)
        scaled = combiner_on_bagging_bound(0.01, 3.0, inner)
        self.assertAlmostEqual(scaled['value'], 6e-4)
        regression = subbagging_stability_bound(0.1, 10, 100, B=3.0)
        self.assertAlmostEqual(combiner_on_bagging_bound(0.01, 3.0, regression)['value'], 3e-4)
    def test_combiner_unknown(self):
        """Test rsk_stab.stability.bounds.combiner_on_bagging_bound of an unknown inner bound"""
        inner = BoundResult({'value': None, 'formula': 'unknown'})
        self.assertIsNone(combiner_on_bagging_bound(0.01, 1.0, inner)['value'])

class TestGeneralisation(TestCase):
    """Tests for rsk_stab.stability.bounds generalisation bounds."""
    def test_hypothesis(self):
        """Test rsk_stab.stability.bounds.gen_bound hypothesis form"""
        result = gen_bound('hypothesis', 0.1, 0.1, 1.0, 10, 0.5)
        self.assertAlmostEqual(result['value'], 0.1 + sqrt(0.7))
    def test_pointwise(self):
        """Test rsk_stab.stability.bounds.gen_bound pointwise form"""
        result = gen_bound('pointwise', 0.1, 0.1, 1.0, 10, 0.5)
        self.assertAlmostEqual(result['value'], 0.1 + sqrt(1.3))
    def test_uniform(self):
        """Test rsk_stab.stability.bounds.gen_bound uniform form"""
        result = gen_bound('uniform', 0.0, 0.01, 1.0, 50, 0.1)
        expect = 0.02 + 3.0 * sqrt(log(10) / 100)
        self.assertAlmostEqual(result['value'], expect)
    @params(
        ('hypothesis', 0.1, 0.1, 1.0, 10, 0.0),
        ('hypothesis', 0.1, 0.1, 1.0, 10, 1.0),
        ('hypothesis', 1.5, 0.1, 1.0, 10, 0.5),
        ('hypothesis', 0.1, -0.1, 1.0, 10, 0.5),
        ('hypothesis', 0.1, 0.1, 0.0, 10, 0.5),
        ('hypothesis', 0.1, 0.1, 1.0, 0, 0.5),
        ('sideways', 0.1, 0.1, 1.0, 10, 0.5),
    )
    def test_invalid(self, kind, observed, beta, M, m, delta): # pylint: disable=invalid-name,too-many-arguments
        """Test rsk_stab.stability.bounds.gen_bound rejects bad inputs"""
        self.assertRaises(BoundInputError, gen_bound, kind, observed, beta, M, m, delta)
    @params(
        ('hypothesis', 2.2, 'R_loo + sqrt((M^2 + 6 M m beta) / (2 m delta))'),
        ('pointwise', 0.2 + sqrt(7.0), 'R_emp + sqrt((M^2 + 12 M m beta) / (2 m delta))'),
        (
            'uniform', 0.3 + 6.0 * sqrt(log(10) / 40),
            'R_emp + 2 beta + (4 m beta + M) sqrt(log(1/delta) / (2 m))',
        ),
    )
    def test_formula(self, kind, value, formula):
        """Test rsk_stab.stability.bounds.gen_bound value, formula and inputs of each kind"""
        result = gen_bound(kind, 0.2, 0.05, 2.0, 20, 0.1)
        self.assertAlmostEqual(result['value'], value)
        self.assertEqual(result['formula'], formula)
        self.assertEqual(result['inputs'], {
            'kind': kind, 'observed_error': 0.2, 'beta': 0.05,
            'M': 2.0, 'm': 20, 'delta': 0.1,
        })
        self.assertEqual(result['notes'], [])
    @params('hypothesis', 'pointwise', 'uniform')
    def test_monotone(self, kind):
        """Test rsk_stab.stability.bounds.gen_bound grows with error, beta and M and shrinks with delta"""
        base = {'observed_error': 0.1, 'beta': 0.01, 'M': 1.0, 'm': 50, 'delta': 0.1}
        sweeps = {
            'observed_error': (0.0, 0.1, 0.5, 1.0),
            'beta': (0.0, 0.001, 0.01, 0.1, 1.0),
            'M': (1.0, 2.0, 5.0),
            'delta': (0.01, 0.05, 0.1, 0.5, 0.99),
        }
        for (name, grid) in sweeps.items():
            values = [
                gen_bound(kind, **dict(base, **{name: val}))['value'] for val in grid
            ]
            expect = sorted(values, reverse=name == 'delta')
            self.assertEqual(values, expect)
            self.assertEqual(len(set(values)), len(values))
        values = [
            gen_bound(kind, 0.1, 1 / m, 1.0, m, 0.1)['value'] for m in (10, 20, 50, 100, 1000)
        ]
        self.assertEqual(values, sorted(values, reverse=True))
    def test_decreasing(self):
        """Test rsk_stab.stability.bounds.gen_bound tightens with m at fixed stability"""
        values = [gen_bound('hypothesis', 0.1, 1 / m, 1.0, m, 0.05)['value'] for m in (10, 100, 1000)]
        self.assertEqual(values, sorted(values, reverse=True))
    def test_subbagging(self):
        """Test rsk_stab.stability.bounds.gen_bound_subbagging value"""
        result = gen_bound_subbagging('loo', 0.1, 0.1, 10, 100, 1.0, 1.0, 0.5)
        self.assertAlmostEqual(result['value'], 0.1 + sqrt((2 + 12) / 50))
        self.assertTrue(result['formula'].startswith('R_loo'))
        emp = gen_bound_subbagging('emp', 0.1, 0.1, 10, 100, 1.0, 1.0, 0.5)
        self.assertTrue(emp['formula'].startswith('R_emp'))
    def test_bagging(self):
        """Test rsk_stab.stability.bounds.gen_bound_bagging value"""
        result = gen_bound_bagging('loo', 0.0, knn_gamma, 2, 1.0, 1.0, 0.5)
        # occupancy sum 0.5 at m = 2
        self.assertAlmostEqual(result['value'], sqrt((1.0 + 6.0) / 0.5))

class TestRecipeBound(TestCase):
    """Tests for rsk_stab.stability.bounds.recipe_bound."""
    def test_learner(self):
        """Test rsk_stab.stability.bounds.recipe_bound of a single learner"""
        result = recipe_bound({'kind': 'learner', 'learner': {'algorithm': 'knn', 'k': 2}}, 10)
        self.assertAlmostEqual(result['value'], 0.2)
        self.assertEqual(result['loss'], 'classification01')
    def test_stacking(self):
        """Test rsk_stab.stability.bounds.recipe_bound of classical stacking"""
        recipe = {
            'kind': 'stacking',
            'bases': [{'algorithm': 'knn', 'k': k} for k in (1, 2, 3)],
            'combiner': {'algorithm': 'ridge', 'lambda': 2.0},
        }
        kind = LossKind('classification01')
        self.assertAlmostEqual(recipe_bound(recipe, 10, kind)['value'], 3e-4)
        sampled = dict(recipe, sampling='bootstrap')
        self.assertAlmostEqual(recipe_bound(sampled, 10, kind)['value'], 0.0114778 * 3e-4, places=9)
        subsampled = dict(recipe, sampling='subsample', p=2)
        self.assertAlmostEqual(recipe_bound(subsampled, 10, kind)['value'], 3.12e-5)
    def test_subbagging(self):
        """Test rsk_stab.stability.bounds.recipe_bound of subbagging"""
        recipe = {'kind': 'subbagging', 'base': {'algorithm': 'knn'}, 'p': 10}
        result = recipe_bound(recipe, 100, LossKind('classification01'))
        self.assertAlmostEqual(result['value'], 0.02)
        self.assertEqual(result['loss'], 'classification01')
    def test_bagging(self):
        """Test rsk_stab.stability.bounds.recipe_bound of bagging"""
        recipe = {'kind': 'bagging', 'base': {'algorithm': 'ridge', 'lambda': 1.0}}
        result = recipe_bound(recipe, 2, LossKind('squared'), B=2.0)
        # gamma_k = 1/k, occupancy sum 0.5, leading constant B
        self.assertAlmostEqual(result['value'], 1.0)
    @params(
        {'kind': 'bagging', 'base': {'algorithm': 'stump'}},
        {'kind': 'adaboost'},
        {'kind': 'weighted_bagging'},
        {'kind': 'learner', 'learner': {'algorithm': 'logistic'}},
    )
    def test_unknown(self, recipe):
        """Test rsk_stab.stability.bounds.recipe_bound is unknown without known stabilities"""
        self.assertIsNone(recipe_bound(recipe, 10, LossKind('classification01'))['value'])
    def test_other_loss(self):
        """Test rsk_stab.stability.bounds.recipe_bound k-NN bound is unknown for squared loss"""
        recipe = {'kind': 'learner', 'learner': {'algorithm': 'knn'}}
        self.assertIsNone(recipe_bound(recipe, 10, LossKind('squared'))['value'])
    def test_schedule(self):
        """Test rsk_stab.stability.bounds.schedule of known and unknown learners"""
        self.assertAlmostEqual(schedule({'algorithm': 'knn', 'k': 2})(4), 0.5)
        self.assertIsNone(schedule({'algorithm': 'stump'}))
