### SPDX-License-Identifier: GPL-2.0-or-later

"""Test cases for rsk_stab.stability.empirical"""

from unittest import TestCase
from nose2.tools import params

import numpy as np

from rsk_stab.core.data import remove_example
from rsk_stab.core.losses import LossKind
from rsk_stab.core.seed import Seed
from rsk_stab.core.synthetic import (
    BlobsSource,
    LinearSource,
)
from rsk_stab.ensembles.recipes import RECIPE
from rsk_stab.stability.bounds import (
    BoundResult,
    recipe_bound,
)
from rsk_stab.stability.empirical import (
    LossKindMismatchError,
    StabilityEstimate,
    scan_indices,
    estimate_stability,
    estimate_hypothesis_stability,
    estimate_pointwise_hypothesis_stability,
    estimate_stability_profile,
    compare_to_bound,
)

ZERO_ONE = LossKind('classification01')
SQUARED = LossKind('squared')

def make_recipe(algorithm, **params_):
    """Return the single learner recipe of `algorithm`."""
    return RECIPE({'kind': 'learner', 'learner': dict(params_, algorithm=algorithm)})

def make_estimate(mean, stderr, loss='classification01'):
    """Return a hypothesis stability estimate at m = 10."""
    return StabilityEstimate({
        'mean': mean, 'stderr': stderr, 'trials': 100, 'mode': 'hypothesis',
        'policy': 'random-i', 'loss': loss, 'm': 10,
    })

class TestScanIndices(TestCase):
    """Tests for rsk_stab.stability.empirical.scan_indices."""
    @params(
        (10, 4, [0, 3, 6, 9]),
        (3, 10, [0, 1, 2]),
        (10, 1, [0]),
        (10, [7, 2, 7], [2, 7]),
    )
    def test_indices(self, m, scan, expect):
        """Test rsk_stab.stability.empirical.scan_indices returns sorted indices"""
        self.assertEqual(scan_indices(m, scan), expect)
    @params((10, 0), (10, [10]), (10, [-1, 2]), (10, []))
    def test_invalid(self, m, scan):
        """Test rsk_stab.stability.empirical.scan_indices rejects bad scans"""
        self.assertRaises(ValueError, scan_indices, m, scan)

class TestEstimate(TestCase):
    """Tests for rsk_stab.stability.empirical.estimate_stability."""
    def setUp(self):
        self.blobs = BlobsSource(2, 2.0)
        self.linear = LinearSource(2, 0.1, Seed(3))
    @params('hypothesis', 'pointwise')
    def test_constant(self, mode):
        """Test rsk_stab.stability.empirical.estimate_stability of a constant predictor is zero"""
        estimate = estimate_stability(
            make_recipe('constant'), self.blobs, 10, ZERO_ONE, trials=20, mode=mode,
        )
        self.assertEqual(estimate['mean'], 0.0)
        self.assertEqual(estimate['stderr'], 0.0)
        self.assertEqual(estimate['mode'], mode)
        self.assertEqual(estimate['loss'], 'classification01')
        self.assertIsNone(estimate['index'])
    def test_trial(self):
        """Test rsk_stab.stability.empirical.estimate_stability of one fixed-i trial"""
        recipe = make_recipe('ridge', **{'lambda': 0.5})
        estimate = estimate_stability(
            recipe, self.linear, 6, SQUARED,
            trials=1, policy='fixed-i', index=2, seed=Seed(5),
        )
        seed = Seed(5).derive('trial', 0)
        data = self.linear.sample(6, seed.derive('data'))
        point = self.linear.draw(seed.derive('point'))
        (full, perturbed) = (
            recipe.train(_, seed.derive('train'))
            for _ in (data, remove_example(data, 2))
        )
        expect = abs(
            SQUARED(full.predict_all(point.x.reshape(1, -1))[0], point) -
            SQUARED(perturbed.predict_all(point.x.reshape(1, -1))[0], point)
        )
        self.assertAlmostEqual(estimate['mean'], expect)
        self.assertEqual(estimate['stderr'], 0.0)
        self.assertEqual(estimate['index'], 2)
    def test_threads(self):
        """Test rsk_stab.stability.empirical.estimate_stability is independent of threads"""
        recipe = make_recipe('knn', k=3)
        (one, three) = (
            estimate_stability(recipe, self.blobs, 12, ZERO_ONE, trials=30, seed=9, threads=_)
            for _ in (1, 3)
        )
        self.assertEqual(dict(one), dict(three))
    def test_seed(self):
        """Test rsk_stab.stability.empirical.estimate_stability is a function of the seed"""
        recipe = make_recipe('ridge')
        (first, second) = (
            estimate_stability(recipe, self.linear, 8, SQUARED, trials=10, seed=4)
            for _ in range(2)
        )
        self.assertEqual(dict(first), dict(second))
    def test_scanned(self):
        """Test rsk_stab.stability.empirical.estimate_stability scanned estimate is the largest fixed-i estimate"""
        recipe = make_recipe('ridge', **{'lambda': 0.1})
        scanned = estimate_stability(
            recipe, self.linear, 8, SQUARED, trials=15, seed=2,
            policy='max-over-scanned-i', scan=[0, 3, 7],
        )
        fixed = dict(
            (i, estimate_stability(
                recipe, self.linear, 8, SQUARED, trials=15, seed=2,
                policy='fixed-i', index=i,
            ))
            for i in (0, 3, 7)
        )
        best = max(fixed, key=lambda i: fixed[i]['mean'])
        self.assertEqual(scanned['index'], best)
        self.assertAlmostEqual(scanned['mean'], fixed[best]['mean'])
        self.assertAlmostEqual(scanned['stderr'], fixed[best]['stderr'])
        self.assertEqual(scanned['policy'], 'max-over-scanned-i')
    def test_knn(self):
        """Test rsk_stab.stability.empirical.estimate_stability of 1-NN is within k/m"""
        recipe = make_recipe('knn', k=1)
        estimate = estimate_hypothesis_stability(
            recipe, self.blobs, 20, ZERO_ONE, trials=200, seed=1,
        )
        record = compare_to_bound(estimate, recipe_bound(recipe, 20, ZERO_ONE))
        self.assertEqual(record['bound'], 0.05)
        self.assertEqual(record['status'], 'satisfied')
        self.assertLessEqual(estimate['mean'], 1.0)
    @params(*[(seed, k) for seed in range(5) for k in (1, 3)])
    def test_knn_seeds(self, seed, k):
        """Test rsk_stab.stability.empirical.estimate_stability of k-NN at m = 50 is within k/m for every seed"""
        recipe = make_recipe('knn', k=k)
        estimate = estimate_hypothesis_stability(
            recipe, self.blobs, 50, ZERO_ONE, trials=400, seed=seed,
        )
        self.assertLessEqual(estimate['mean'], k / 50 + 3 * estimate['stderr'])
        record = compare_to_bound(estimate, recipe_bound(recipe, 50, ZERO_ONE))
        self.assertAlmostEqual(record['bound'], k / 50)
        self.assertEqual(record['status'], 'satisfied')
    def test_knn_rate(self):
        """Test rsk_stab.stability.empirical.estimate_stability_profile of 1-NN decays as 1/m"""
        # with overlapping blobs the next neighbour disagrees half the time
        sizes = (25, 50, 100)
        profile = estimate_stability_profile(
            make_recipe('knn', k=1), BlobsSource(2, 0.0), sizes, ZERO_ONE,
            trials=2000, seed=11,
        )
        for (m, estimate) in zip(sizes, profile):
            self.assertLessEqual(estimate['mean'], 1 / m + 3 * estimate['stderr'])
            self.assertLessEqual(
                abs(m * estimate['mean'] - 0.5), 4 * m * estimate['stderr'] + 0.05,
            )
        (first, last) = (profile[0], profile[-1])
        spread = 3 * np.hypot(first['stderr'], last['stderr'])
        self.assertGreater(first['mean'] - last['mean'], -spread)
        self.assertGreater(first['mean'], 2 * last['mean'] - spread)
    def test_pointwise(self):
        """Test rsk_stab.stability.empirical.estimate_pointwise_hypothesis_stability of ridge"""
        estimate = estimate_pointwise_hypothesis_stability(
            make_recipe('ridge'), self.linear, 10, SQUARED, trials=10,
        )
        self.assertEqual(estimate['mode'], 'pointwise')
        self.assertGreater(estimate['mean'], 0.0)
        self.assertTrue(np.isfinite(estimate['stderr']))
    def test_profile(self):
        """Test rsk_stab.stability.empirical.estimate_stability_profile sizes"""
        profile = estimate_stability_profile(
            make_recipe('constant'), self.blobs, [4, 8, 16], ZERO_ONE, trials=5,
        )
        self.assertEqual([_['m'] for _ in profile], [4, 8, 16])
    @params(
        {'m': 1},
        {'trials': 0},
        {'policy': 'fixed-i', 'index': 10},
        {'policy': 'fixed-i', 'index': -1},
        {'policy': 'sometimes-i'},
        {'mode': 'uniform'},
    )
    def test_invalid(self, options):
        """Test rsk_stab.stability.empirical.estimate_stability rejects bad arguments"""
        options = dict({'m': 10}, **options)
        m = options.pop('m')
        self.assertRaises(
            ValueError,
            estimate_stability, make_recipe('constant'), self.blobs, m, ZERO_ONE,
            **options,
        )

class TestCompare(TestCase):
    """Tests for rsk_stab.stability.empirical.compare_to_bound."""
    def test_satisfied(self):
        """Test rsk_stab.stability.empirical.compare_to_bound within the bound"""
        bound = BoundResult({'value': 0.1, 'formula': 'k/m', 'loss': 'classification01'})
        record = compare_to_bound(make_estimate(0.05, 0.01), bound)
        self.assertEqual(record['status'], 'satisfied')
        self.assertIs(record['satisfied'], True)
        self.assertAlmostEqual(record['slack'], 0.05)
        self.assertEqual(record['formula'], 'k/m')
    def test_tolerance(self):
        """Test rsk_stab.stability.empirical.compare_to_bound allows three standard errors"""
        bound = BoundResult({'value': 0.1, 'formula': 'k/m'})
        record = compare_to_bound(make_estimate(0.125, 0.01), bound)
        self.assertEqual(record['status'], 'satisfied')
        self.assertLess(record['slack'], 0.0)
    def test_violated(self):
        """Test rsk_stab.stability.empirical.compare_to_bound above the bound"""
        bound = BoundResult({'value': 0.1, 'formula': 'k/m'})
        record = compare_to_bound(make_estimate(0.2, 0.01), bound)
        self.assertEqual(record['status'], 'violated')
        self.assertIs(record['satisfied'], False)
    def test_unknown(self):
        """Test rsk_stab.stability.empirical.compare_to_bound of an unknown bound"""
        bound = BoundResult({'value': None, 'formula': 'unknown'})
        record = compare_to_bound(make_estimate(0.2, 0.01), bound)
        self.assertEqual(record['status'], 'not-applicable')
        self.assertIsNone(record['satisfied'])
        self.assertIsNone(record['slack'])
    def test_mismatch(self):
        """Test rsk_stab.stability.empirical.compare_to_bound rejects another loss"""
        bound = BoundResult({'value': 0.1, 'formula': 'k/m', 'loss': 'classification01'})
        with self.assertRaises(LossKindMismatchError) as ctx:
            compare_to_bound(make_estimate(0.05, 0.01, 'squared'), bound)
        self.assertEqual(ctx.exception.estimate_loss, 'squared')
        self.assertEqual(ctx.exception.bound_loss, 'classification01')
