### SPDX-License-Identifier: GPL-2.0-or-later

"""Test cases for rsk_stab.ensembles.stacking"""

from unittest import TestCase
from nose2.tools import params

import numpy as np

from rsk_stab.core.resample import ResampleError
from rsk_stab.core.seed import Seed
from rsk_stab.core.synthetic import gen_synthetic
from rsk_stab.ensembles.ensemble import meta_features
from rsk_stab.ensembles.stacking import (
    meta_dataset,
    fold_assignment,
    out_of_fold_features,
    stacking_train,
    sampling_replicates,
    stacked_sampling_train,
)

from .. import make_line

BASES = [
    {'algorithm': 'knn', 'k': 1},
    {'algorithm': 'knn', 'k': 3},
]
RECIPE = {
    'bases': BASES,
    'combiner': {'algorithm': 'ridge', 'lambda': 0.1},
}

def make_data():
    """Return a small regression dataset."""
    return gen_synthetic({'kind': 'linear', 'm': 16, 'd': 2, 'noise': 0.3}, 5)

class TestFolds(TestCase):
    """Tests for rsk_stab.ensembles.stacking folds."""
    @params((10, 3), (7, 7), (5, 2))
    def test_balanced(self, m, folds):
        """Test rsk_stab.ensembles.stacking.fold_assignment is balanced"""
        counts = np.bincount(fold_assignment(m, folds, Seed(1)), minlength=folds)
        self.assertLessEqual(counts.max() - counts.min(), 1)
        self.assertEqual(counts.sum(), m)
    @params(1, 11)
    def test_count(self, folds):
        """Test rsk_stab.ensembles.stacking.fold_assignment rejects folds outside [2, m]"""
        self.assertRaises(ResampleError, fold_assignment, 10, folds, Seed(1))
    def test_out_of_fold(self):
        """Test rsk_stab.ensembles.stacking.out_of_fold_features of a constant base"""
        data = make_line(6)
        features = out_of_fold_features(
            [{'algorithm': 'constant', 'value': 2.0}, {'algorithm': 'mean'}],
            data, 3, Seed(1),
        )
        self.assertEqual(features.shape, (6, 2))
        self.assertTrue(np.all(features[:, 0] == 2.0))
        assignment = fold_assignment(6, 3, Seed(1))
        for i in range(6):
            others = data.y[assignment != assignment[i]]
            self.assertAlmostEqual(features[i, 1], float(np.mean(others)))

class TestStacking(TestCase):
    """Tests for rsk_stab.ensembles.stacking classical stacking."""
    def test_resubstitution(self):
        """Test rsk_stab.ensembles.stacking.stacking_train combines member outputs"""
        data = make_data()
        model = stacking_train(RECIPE, data, Seed(1))
        self.assertEqual((model.T, model.aggregation, model.combiner.d), (2, 'combiner', 2))
        outputs = meta_features(model.members, data.X)
        self.assertTrue(np.allclose(
            model.score_all(data.X), model.combiner.predict_all(outputs),
        ))
        self.assertTrue(all(_.m == data.m for _ in model.members))
    def test_meta_dataset(self):
        """Test rsk_stab.ensembles.stacking.meta_dataset keeps labels and task"""
        data = make_line(3)
        meta = meta_dataset(data, np.ones((3, 2)))
        self.assertEqual((meta.m, meta.d, meta.task), (3, 2, 'regression'))
        self.assertEqual(meta.y.tolist(), data.y.tolist())
    def test_out_of_fold_combiner(self):
        """Test rsk_stab.ensembles.stacking out-of-fold meta-features change the combiner"""
        data = make_data()
        resubstituted = stacking_train(RECIPE, data, Seed(1))
        recipe = dict(RECIPE, meta_features='out-of-fold', folds=4)
        held_out = stacking_train(recipe, data, Seed(1))
        self.assertFalse(np.allclose(resubstituted.combiner.coef, held_out.combiner.coef))
        # the members themselves are trained on the full dataset either way
        self.assertTrue(np.array_equal(
            meta_features(resubstituted.members, data.X),
            meta_features(held_out.members, data.X),
        ))

class TestSamplingStacking(TestCase):
    """Tests for rsk_stab.ensembles.stacking bag-stacking and dag-stacking."""
    def test_bootstrap(self):
        """Test rsk_stab.ensembles.stacking bag-stacking trains on bootstrap replicates"""
        data = make_data()
        model = stacked_sampling_train(dict(RECIPE, sampling='bootstrap'), data, Seed(1))
        self.assertTrue(all(_.with_replacement for _ in model.member_indices))
        self.assertEqual(model.combiner.d, 2)
    def test_subsample(self):
        """Test rsk_stab.ensembles.stacking dag-stacking trains on subsamples"""
        data = make_data()
        model = stacked_sampling_train(dict(RECIPE, sampling='subsample', p=6), data, Seed(1))
        self.assertTrue(all(_.m == 6 for _ in model.members))
    @params(None, 0, 17)
    def test_subsample_size(self, p):
        """Test rsk_stab.ensembles.stacking.sampling_replicates rejects p outside [1, m]"""
        recipe = dict(RECIPE, sampling='subsample', p=p)
        self.assertRaises(ResampleError, sampling_replicates, recipe, 16, Seed(1))
    def test_sampling(self):
        """Test rsk_stab.ensembles.stacking.sampling_replicates rejects unknown sampling"""
        recipe = dict(RECIPE, sampling='jackknife')
        self.assertRaises(ValueError, sampling_replicates, recipe, 16, Seed(1))
