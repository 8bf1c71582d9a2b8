### SPDX-License-Identifier: GPL-2.0-or-later

"""Test cases for rsk_stab.ensembles.bagging"""

from unittest import TestCase
from nose2.tools import params

import numpy as np
from scipy.stats import pearsonr

from rsk_stab.core.parallel import TrainingError
from rsk_stab.core.resample import (
    ResampleError,
    ResampleIndices,
    bootstrap_indices,
)
from rsk_stab.core.seed import Seed
from rsk_stab.core.synthetic import (
    BlobsSource,
    LinearSource,
)
from rsk_stab.learners.learner import train
from rsk_stab.ensembles.bagging import (
    train_members,
    bootstrap_replicates,
    subsample_replicates,
    bagging_train,
    subbagging_train,
)

from .. import make_line

KNN = {'algorithm': 'knn', 'k': 1}

class TestReplicates(TestCase):
    """Tests for rsk_stab.ensembles.bagging replicates."""
    def test_bootstrap(self):
        """Test rsk_stab.ensembles.bagging.bootstrap_replicates substreams count from one"""
        replicates = bootstrap_replicates(10, 3, Seed(4))
        for (t, replicate) in enumerate(replicates, start=1):
            expect = bootstrap_indices(10, Seed(4).derive('bootstrap', t))
            self.assertEqual(replicate.indices.tolist(), expect.indices.tolist())
    def test_prefix(self):
        """Test rsk_stab.ensembles.bagging replicates do not depend on T"""
        short = subsample_replicates(10, 2, 5, Seed(4))
        long = subsample_replicates(10, 5, 5, Seed(4))
        self.assertEqual(
            [_.indices.tolist() for _ in short],
            [_.indices.tolist() for _ in long[:2]],
        )

class TestTrainMembers(TestCase):
    """Tests for rsk_stab.ensembles.bagging.train_members."""
    def test_specs(self):
        """Test rsk_stab.ensembles.bagging.train_members one spec per replicate"""
        data = make_line(4)
        replicates = [ResampleIndices(np.array([0, 1]), False)] * 2
        members = train_members(
            [{'algorithm': 'constant', 'value': 1.0}, {'algorithm': 'mean'}],
            data, replicates,
        )
        self.assertEqual([_.algorithm for _ in members], ['constant', 'mean'])
        self.assertEqual(members[1].value, 0.0)
    def test_count(self):
        """Test rsk_stab.ensembles.bagging.train_members rejects mismatched specs"""
        replicates = [ResampleIndices(np.array([0, 1]), False)] * 2
        self.assertRaises(ValueError, train_members, [KNN], make_line(4), replicates)
    def test_failure(self):
        """Test rsk_stab.ensembles.bagging.train_members names a failing member"""
        data = make_line(4)
        replicates = [
            ResampleIndices(np.array([0, 1]), False),
            ResampleIndices(np.array([2, 2]), False),
        ]
        spec = {'algorithm': 'least_squares', 'intercept': True}
        with self.assertRaises(TrainingError) as ctx:
            train_members(spec, data, replicates, threads=1)
        self.assertEqual((ctx.exception.context, ctx.exception.index), ('member', 1))

class TestBagging(TestCase):
    """Tests for rsk_stab.ensembles.bagging ensembles."""
    def test_bagging(self):
        """Test rsk_stab.ensembles.bagging.bagging_train members and aggregation"""
        data = make_line(12)
        model = bagging_train(KNN, data, 5, Seed(2))
        self.assertEqual((model.T, model.aggregation), (5, 'mean'))
        self.assertTrue(all(_.with_replacement for _ in model.member_indices))
        self.assertTrue(all(_.m == 12 for _ in model.members))
    def test_plurality(self):
        """Test rsk_stab.ensembles.bagging classification ensembles vote"""
        data = BlobsSource(2, 3.0).sample(20, Seed(1))
        model = bagging_train(KNN, data, 5, Seed(2))
        self.assertEqual(model.aggregation, 'plurality')
        self.assertTrue(np.all(np.isin(model.predict_all(data.X), (-1.0, 1.0))))
    def test_reproducible(self):
        """Test rsk_stab.ensembles.bagging ensembles depend only on the seed"""
        data = make_line(12)
        X = np.linspace(0.0, 11.0, 23).reshape(-1, 1)
        self.assertTrue(np.array_equal(
            bagging_train(KNN, data, 7, Seed(3), threads=1).predict_all(X),
            bagging_train(KNN, data, 7, Seed(3), threads=4).predict_all(X),
        ))
    def test_subbagging(self):
        """Test rsk_stab.ensembles.bagging.subbagging_train trains on subsamples"""
        model = subbagging_train(KNN, make_line(12), 4, 5, Seed(2))
        self.assertTrue(all(_.m == 5 for _ in model.members))
        self.assertTrue(all(
            np.unique(_.indices).shape == (5,) for _ in model.member_indices
        ))
    @params(0, 13)
    def test_subbagging_size(self, p):
        """Test rsk_stab.ensembles.bagging.subbagging_train rejects p outside [1, m]"""
        self.assertRaises(ResampleError, subbagging_train, KNN, make_line(12), 4, p, Seed(2))
    def test_count(self):
        """Test rsk_stab.ensembles.bagging ensembles require T of at least 1"""
        self.assertRaises(ValueError, bagging_train, KNN, make_line(12), 0, Seed(2))
    def test_variance(self):
        """Test rsk_stab.ensembles.bagging reduces the variance of 1-NN"""
        source = LinearSource(1, 1.0, Seed(0))
        x = np.zeros((1, 1))
        single = []
        bagged = []
        for s in range(50):
            data = source.sample(30, Seed(s))
            single.append(train(KNN, data).predict_all(x)[0])
            bagged.append(bagging_train(KNN, data, 25, Seed(1000 + s)).predict_all(x)[0])
        single = np.array(single)
        bagged = np.array(bagged)
        # paired test of equal variances: Var(A) > Var(B) iff corr(A + B, A - B) > 0
        result = pearsonr(single + bagged, single - bagged, alternative='greater')
        self.assertLess(result.pvalue, 0.01)
