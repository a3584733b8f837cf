from django.test import SimpleTestCase

from disambiguation.corpus import Analysis
from disambiguation.goldscore import (
    ScoreWeights, best_analyses, exact_match, is_correct, relativize, training_score,
)

from .factories import make_analysis, make_sentence, spans, worked_example_sentence

OVERLAP_ONLY = ScoreWeights(1, 0, 0)


class TrainingScoreTests(SimpleTestCase):
    def setUp(self):
        shared = [(0, 9), (1, 2), (2, 3), (3, 4), (4, 5)]
        self.Q = shared + [(5, 6), (6, 7)]
        self.T = shared + [(7, 8), (8, 9), (1, 3)]

    def test_identity(self):
        T = [(0, 4), (0, 2), (2, 4), (3, 4)]
        self.assertEqual(training_score(T, T, ScoreWeights(1, 10, 0)), 4)

    def test_direct_formula(self):
        self.assertEqual(training_score(self.Q, self.T, ScoreWeights(1, 10, 0)), -15)
        self.assertEqual(training_score(self.Q, self.T, ScoreWeights(1, 10, 1)), -18)

    def test_accepts_constituents_and_trees(self):
        sentence = worked_example_sentence()
        self.assertEqual(training_score(sentence.analyses[2].spans, sentence.gold, OVERLAP_ONLY), 4)

    def test_default_weights(self):
        self.assertEqual(ScoreWeights.default(), ScoreWeights(1, 10, 0))

    def test_negative_weight_rejected(self):
        with self.assertRaises(ValueError):
            ScoreWeights(1, -1, 0)


class RelativizeTests(SimpleTestCase):
    def test_worked_example(self):
        rel = relativize(worked_example_sentence(), OVERLAP_ONLY, ['phi', 'f1', 'f2'])
        self.assertEqual([rel.g[a] for a in ('q1', 'q2', 'q3')], [0, 0, -6])
        self.assertEqual([rel.z[a]['phi'] for a in ('q1', 'q2', 'q3')], [0, 0, -6])
        self.assertEqual([rel.z[a]['f1'] for a in ('q1', 'q2', 'q3')], [1, -1, -5])
        self.assertEqual([rel.z[a]['f2'] for a in ('q1', 'q2', 'q3')], [-3, 3, 5])
        self.assertEqual(rel.best_set, {'q1', 'q2'})

    def test_single_analysis_relativises_to_zero(self):
        s = make_sentence('s', 3, ((0, 3),), (make_analysis('a', ((0, 3), (0, 1)), {'f': 7.5}),))
        rel = relativize(s, ScoreWeights(), ['f'])
        self.assertEqual(rel.g['a'], 0)
        self.assertEqual(rel.z['a']['f'], 0)

    def test_identical_analyses_relativise_to_zero(self):
        s = make_sentence('s', 3, ((0, 3),), (
            make_analysis('a', ((0, 2),), {'f': 2.0}),
            make_analysis('b', ((0, 2),), {'f': 2.0}),
        ))
        rel = relativize(s, ScoreWeights(), ['f'])
        self.assertEqual(set(rel.g.values()), {0})
        self.assertEqual({z['f'] for z in rel.z.values()}, {0})

    def test_max_g_is_zero_and_best_means_vanish(self):
        s = make_sentence('s', 5, ((0, 5), (0, 2)), (
            make_analysis('a', ((0, 5), (0, 2)), {'f': 1.0, 'g': -3.0}),
            make_analysis('b', ((0, 5), (0, 3)), {'f': 4.0, 'g': 2.0}),
            make_analysis('c', ((0, 5), (0, 2)), {'f': 2.0, 'g': 0.5}),
        ))
        rel = relativize(s, ScoreWeights(), ['f', 'g'])
        self.assertEqual(max(rel.g.values()), 0)
        for name in ('f', 'g'):
            self.assertAlmostEqual(sum(rel.z[a][name] for a in rel.best_set) / len(rel.best_set), 0, places=9)


class CorrectnessTests(SimpleTestCase):
    def test_exact_match_ignores_labels(self):
        gold = ((0, 7), (1, 2), (3, 4), (4, 7), (5, 7))
        s = make_sentence('s', 7, gold, ())
        relabelled = Analysis('a', spans(*gold, label='A'))
        self.assertTrue(exact_match(relabelled, s.gold))
        self.assertFalse(exact_match(make_analysis('b', gold[:-1]), s.gold))

    def test_best_analyses(self):
        sentence = worked_example_sentence()
        self.assertEqual(best_analyses(sentence, OVERLAP_ONLY), {'q1', 'q2'})
        single = make_sentence('one', 3, ((0, 3),), (make_analysis('only', ((0, 3),)),))
        self.assertEqual(best_analyses(single), {'only'})

    def test_best_criterion(self):
        s = make_sentence('s', 4, ((0, 4), (0, 2), (2, 4)), (
            make_analysis('near', ((0, 4), (0, 2))),
            make_analysis('far', ((0, 4), (1, 3))),
        ))
        near, far = s.analyses
        self.assertFalse(is_correct(near, s))
        self.assertTrue(is_correct(near, s, 'best'))
        self.assertFalse(is_correct(far, s, 'best'))
        with self.assertRaises(ValueError):
            is_correct(near, s, 'approximate')
