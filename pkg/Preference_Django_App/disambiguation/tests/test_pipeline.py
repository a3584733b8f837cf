from dataclasses import replace

from django.test import SimpleTestCase

from disambiguation.corpus import SkeletalTree
from disambiguation.evaluation import cross_validate, random_baseline
from disambiguation.exceptions import FactorsError, PreferenceScalingError
from disambiguation.pipeline import (
    RULE_FUNCTION, PipelineConfig, TrainedPipeline, alone_configs, colloc_function_name,
)
from disambiguation.synth import SynthConfig, generate
from disambiguation.train import ScalingFactors

from .factories import TempDirMixin, binary_sentence, make_corpus


def alone(statistic, **kwargs):
    return PipelineConfig(method='alone', colloc_statistics=(statistic,), base_functions=(),
                          alone_function=colloc_function_name(statistic), **kwargs)


class PipelineConfigTests(SimpleTestCase):
    def test_validation(self):
        with self.assertRaises(PreferenceScalingError):
            PipelineConfig(method='simulated-annealing')
        with self.assertRaises(PreferenceScalingError):
            PipelineConfig(colloc_statistics=('pointwise',))
        with self.assertRaises(FactorsError):
            PipelineConfig(method='hand')
        with self.assertRaises(PreferenceScalingError):
            PipelineConfig(method='alone')

    def test_labels(self):
        self.assertEqual(PipelineConfig(method='lsq').label, 'Least squares')
        self.assertEqual(PipelineConfig(method='lsq', name='LSQ with MI').label, 'LSQ with MI')
        self.assertEqual(alone('chi').label, 'SemColl:chi')

    def test_alone_configs(self):
        configs = alone_configs(['F1', 'F2'], PipelineConfig(method='lsq'))
        self.assertEqual([(c.method, c.alone_function, c.label) for c in configs],
                         [('alone', 'F1', 'F1'), ('alone', 'F2', 'F2')])


class FitTests(TempDirMixin, SimpleTestCase):
    def setUp(self):
        super().setUp()
        self.corpus = generate(SynthConfig(n_sentences=60, n_functions=3, noise_scale=0.5, seed=11))

    def test_derived_functions_are_appended(self):
        config = PipelineConfig(method='lsq', colloc_statistics=('mean_distance', 'mutual_info'), rule_cost=True)
        trained = config.fit(self.corpus)
        prepared = trained.prepare(self.corpus)
        self.assertEqual(prepared.function_names,
                         ('F1', 'F2', 'F3', 'SemColl:mean_distance', 'SemColl:mutual_info', RULE_FUNCTION))
        self.assertEqual(trained.factors.names, prepared.function_names)
        report = trained.evaluate(self.corpus)
        self.assertEqual(report.name, 'Least squares')
        self.assertEqual(report.n_sentences, 60)

    def test_rule_cost_is_log_probability(self):
        trained = PipelineConfig(method='lsq', rule_cost=True).fit(self.corpus)
        prepared = trained.prepare(self.corpus)
        for s in prepared.sentences:
            for a in s.analyses:
                self.assertLessEqual(a.feature(RULE_FUNCTION), 0.0)

    def test_hill_climbing_records_its_steps(self):
        trained = PipelineConfig(method='lsq+hillclimb').fit(self.corpus)
        counts = [trained.initial_correct] + [step.correct for step in trained.steps]
        self.assertEqual(counts, sorted(set(counts)))
        self.assertEqual(trained.evaluate(self.corpus).correct_strict, counts[-1])

    def test_hand_factors(self):
        factors = ScalingFactors(('F1', 'F2', 'F3'), (1.0, 0.0, -1.0))
        trained = PipelineConfig(method='hand', hand_factors=factors).fit(self.corpus)
        self.assertEqual(trained.factors, factors)
        with self.assertRaises(FactorsError):
            PipelineConfig(method='hand', hand_factors=ScalingFactors(('F1',), (1.0,))).fit(self.corpus)

    def test_alone_unknown_function(self):
        with self.assertRaises(FactorsError):
            PipelineConfig(method='alone', alone_function='F9').fit(self.corpus)

    def test_base_functions_restriction(self):
        trained = PipelineConfig(method='lsq', base_functions=('F2',)).fit(self.corpus)
        self.assertEqual(trained.factors.names, ('F2',))
        with self.assertRaises(FactorsError):
            PipelineConfig(method='lsq', base_functions=('F7',)).fit(self.corpus)

    def test_random_method_is_baseline(self):
        trained = PipelineConfig(method='random').fit(self.corpus)
        self.assertIsNone(trained.factors)
        self.assertEqual(trained.evaluate(self.corpus).correct_fractional,
                         random_baseline(self.corpus).correct_fractional)

    def test_saved_models_reproduce_features(self):
        config = PipelineConfig(method='lsq', colloc_statistics=('chi',), rule_cost=True)
        trained = config.fit(self.corpus)
        path = trained.save_models(self.tmp / 'models.json')
        loaded = TrainedPipeline.load_models(path, PipelineConfig(method='lsq'))
        self.assertEqual(loaded.prepare(self.corpus), trained.prepare(self.corpus))
        with self.assertRaises(PreferenceScalingError):
            TrainedPipeline.load_models(self.tmp / 'absent.json', config)

    def test_class_map_applies_to_triples(self):
        corpus = generate(SynthConfig(n_sentences=30, n_classes=4, seed=2))
        trained = alone('mutual_info').fit(corpus)
        self.assertTrue(all(t.h1.startswith('cc_Class') for t in trained.colloc_models['mutual_info'].table))


class OrderingTests(SimpleTestCase):
    """Random <= normalized <= least squares <= hill climbing on planted-weight corpora."""

    def test_training_set_ordering(self):
        ordered, random_worst = 0, 0
        for seed in range(10):
            corpus = generate(SynthConfig(n_sentences=1000, n_functions=20, noise_scale=2.0, seed=seed))
            counts = {}
            for method in ('random', 'normalized', 'lsq', 'lsq+hillclimb'):
                counts[method] = PipelineConfig(method=method).fit(corpus).evaluate(corpus).correct_strict
            ordering = [counts[m] for m in ('random', 'normalized', 'lsq', 'lsq+hillclimb')]
            ordered += ordering == sorted(ordering)
            random_worst += counts['random'] < min(counts['normalized'], counts['lsq'], counts['lsq+hillclimb'])
        self.assertGreaterEqual(ordered, 8)
        self.assertEqual(random_worst, 10)


class CollocationDiscriminationTests(SimpleTestCase):
    def test_mean_distance_beats_mutual_information_held_out(self):
        wins = 0
        for seed in range(10):
            corpus = generate(SynthConfig(n_sentences=300, triple_signal=0.95, seed=seed))
            md = cross_validate(corpus, 5, alone('mean_distance'), seed=seed).aggregate
            mi = cross_validate(corpus, 5, alone('mutual_info'), seed=seed).aggregate
            wins += md.correct_fractional > mi.correct_fractional
        self.assertGreaterEqual(wins, 8)

    def test_no_signal_means_random_choice(self):
        corpus = generate(SynthConfig(n_sentences=100, triple_signal=0.0, seed=4))
        md = cross_validate(corpus, 5, alone('mean_distance')).aggregate
        self.assertAlmostEqual(md.correct_fractional, random_baseline(corpus).correct_fractional, places=9)


class CrossValidationTests(SimpleTestCase):
    config = PipelineConfig(method='lsq', colloc_statistics=('mean_distance',), rule_cost=True)

    def setUp(self):
        self.corpus = generate(SynthConfig(n_sentences=50, n_functions=3, noise_scale=1.0, seed=8))

    def test_folds_cover_corpus(self):
        result = cross_validate(self.corpus, 5, self.config, seed=1)
        self.assertEqual([f.n_sentences for f in result.folds], [10] * 5)
        self.assertEqual(list(result.aggregate.per_sentence), self.corpus.sentence_ids)
        self.assertEqual(result.aggregate.correct_strict, sum(f.correct_strict for f in result.folds))
        self.assertEqual(result.aggregate.name, 'Least squares')

    def test_deterministic(self):
        first = cross_validate(self.corpus, 5, self.config, seed=3)
        second = cross_validate(self.corpus, 5, self.config, seed=3, workers=2)
        self.assertEqual(first.assignment, second.assignment)
        self.assertEqual(first.aggregate.per_sentence, second.aggregate.per_sentence)

    def test_held_out_gold_never_reaches_its_fold_model(self):
        before = cross_validate(self.corpus, 5, self.config, seed=2)
        target = next(s for s in self.corpus.sentences if before.assignment[s.id] == 0)
        wrong = next(a for a in target.analyses if a.span_set != target.gold.spans)
        perturbed = replace(target, gold=SkeletalTree(wrong.spans))
        corpus = replace(self.corpus, sentences=tuple(perturbed if s.id == target.id else s
                                                      for s in self.corpus.sentences))

        after = cross_validate(corpus, 5, self.config, seed=2)
        self.assertEqual(after.assignment, before.assignment)
        self.assertEqual(after.trained[0].to_dict(), before.trained[0].to_dict())
        untouched = [sid for sid, fold in before.assignment.items() if fold == 0 and sid != target.id]
        for sid in untouched:
            self.assertEqual(after.folds[0].per_sentence[sid], before.folds[0].per_sentence[sid])
        self.assertNotEqual(after.trained[1].to_dict(), before.trained[1].to_dict())

    def test_rule_cost_without_rules(self):
        corpus = make_corpus(['f'], [binary_sentence(f's{i}', {'f': 1}, {'f': 0}) for i in range(6)])
        with self.assertLogs('disambiguation.colloc', 'WARNING'):
            result = cross_validate(corpus, 3, PipelineConfig(method='lsq', rule_cost=True), seed=0)
        self.assertEqual(result.aggregate.n_sentences, 6)
        prepared = result.trained[0].prepare(corpus)
        self.assertTrue(all(a.feature(RULE_FUNCTION) == 0 for s in prepared.sentences for a in s.analyses))
