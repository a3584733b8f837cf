import json
from contextlib import redirect_stderr, redirect_stdout
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from disambiguation import cli
from disambiguation.corpus import dump_corpus, load_corpus
from disambiguation.synth import SynthConfig, generate

from .factories import TempDirMixin, make_analysis, make_corpus, make_sentence


def run_command(name, *args):
    out = StringIO()
    call_command(name, *[str(a) for a in args], stdout=out)
    return out.getvalue()


class CommandTestCase(TempDirMixin, SimpleTestCase):
    def setUp(self):
        super().setUp()
        self.corpus_path = dump_corpus(
            generate(SynthConfig(n_sentences=30, n_functions=3, noise_scale=0.5, seed=6)),
            self.tmp / 'corpus.jsonl',
        )


class SynthTrainEvaluateTests(CommandTestCase):
    def test_pipeline_end_to_end(self):
        corpus, planted = self.tmp / 'synthetic.jsonl', self.tmp / 'planted.json'
        record = json.loads(run_command('synth', '-o', corpus, '--n-sentences', 40, '--n-functions', 3,
                                        '--seed', 2, '--planted-out', planted, '--machine'))
        self.assertEqual(record['sentences'], 40)
        self.assertEqual(len(load_corpus(corpus)), 40)

        factors, models = self.tmp / 'factors.json', self.tmp / 'models.json'
        output = run_command('train', corpus, '-o', factors, '--method', 'lsq', '--colloc', 'mean_distance',
                             '--models-out', models, '--matrix-out', self.tmp / 'matrix.tsv')
        self.assertIn('SemColl:mean_distance', output)
        self.assertIn('Factors written to', output)
        self.assertTrue((self.tmp / 'matrix.tsv').exists())

        trained = json.loads(run_command('evaluate', corpus, factors, '--models', models, '--machine',
                                         '--results-out', self.tmp / 'lsq.results'))
        self.assertEqual(trained['n_sentences'], 40)
        exact = json.loads(run_command('evaluate', corpus, planted, '--machine',
                                       '--results-out', self.tmp / 'planted.results'))
        self.assertEqual(exact['percentage'], 100.0)

        compared = json.loads(run_command('compare', self.tmp / 'planted.results', self.tmp / 'lsq.results',
                                          '--machine'))
        self.assertEqual(compared['minus'], 0)

    def test_synth_settings(self):
        config = self.tmp / 'synth.cfg'
        config.write_text('n_sentences = 7\nmax_analyses = 3\n')
        out = self.tmp / 'small.jsonl'
        run_command('synth', '-o', out, '--config', config, '--set', 'planted_weights=1,-1', '--n-functions', 2)
        corpus = load_corpus(out)
        self.assertEqual(len(corpus), 7)
        self.assertEqual(corpus.function_names, ('F1', 'F2'))
        with self.assertRaises(CommandError) as ctx:
            run_command('synth', '-o', out, '--set', 'triple_signal=2')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_train_rejects_random(self):
        with self.assertRaises(CommandError) as ctx:
            run_command('train', self.corpus_path, '--method', 'random')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_evaluate_random_baseline(self):
        output = run_command('evaluate', self.corpus_path, '--random')
        self.assertIn('(Random baseline)', output)
        with self.assertRaises(CommandError):
            run_command('evaluate', self.corpus_path)

    def test_hill_climbing_summary(self):
        output = run_command('train', self.corpus_path, '-o', self.tmp / 'f.json', '--max-iters', 200)
        self.assertIn('Factors written to', output)


class CompareTests(TempDirMixin, SimpleTestCase):
    def write(self, name, values):
        path = self.tmp / name
        path.write_text('sentence_id\tstrict\tfractional\n' +
                        ''.join(f's{i}\t{v}\t{v}\n' for i, v in enumerate(values)))
        return path

    def test_reported_comparison(self):
        a = self.write('a.results', [1] * 154 + [0] * 322 + [1] * 50)
        b = self.write('b.results', [0] * 154 + [1] * 322 + [1] * 50)
        output = run_command('compare', a, b)
        self.assertIn('+154 −322 #SDs 7.7', output)
        self.assertIn('significant', output)

    def test_mismatched_sentences(self):
        a = self.write('a.results', [1, 0])
        b = self.write('b.results', [1, 0, 1])
        with self.assertRaises(CommandError) as ctx:
            run_command('compare', a, b)
        self.assertEqual(ctx.exception.returncode, 2)


class CrossvalTests(CommandTestCase):
    def test_methods_with_sign_tests(self):
        record = json.loads(run_command('crossval', self.corpus_path, '-k', 3, '--methods', 'random,lsq',
                                        '--results-dir', self.tmp / 'results', '--chart', self.tmp / 'chart.html',
                                        '--machine'))
        self.assertEqual(record['fold_sizes'], [10, 10, 10])
        self.assertEqual([r['name'] for r in record['reports']], ['(Random baseline)', 'Least squares'])
        self.assertEqual(len(record['sign_tests']), 1)
        self.assertTrue((self.tmp / 'results' / 'least_squares.results').exists())
        self.assertTrue((self.tmp / 'chart.html').exists())

    def test_functions_alone(self):
        output = run_command('crossval', self.corpus_path, '-k', 3, '--alone', '--colloc', 'chi')
        for name in ('F1', 'F2', 'F3', 'SemColl:chi'):
            self.assertIn(name, output)
        self.assertIn('Fold sizes: 10, 10, 10', output)

    def test_trajectory_chart(self):
        run_command('crossval', self.corpus_path, '-k', 3, '--methods', 'lsq+hillclimb',
                    '--trajectory-chart', self.tmp / 'climb.html')
        self.assertTrue((self.tmp / 'climb.html').exists())
        with self.assertRaises(CommandError):
            run_command('crossval', self.corpus_path, '-k', 3, '--methods', 'lsq',
                        '--trajectory-chart', self.tmp / 'none.html')

    def test_too_many_folds(self):
        with self.assertRaises(CommandError) as ctx:
            run_command('crossval', self.corpus_path, '-k', 31)
        self.assertEqual(ctx.exception.returncode, 2)


class InspectionCommandTests(CommandTestCase):
    def test_colloc_stats(self):
        rows = json.loads(run_command('colloc_stats', self.corpus_path, '--statistics', 'mean_distance,chi',
                                      '--top', 5, '--machine', '-o', self.tmp / 'colloc.tsv'))
        self.assertEqual(len(rows), 5)
        self.assertEqual(set(rows[0]), {'h1', 'r', 'h2', 'joint', 'mean_distance', 'chi'})
        self.assertTrue((self.tmp / 'colloc.tsv').exists())
        with self.assertRaises(CommandError):
            run_command('colloc_stats', self.corpus_path, '--statistics', 'dice')

    def test_score_marks_correct_analyses(self):
        factors = self.tmp / 'factors.json'
        factors.write_text('{"F1": 1.0, "F2": 0.0, "F3": -1.0}')
        records = json.loads(run_command('score', self.corpus_path, factors, '--top', 2, '--machine'))
        self.assertEqual(len(records), 30)
        self.assertTrue(all(len(r['ranking']) <= 2 for r in records))
        output = run_command('score', self.corpus_path, factors)
        self.assertIn('*', output)

    def test_validate(self):
        self.assertIn('no violations', run_command('validate', self.corpus_path))
        crossing = make_sentence('bad', 6, ((0, 3), (2, 5)), (make_analysis('a', ((0, 3),)),))
        path = dump_corpus(make_corpus([], [crossing]), self.tmp / 'bad.jsonl')
        with self.assertRaises(CommandError) as ctx:
            run_command('validate', path)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_convert(self):
        trees = self.tmp / 'trees.tsv'
        trees.write_text('dinner\t(P do (A I) get (A dinner) (P on (A this flight)))\n')
        run_command('convert', trees, '-o', self.tmp / 'gold.jsonl')
        record = json.loads((self.tmp / 'gold.jsonl').read_text().splitlines()[0])
        self.assertEqual(record['tokens'][:3], ['do', 'I', 'get'])
        self.assertEqual(len(record['gold']), 5)

    def test_convert_into_corpus(self):
        corpus = load_corpus(self.corpus_path)
        first = corpus.sentences[0]
        trees = self.tmp / 'trees.tsv'
        trees.write_text(f"{first.id}\t(P {' '.join(first.tokens)})\n")
        run_command('convert', trees, '--corpus', self.corpus_path, '-o', self.tmp / 'merged.jsonl')
        merged = load_corpus(self.tmp / 'merged.jsonl')
        self.assertEqual(merged.sentences[0].gold.spans, {(0, len(first.tokens))})
        self.assertEqual(merged.sentences[1], corpus.sentences[1])

        trees.write_text(f"{first.id}\t(P other words)\n")
        with self.assertRaises(CommandError) as ctx:
            run_command('convert', trees, '--corpus', self.corpus_path)
        self.assertEqual(ctx.exception.returncode, 2)


class CliTests(CommandTestCase):
    def run_cli(self, *argv):
        out, err = StringIO(), StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = cli.run([str(a) for a in argv])
        return code, out.getvalue(), err.getvalue()

    def test_unknown_subcommand(self):
        code, _, err = self.run_cli('frobnicate')
        self.assertEqual(code, 1)
        self.assertIn('unknown subcommand', err)

    def test_missing_factors_file_is_a_data_error(self):
        code, _, err = self.run_cli('evaluate', self.corpus_path, self.tmp / 'absent.json')
        self.assertEqual(code, 2)
        self.assertIn('not found', err)

    def test_factors_missing_a_declared_function(self):
        factors = self.tmp / 'partial.json'
        factors.write_text('{"F1": 1.0, "F2": 0.5}')
        code, _, err = self.run_cli('evaluate', self.corpus_path, factors)
        self.assertEqual(code, 2)
        self.assertIn('F3', err)

    def test_missing_argument_is_a_usage_error(self):
        code, _, _ = self.run_cli('train')
        self.assertEqual(code, 1)

    def test_hyphenated_subcommand(self):
        code, out, _ = self.run_cli('colloc-stats', self.corpus_path, '--top', 3)
        self.assertEqual(code, 0)
        self.assertIn('mean_distance', out)
