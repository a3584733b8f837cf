import re

from django.core.management.base import CommandError

from disambiguation.charts import factor_set_comparison_chart, hill_climb_trajectory_chart, write_html
from disambiguation.conf import output_path
from disambiguation.corpus import load_corpus
from disambiguation.evaluation import comparison_frame, cross_validate, sign_test_frame, write_results
from disambiguation.pipeline import METHODS, alone_configs

from ._base import PreferenceCommand


def _slug(name):
    return re.sub(r'[^A-Za-z0-9]+', '_', name).strip('_').lower() or 'results'


class Command(PreferenceCommand):
    help = 'k-fold cross validation: train on k-1 folds, evaluate on the held-out fold'

    def add_arguments(self, parser):
        parser.add_argument('corpus', help='Corpus file')
        parser.add_argument('-k', '--folds', type=int, default=5, help='Number of folds')
        parser.add_argument('--seed', type=int, default=0, help='Seed of the fold assignment')
        parser.add_argument('--methods', help=f'Comma-separated methods to compare, from {", ".join(METHODS)}')
        parser.add_argument('--alone', action='store_true',
                            help='Evaluate every base and derived function acting alone')
        parser.add_argument('--results-dir', help='Write per-sentence results of each factor set here')
        parser.add_argument('--chart', help='Write an HTML bar chart of the comparison')
        parser.add_argument('--trajectory-chart', help='Write an HTML chart of fold 1 hill climbing')
        self.add_training_arguments(parser)
        self.add_machine_argument(parser)

    def handle(self, *args, **options):
        base = self.pipeline_config(options)
        corpus = load_corpus(options['corpus'])

        # Build one pipeline per method, or per function used alone
        if options['alone']:
            names = list(base.base_functions or corpus.function_names) + base.derived_functions
            configs = alone_configs(names, base)
        elif options['methods']:
            methods = [m.strip() for m in options['methods'].split(',') if m.strip()]
            unknown = [m for m in methods if m not in METHODS]
            if unknown:
                raise CommandError(f'unknown methods {unknown}; choose from {METHODS}')
            configs = [self.pipeline_config(options, method=m) for m in methods]
        else:
            configs = [base]

        # Run cross validation
        results = []
        for config in configs:
            if not options['machine']:
                self.stdout.write(f'Cross validating {config.label} ({options["folds"]} folds)...')
            results.append(cross_validate(corpus, options['folds'], config, options['seed'], config.workers))

        # Write results files and charts
        reports = [r.aggregate for r in results]
        if options['results_dir']:
            for report in reports:
                write_results(report, output_path(f"{options['results_dir']}/{_slug(report.name)}.results"))
        if options['chart']:
            write_html(factor_set_comparison_chart(comparison_frame(reports)), output_path(options['chart']))
        if options['trajectory_chart']:
            # Trajectory of the first fold's hill climb
            climbed = next((r for r in results if r.trained[0].config.method == 'lsq+hillclimb'), None)
            if climbed is None:
                raise CommandError('--trajectory-chart needs the lsq+hillclimb method')
            first = climbed.trained[0]
            n_training = sum(1 for f in climbed.assignment.values() if f != 0)
            write_html(hill_climb_trajectory_chart(first.steps, first.initial_correct, n_training),
                       output_path(options['trajectory_chart']))

        fold_sizes = [r.n_sentences for r in results[0].folds]
        if options['machine']:
            self.emit_json({
                'folds': options['folds'],
                'seed': options['seed'],
                'fold_sizes': fold_sizes,
                'reports': [
                    {**r.aggregate.to_record(), 'folds': [f.to_record() for f in r.folds]} for r in results
                ],
                'sign_tests': sign_test_frame(reports).to_dict(orient='records') if len(reports) > 1 else [],
            })
            return

        self.stdout.write(f'Fold sizes: {", ".join(str(n) for n in fold_sizes)}')
        self.emit_frame(comparison_frame(reports))
        if len(reports) > 1:
            self.stdout.write('')
            self.emit_frame(sign_test_frame(reports))
        self.stdout.write(self.style.SUCCESS('Cross validation complete'))
