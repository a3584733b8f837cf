from django.core.management.base import CommandError

from disambiguation.conf import output_path
from disambiguation.corpus import load_corpus
from disambiguation.evaluation import comparison_frame, write_results
from disambiguation.pipeline import TrainedPipeline
from disambiguation.train import load_factors

from ._base import PreferenceCommand


def trained_from_files(command, options, factors_path):
    """A pipeline holding saved factors and, if given, saved collocation/rule models."""
    factors = load_factors(factors_path)
    config = command.pipeline_config(options, method='hand', hand_factors=factors)
    if options.get('models'):
        trained = TrainedPipeline.load_models(options['models'], config)
    else:
        trained = TrainedPipeline(config)
    trained.factors = factors
    return trained


class Command(PreferenceCommand):
    help = 'Evaluate a factors file (or the random baseline) on a corpus'

    def add_arguments(self, parser):
        parser.add_argument('corpus', help='Corpus file')
        parser.add_argument('factors', nargs='?', help='Factors file')
        parser.add_argument('--models', help='Trained models file for derived functions')
        parser.add_argument('--random', action='store_true', help='Evaluate the random baseline instead')
        parser.add_argument('--name', help='Label for the report')
        parser.add_argument('--results-out', help='Write per-sentence results (TSV) for compare')
        self.add_weight_arguments(parser)
        parser.add_argument('--functions', help='Comma-separated subset of declared functions to use')
        self.add_machine_argument(parser)

    def handle(self, *args, **options):
        # Check if we score the random baseline or a factors file
        if options['random']:
            trained = TrainedPipeline(self.pipeline_config(options, method='random'))
        elif options['factors']:
            trained = trained_from_files(self, options, options['factors'])
        else:
            raise CommandError('a factors file is required unless --random is given')

        corpus = load_corpus(options['corpus'])
        report = trained.evaluate(corpus, name=options['name'] or (
            trained.config.label if options['random'] else options['factors']))

        # Save per-sentence results for the sign test
        if options['results_out']:
            path = write_results(report, output_path(options['results_out']))
            if not options['machine']:
                self.stdout.write(self.style.SUCCESS(f'Per-sentence results written to {path}'))
        if options['machine']:
            self.emit_json(report.to_record())
            return
        self.emit_frame(comparison_frame([report]))
