from django.core.management.base import CommandError

from disambiguation.conf import output_path
from disambiguation.corpus import load_corpus
from disambiguation.train import assemble_training_matrix, save_factors

from ._base import PreferenceCommand


class Command(PreferenceCommand):
    help = 'Train scaling factors on a corpus and write them to a factors file'

    def add_arguments(self, parser):
        parser.add_argument('corpus', help='Corpus file')
        parser.add_argument('-o', '--output', default='factors.json', help='Factors file to write')
        parser.add_argument('--models-out', help='Also write the trained collocation and rule models')
        parser.add_argument('--matrix-out', help='Also write the relativised training matrix as TSV')
        self.add_training_arguments(parser)
        self.add_machine_argument(parser)

    def handle(self, *args, **options):
        config = self.pipeline_config(options)
        if config.method == 'random':
            raise CommandError("method 'random' has no scaling factors to train")

        # Load corpus and fit the pipeline
        corpus = load_corpus(options['corpus'])
        self.stdout.write(f'Training {config.label} factors on {len(corpus)} sentences...')
        trained = config.fit(corpus)

        # Save factors and optional models
        path = save_factors(trained.factors, output_path(options['output']))
        if options['models_out']:
            trained.save_models(output_path(options['models_out']))
        # Export the training matrix
        if options['matrix_out']:
            matrix = assemble_training_matrix(trained.prepare(corpus), config.weights)
            matrix.to_frame().to_csv(output_path(options['matrix_out']), sep='\t', index=False)

        # Report
        if options['machine']:
            self.emit_json({
                'method': config.method,
                'factors': trained.factors.as_dict(),
                'steps': [vars(s) for s in trained.steps],
                'output': str(path),
            })
            return
        for name, value in trained.factors.as_dict().items():
            self.stdout.write(f'  {name:<30} {value: .6g}')
        if trained.steps:
            self.stdout.write(f'Hill climbing: {trained.initial_correct} -> {trained.steps[-1].correct} '
                              f'correct in {len(trained.steps)} alterations')
        self.stdout.write(self.style.SUCCESS(f'Factors written to {path}'))
