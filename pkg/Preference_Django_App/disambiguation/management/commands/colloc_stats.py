from django.core.management.base import CommandError

from disambiguation.colloc import STATISTICS, collocation_table
from disambiguation.conf import output_path
from disambiguation.corpus import apply_class_map, load_corpus

from ._base import PreferenceCommand


class Command(PreferenceCommand):
    help = 'Collocation statistics of every triple observed in a corpus'

    def add_arguments(self, parser):
        parser.add_argument('corpus', help='Corpus file')
        parser.add_argument('--statistics', help=f'Comma-separated statistics (default: all of {", ".join(STATISTICS)})')
        parser.add_argument('--sort-by', default='mean_distance', help='Column to sort descending by')
        parser.add_argument('--top', type=int, help='Show only the first N rows')
        parser.add_argument('--smoothing', type=float, help='Additive smoothing of collocation counts')
        parser.add_argument('--colloc-tie-mode', choices=('fractional', 'count_all'))
        parser.add_argument('-o', '--output', help='Write the full table as TSV')
        self.add_weight_arguments(parser)
        self.add_machine_argument(parser)

    def handle(self, *args, **options):
        statistics = STATISTICS
        if options['statistics']:
            statistics = tuple(s.strip() for s in options['statistics'].split(',') if s.strip())
            unknown = [s for s in statistics if s not in STATISTICS]
            if unknown:
                raise CommandError(f'unknown statistics {unknown}; choose from {STATISTICS}')
        corpus = apply_class_map(load_corpus(options['corpus']))
        table = collocation_table(corpus, self.weights(options), statistics, options['sort_by'],
                                  options['smoothing'], options['colloc_tie_mode'])

        if options['output']:
            path = output_path(options['output'])
            table.to_csv(path, sep='\t', index=False)
            if not options['machine']:
                self.stdout.write(self.style.SUCCESS(f'{len(table)} triples written to {path}'))
        shown = table.head(options['top']) if options['top'] else table
        if options['machine']:
            self.emit_json(shown.to_dict(orient='records'))
            return
        self.emit_frame(shown)
