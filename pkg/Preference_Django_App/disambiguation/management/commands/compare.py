from disambiguation.evaluation import SIGNIFICANT_SDS, read_results, sign_test

from ._base import PreferenceCommand


class Command(PreferenceCommand):
    help = 'Sign test between two per-sentence result files'

    def add_arguments(self, parser):
        parser.add_argument('results_a', help='Results file of factor set A')
        parser.add_argument('results_b', help='Results file of factor set B')
        self.add_machine_argument(parser)

    def handle(self, *args, **options):
        result = sign_test(read_results(options['results_a']), read_results(options['results_b']))
        if options['machine']:
            self.emit_json({
                'plus': result.plus,
                'minus': result.minus,
                'sds': result.sds,
                'p_value': result.p_value,
                'significant': result.significant,
                'note': result.note,
            })
            return
        self.stdout.write(str(result))
        if result.significant:
            self.stdout.write(f'#SDs of {SIGNIFICANT_SDS} or more is significant at the 5% level '
                              f'(two-tailed p = {result.p_value:.2g})')
