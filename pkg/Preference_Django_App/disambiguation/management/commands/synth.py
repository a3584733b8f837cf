from disambiguation.conf import output_path
from disambiguation.corpus import dump_corpus
from disambiguation.synth import SynthConfig, function_names, generate, planted_weights, read_config_file
from disambiguation.train import ScalingFactors, save_factors

from ._base import PreferenceCommand

# flags mirroring SynthConfig fields; anything else goes through --set
FLAGS = ('n_sentences', 'n_functions', 'noise_scale', 'triple_signal', 'min_analyses', 'max_analyses')


class Command(PreferenceCommand):
    help = 'Generate a seeded synthetic corpus with planted scaling factors'

    def add_arguments(self, parser):
        parser.add_argument('-o', '--output', default='synthetic.jsonl', help='Corpus file to write')
        parser.add_argument('--config', help='key=value file of generator settings')
        parser.add_argument('--seed', type=int, help='Random seed')
        parser.add_argument('--n-sentences', type=int)
        parser.add_argument('--n-functions', type=int)
        parser.add_argument('--noise-scale', type=float)
        parser.add_argument('--triple-signal', type=float)
        parser.add_argument('--min-analyses', type=int)
        parser.add_argument('--max-analyses', type=int)
        parser.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                            help='Any other generator setting, e.g. --set planted_weights=1,-2,0.5')
        parser.add_argument('--planted-out', help='Write the planted weights as a factors file')
        self.add_machine_argument(parser)

    def handle(self, *args, **options):
        # Config file first, then --set, then explicit flags
        values = read_config_file(options['config']) if options['config'] else {}
        for item in options['set']:
            key, _, value = item.partition('=')
            values[key.strip()] = value
        for key in FLAGS + ('seed',):
            if options.get(key) is not None:
                values[key] = str(options[key])
        cfg = SynthConfig.from_mapping(values)

        # Generate and save corpus with its planted factors
        corpus = generate(cfg)
        path = dump_corpus(corpus, output_path(options['output']))
        planted = ScalingFactors.from_vector(function_names(cfg), planted_weights(cfg))
        if options['planted_out']:
            save_factors(planted, output_path(options['planted_out']))

        if options['machine']:
            self.emit_json({'output': str(path), 'sentences': len(corpus), 'seed': cfg.seed,
                            'planted_weights': planted.as_dict()})
            return
        self.stdout.write(self.style.SUCCESS(
            f'Wrote {len(corpus)} sentences over {cfg.n_functions} functions to {path} (seed {cfg.seed})'))
