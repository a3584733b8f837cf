"""Options and error handling shared by the preference scaling commands."""

import json
import logging

from django.core.management.base import BaseCommand, CommandError

from disambiguation.colloc import STATISTICS
from disambiguation.exceptions import PreferenceScalingError
from disambiguation.goldscore import ScoreWeights
from disambiguation.pipeline import METHODS, PipelineConfig
from disambiguation.train import TIE_MODES, load_factors

# returncode for bad input data, as opposed to usage errors (1)
DATA_ERROR = 2


class PreferenceCommand(BaseCommand):
    """
    Base for every subcommand: library errors become CommandError with
    returncode 2 and -v raises the disambiguation log level.
    """

    def execute(self, *args, **options):
        self._configure_logging(options.get('verbosity', 1))
        try:
            return super().execute(*args, **options)
        except PreferenceScalingError as e:
            raise CommandError(str(e), returncode=DATA_ERROR) from e
        except OSError as e:
            raise CommandError(f"{e.strerror or e}: {e.filename}", returncode=DATA_ERROR) from e

    @staticmethod
    def _configure_logging(verbosity):
        logger = logging.getLogger('disambiguation')
        if verbosity >= 2:
            logger.setLevel(logging.DEBUG)
        elif verbosity == 0:
            logger.setLevel(logging.WARNING)

    # Argument groups

    def add_weight_arguments(self, parser):
        parser.add_argument('--a1', type=float, help='Reward per constituent shared with the gold tree')
        parser.add_argument('--a2', type=float, help='Penalty per constituent absent from the gold tree')
        parser.add_argument('--a3', type=float, help='Penalty per gold constituent the analysis misses')

    def add_training_arguments(self, parser, method=True):
        self.add_weight_arguments(parser)
        if method:
            parser.add_argument('--method', choices=METHODS, default='lsq+hillclimb',
                                help='How scaling factors are obtained')
        parser.add_argument('--tie-mode', choices=TIE_MODES, help='Hill climbing tie handling')
        parser.add_argument('--max-iters', type=int, help='Hill climbing iteration cap')
        parser.add_argument('--workers', type=int, help='Threads for interval scans and folds')
        parser.add_argument('--colloc', action='append', choices=STATISTICS, default=[],
                            help='Add a semantic collocation function trained with this statistic')
        parser.add_argument('--colloc-tie-mode', choices=('fractional', 'count_all'))
        parser.add_argument('--smoothing', type=float, help='Additive smoothing of collocation counts')
        parser.add_argument('--rule-cost', action='store_true', help='Add the syntactic rule cost function')
        parser.add_argument('--functions', help='Comma-separated subset of declared functions to use')
        parser.add_argument('--hand-factors', help='Factors file for --method hand')
        parser.add_argument('--alone-function', help='Function used alone for --method alone')

    def add_machine_argument(self, parser):
        parser.add_argument('--machine', action='store_true', help='Emit JSON records instead of tables')

    # Option handling

    def weights(self, options) -> ScoreWeights:
        default = ScoreWeights.default()
        values = [options.get(k) for k in ('a1', 'a2', 'a3')]
        try:
            return ScoreWeights(*(v if v is not None else d for v, d in
                                  zip(values, (default.a1, default.a2, default.a3))))
        except ValueError as e:
            raise CommandError(str(e))

    def pipeline_config(self, options, **overrides) -> PipelineConfig:
        functions = options.get('functions')
        hand = options.get('hand_factors')
        kwargs = dict(
            method=options.get('method', 'lsq+hillclimb'),
            weights=self.weights(options),
            tie_mode=options.get('tie_mode'),
            colloc_statistics=tuple(dict.fromkeys(options.get('colloc') or ())),
            rule_cost=options.get('rule_cost', False),
            hand_factors=load_factors(hand) if hand else None,
            alone_function=options.get('alone_function'),
            colloc_tie_mode=options.get('colloc_tie_mode'),
            smoothing=options.get('smoothing'),
            max_iterations=options.get('max_iters'),
            workers=options.get('workers'),
            base_functions=tuple(f.strip() for f in functions.split(',') if f.strip()) if functions else None,
        )
        kwargs.update(overrides)
        try:
            return PipelineConfig(**kwargs)
        except PreferenceScalingError as e:
            # inconsistent flags are a usage error
            raise CommandError(str(e))

    def emit_json(self, records):
        self.stdout.write(json.dumps(records, indent=2, ensure_ascii=False))

    def emit_frame(self, frame):
        self.stdout.write(frame.to_string(index=False))
