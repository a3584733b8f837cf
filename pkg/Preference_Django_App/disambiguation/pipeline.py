"""
Training configuration bundling everything fitted on a training split.

Collocation models and the rule model are trained on the training corpus
only; prepare() then evaluates them on any corpus as derived preference
functions (``SemColl:<statistic>``, ``SynRules``) appended after the
declared base functions.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .colloc import (
    STATISTICS, CollocModel, RuleModel, estimate_rule_probs, score_analysis,
    syntactic_rule_cost, train_colloc_model,
)
from .corpus import Corpus, apply_class_map
from .evaluation import EvalReport, evaluate, random_baseline
from .exceptions import FactorsError, PreferenceScalingError
from .goldscore import ScoreWeights
from .train import (
    HillClimber, HillClimbStep, ScalingFactors, assemble_training_matrix,
    least_squares, normalized_factors,
)

logger = logging.getLogger(__name__)

METHODS = ('random', 'normalized', 'hand', 'lsq', 'lsq+hillclimb', 'alone')
RULE_FUNCTION = 'SynRules'

METHOD_LABELS = {
    'random': '(Random baseline)',
    'normalized': 'Normalized',
    'hand': 'Hand-tuned',
    'lsq': 'Least squares',
    'lsq+hillclimb': 'Hill climbing',
}


def colloc_function_name(statistic: str) -> str:
    return f'SemColl:{statistic}'


@dataclass
class PipelineConfig:
    method: str = 'lsq+hillclimb'
    weights: Optional[ScoreWeights] = None
    tie_mode: Optional[str] = None
    colloc_statistics: Tuple[str, ...] = ()
    rule_cost: bool = False
    hand_factors: Optional[ScalingFactors] = None
    alone_function: Optional[str] = None
    colloc_tie_mode: Optional[str] = None
    smoothing: Optional[float] = None
    max_iterations: Optional[int] = None
    workers: Optional[int] = None
    # restrict the declared base functions; None keeps them all
    base_functions: Optional[Tuple[str, ...]] = None
    name: Optional[str] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise PreferenceScalingError(f"unknown method {self.method!r}; choose from {METHODS}")
        unknown = [s for s in self.colloc_statistics if s not in STATISTICS]
        if unknown:
            raise PreferenceScalingError(f"unknown collocation statistics {unknown}")
        if self.method == 'hand' and self.hand_factors is None:
            raise FactorsError("method 'hand' needs a factors file")
        if self.method == 'alone' and not self.alone_function:
            raise PreferenceScalingError("method 'alone' needs the function to use")
        self.colloc_statistics = tuple(self.colloc_statistics)
        self.weights = self.weights or ScoreWeights.default()

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.method == 'alone':
            return self.alone_function
        return METHOD_LABELS[self.method]

    @property
    def derived_functions(self) -> List[str]:
        names = [colloc_function_name(s) for s in self.colloc_statistics]
        return names + ([RULE_FUNCTION] if self.rule_cost else [])

    def fit(self, corpus: Corpus) -> 'TrainedPipeline':
        """Train the derived functions and scaling factors on corpus alone."""
        training = apply_class_map(corpus)
        colloc_models = {
            s: train_colloc_model(training, s, self.weights, self.smoothing, self.colloc_tie_mode)
            for s in self.colloc_statistics
        }
        rule_model = estimate_rule_probs(training) if self.rule_cost else None
        trained = TrainedPipeline(self, colloc_models, rule_model)
        prepared = trained.prepare(corpus)
        trained.factors = self._factors(prepared, trained)
        return trained

    def _factors(self, prepared: Corpus, trained: 'TrainedPipeline') -> Optional[ScalingFactors]:
        names = prepared.function_names
        if self.method == 'random':
            return None
        if self.method == 'hand':
            self.hand_factors.vector_for(names)
            return self.hand_factors
        if self.method == 'alone':
            if self.alone_function not in names:
                raise FactorsError(f"function {self.alone_function!r} is not declared")
            return ScalingFactors.zeros(names).with_value(names.index(self.alone_function), 1.0)

        matrix = assemble_training_matrix(prepared, self.weights)
        if self.method == 'normalized':
            return normalized_factors(matrix)
        factors = least_squares(matrix)
        if self.method == 'lsq':
            return factors
        climber = HillClimber(prepared, self.weights, self.tie_mode, self.max_iterations, self.workers)
        factors = climber.run(factors)
        trained.steps = list(climber.steps)
        trained.initial_correct = climber.initial_correct
        return factors


@dataclass
class TrainedPipeline:
    config: PipelineConfig
    colloc_models: Dict[str, CollocModel] = field(default_factory=dict)
    rule_model: Optional[RuleModel] = None
    factors: Optional[ScalingFactors] = None
    steps: List[HillClimbStep] = field(default_factory=list)
    initial_correct: int = 0

    def prepare(self, corpus: Corpus) -> Corpus:
        corpus = apply_class_map(corpus)
        base = self.config.base_functions
        if base is not None:
            missing = [n for n in base if n not in corpus.function_names]
            if missing:
                raise FactorsError(f"functions {missing} are not declared by the corpus")
            corpus = replace(corpus, function_names=tuple(base))
        derived = self.config.derived_functions
        if not derived:
            return corpus

        values = {}
        for s in corpus.sentences:
            for a in s.analyses:
                row = {colloc_function_name(stat): score_analysis(model, a, len(s))
                       for stat, model in self.colloc_models.items()}
                if self.rule_model is not None:
                    row[RULE_FUNCTION] = syntactic_rule_cost(self.rule_model, a)
                values[(s.id, a.id)] = row
        return corpus.with_features(derived, values)

    def evaluate(self, corpus: Corpus, name: Optional[str] = None) -> EvalReport:
        prepared = self.prepare(corpus)
        name = name or self.config.label
        if self.config.method == 'random':
            return random_baseline(prepared, self.config.weights, name=name)
        return evaluate(prepared, self.factors, self.config.weights, name=name)

    def to_dict(self) -> dict:
        return {
            'method': self.config.method,
            'factors': self.factors.as_dict() if self.factors else None,
            'colloc_models': {s: m.to_dict() for s, m in self.colloc_models.items()},
            'rule_model': self.rule_model.to_dict() if self.rule_model else None,
        }

    def save_models(self, path) -> Path:
        """Trained collocation and rule models, for inspection or reuse by score/evaluate."""
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + '\n', encoding='utf-8')
        return path

    @classmethod
    def load_models(cls, path, config: PipelineConfig) -> 'TrainedPipeline':
        path = Path(path)
        if not path.exists():
            raise PreferenceScalingError(f"models file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding='utf-8'))
            colloc_models = {s: CollocModel.from_dict(m) for s, m in data.get('colloc_models', {}).items()}
            rule_model = RuleModel.from_dict(data['rule_model']) if data.get('rule_model') else None
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise PreferenceScalingError(f"malformed models file {path}: {exc}")
        config = replace(config, colloc_statistics=tuple(colloc_models), rule_cost=rule_model is not None)
        return cls(config, colloc_models, rule_model)


def alone_configs(function_names: Sequence[str], base: PipelineConfig) -> List[PipelineConfig]:
    """One configuration per function, each evaluated acting alone."""
    return [replace(base, method='alone', alone_function=n, hand_factors=None, name=n) for n in function_names]
