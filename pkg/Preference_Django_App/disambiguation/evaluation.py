"""
Evaluation of scaling factor sets and single preference functions.

A sentence counts as correct when the analysis scored highest agrees exactly
with its skeletal tree. When N analyses tie at the top and G of them are
correct the sentence earns G/N fractional credit, but only G = N counts for
the strict figure used by the sign test.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from .conf import get_setting
from .corpus import Corpus, Sentence
from .exceptions import PreferenceScalingError
from .goldscore import ScoreWeights, exact_match
from .train import DecisionBatch, ScalingFactors, _factor_vector

if TYPE_CHECKING:
    from .pipeline import PipelineConfig, TrainedPipeline

logger = logging.getLogger(__name__)

# Two-tailed 5% level for the sign test, as reported alongside #SDs
SIGNIFICANT_SDS = 1.95


@dataclass
class EvalReport:
    name: str
    n_sentences: int
    correct_strict: int
    correct_fractional: float
    per_sentence: Dict[str, float] = field(default_factory=dict)

    @property
    def percentage(self) -> float:
        return 100.0 * self.correct_fractional / self.n_sentences if self.n_sentences else 0.0

    def strict_vector(self) -> Dict[str, int]:
        return {sid: int(credit == 1.0) for sid, credit in self.per_sentence.items()}

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'sentence_id': list(self.per_sentence),
            'strict': list(self.strict_vector().values()),
            'fractional': list(self.per_sentence.values()),
        })

    def to_record(self) -> dict:
        return {
            'name': self.name,
            'n_sentences': self.n_sentences,
            'correct_strict': self.correct_strict,
            'correct_fractional': self.correct_fractional,
            'percentage': round(self.percentage, 6),
        }

    @classmethod
    def merge(cls, reports: Sequence['EvalReport'], name: Optional[str] = None) -> 'EvalReport':
        per_sentence = {}
        for r in reports:
            per_sentence.update(r.per_sentence)
        return cls(
            name=name or (reports[0].name if reports else ''),
            n_sentences=sum(r.n_sentences for r in reports),
            correct_strict=sum(r.correct_strict for r in reports),
            correct_fractional=float(sum(r.correct_fractional for r in reports)),
            per_sentence=per_sentence,
        )


@dataclass(frozen=True)
class SignTestResult:
    plus: int
    minus: int
    sds: float
    p_value: float = 1.0
    note: str = ''

    @property
    def significant(self) -> bool:
        return self.sds >= SIGNIFICANT_SDS

    def __str__(self):
        text = f"+{self.plus} −{self.minus} #SDs {self.sds:.1f}"
        return f"{text} ({self.note})" if self.note else text


def rank(s: Sentence, c, function_names: Optional[Sequence[str]] = None) -> List[Tuple[str, float]]:
    """Analyses by descending sum_j c_j s_ij; ties keep input order."""
    if function_names is None:
        function_names = c.names if isinstance(c, ScalingFactors) else \
            list(dict.fromkeys(n for a in s.analyses for n in a.features))
    vector = _factor_vector(c, function_names)
    scored = [(a.id, float(np.dot([a.feature(n) for n in function_names], vector))) for a in s.analyses]
    return sorted(scored, key=lambda item: -item[1])


def _report(name, sentence_ids, credit) -> EvalReport:
    credit = [float(x) for x in credit]
    return EvalReport(
        name=name,
        n_sentences=len(sentence_ids),
        correct_strict=int(sum(1 for x in credit if x == 1.0)),
        correct_fractional=float(sum(credit)),
        per_sentence=dict(zip(sentence_ids, credit)),
    )


def evaluate(corpus: Corpus, c, weights: Optional[ScoreWeights] = None,
             name: str = 'factors', criterion: str = 'exact') -> EvalReport:
    batch = DecisionBatch(corpus.sentences, corpus.function_names, weights, criterion, 'strict')
    n_top, n_good = batch.top_counts(_factor_vector(c, corpus.function_names))
    credit = np.where(n_top > 0, n_good / np.maximum(n_top, 1), 0.0)
    return _report(name, corpus.sentence_ids, credit)


def random_baseline(corpus: Corpus, weights: Optional[ScoreWeights] = None,
                    sample: bool = False, seed: int = 0, name: str = '(Random baseline)') -> EvalReport:
    """
    Random selection of one analysis per sentence, in expectation (credit =
    correct analyses / analyses), or sampled with a seeded generator.
    """
    rng = np.random.default_rng(seed)
    credit = []
    for s in corpus.sentences:
        correct = [exact_match(a, s.gold) for a in s.analyses]
        if sample:
            credit.append(float(correct[rng.integers(len(correct))]))
        else:
            credit.append(sum(correct) / len(correct))
    return _report(name, corpus.sentence_ids, credit)


def sign_test(a: Mapping[str, float], b: Mapping[str, float]) -> SignTestResult:
    """
    Paired sign test over binary per-sentence correctness. plus counts
    sentences A gets right and B wrong, minus the reverse.
    """
    if isinstance(a, EvalReport):
        a = a.strict_vector()
    if isinstance(b, EvalReport):
        b = b.strict_vector()
    if set(a) != set(b):
        raise PreferenceScalingError("sign test needs results for the same sentences")
    plus = sum(1 for k in a if a[k] and not b[k])
    minus = sum(1 for k in a if b[k] and not a[k])
    if plus + minus == 0:
        logger.warning("Sign test: no disagreements between the two result sets")
        return SignTestResult(0, 0, 0.0, 1.0, 'no disagreements')
    sds = abs(plus - minus) / math.sqrt(plus + minus)
    return SignTestResult(plus, minus, sds, float(2 * stats.norm.sf(sds)))


# Cross validation

def fold_assignment(sentence_ids: Sequence[str], k: int, seed: int) -> Dict[str, int]:
    """Seeded shuffle of the ids dealt round-robin into k folds."""
    if k < 2:
        raise PreferenceScalingError("cross validation needs k >= 2")
    if k > len(sentence_ids):
        raise PreferenceScalingError(f"cannot split {len(sentence_ids)} sentences into {k} folds")
    order = np.random.default_rng(seed).permutation(len(sentence_ids))
    return {sentence_ids[i]: position % k for position, i in enumerate(order)}


@dataclass
class CrossValidationResult:
    folds: List[EvalReport]
    aggregate: EvalReport
    assignment: Dict[str, int]
    trained: List['TrainedPipeline']


def cross_validate(corpus: Corpus, k: int, pipeline: 'PipelineConfig', seed: int = 0,
                   workers: Optional[int] = None) -> CrossValidationResult:
    """
    Hold out each fold in turn, training every model of the pipeline on the
    remaining folds only and evaluating on the held-out one.
    """
    assignment = fold_assignment(corpus.sentence_ids, k, seed)
    workers = workers or get_setting('WORKERS')

    def run_fold(fold):
        held_out = [sid for sid, f in assignment.items() if f == fold]
        training = corpus.subset(sid for sid, f in assignment.items() if f != fold)
        trained = pipeline.fit(training)
        report = trained.evaluate(corpus.subset(held_out), name=f"{pipeline.label} fold {fold + 1}")
        logger.info("%s fold %d: %d/%d strict, %.1f%%", pipeline.label, fold + 1,
                    report.correct_strict, report.n_sentences, report.percentage)
        return report, trained

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_fold, range(k)))
    else:
        results = [run_fold(fold) for fold in range(k)]

    folds = [report for report, _ in results]
    aggregate = EvalReport.merge(folds, name=pipeline.label)
    # per-sentence results in corpus order
    aggregate.per_sentence = {sid: aggregate.per_sentence[sid] for sid in corpus.sentence_ids}
    return CrossValidationResult(folds, aggregate, assignment, [t for _, t in results])


# Tables and result files

def comparison_frame(reports: Sequence[EvalReport]) -> pd.DataFrame:
    """Factor set / number correct / percentage correct, one row per report."""
    return pd.DataFrame({
        'Scaling factor set': [r.name for r in reports],
        'Number correct': [r.correct_strict for r in reports],
        'Fractional correct': [round(r.correct_fractional, 2) for r in reports],
        'Percentage correct': [round(r.percentage, 1) for r in reports],
    })


def sign_test_frame(reports: Sequence[EvalReport]) -> pd.DataFrame:
    rows = []
    for i, first in enumerate(reports):
        for second in reports[i + 1:]:
            result = sign_test(first, second)
            rows.append({'S1': first.name, 'S2': second.name, '+': result.plus,
                         '-': result.minus, '#SDs': round(result.sds, 1)})
    return pd.DataFrame(rows, columns=['S1', 'S2', '+', '-', '#SDs'])


def write_results(report: EvalReport, path) -> Path:
    path = Path(path)
    report.to_frame().to_csv(path, sep='\t', index=False)
    return path


def read_results(path) -> Dict[str, int]:
    """Strict per-sentence correctness from a results file."""
    path = Path(path)
    if not path.exists():
        raise PreferenceScalingError(f"results file not found: {path}")
    try:
        df = pd.read_csv(path, sep='\t', dtype={'sentence_id': str})
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise PreferenceScalingError(f"malformed results file {path}: {exc}")
    if not {'sentence_id', 'strict'} <= set(df.columns):
        raise PreferenceScalingError(f"results file {path} needs sentence_id and strict columns")
    if not df['strict'].isin([0, 1]).all():
        raise PreferenceScalingError(f"results file {path}: strict column must be 0 or 1")
    return dict(zip(df['sentence_id'], df['strict'].astype(int)))
