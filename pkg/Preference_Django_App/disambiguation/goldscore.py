"""
Training scores of analyses against gold skeletal trees.

score(Q, T) = a1*|Q & T| - a2*|Q - T| - a3*|T - Q| over unlabelled
(start, end) spans, relativised within each sentence against the analyses
that best match the gold tree.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Tuple

import numpy as np

from .conf import get_setting
from .corpus import Analysis, Sentence, SkeletalTree


@dataclass(frozen=True)
class ScoreWeights:
    a1: float = 1.0
    a2: float = 10.0
    a3: float = 0.0

    def __post_init__(self):
        for name in ('a1', 'a2', 'a3'):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"score weight {name} must be finite and nonnegative, got {value}")

    @classmethod
    def default(cls) -> 'ScoreWeights':
        return cls(*get_setting('SCORE_WEIGHTS'))


@dataclass(frozen=True)
class RelativisedSentence:
    sentence_id: str
    g: Dict[str, float]
    z: Dict[str, Dict[str, float]]
    best_set: FrozenSet[str]


def _spans(spans) -> FrozenSet[Tuple[int, int]]:
    if isinstance(spans, SkeletalTree):
        return spans.spans
    return frozenset(s.span if hasattr(s, 'span') else tuple(s) for s in spans)


def training_score(Q: Iterable, T: Iterable, w: Optional[ScoreWeights] = None) -> float:
    w = w or ScoreWeights.default()
    q, t = _spans(Q), _spans(T)
    return w.a1 * len(q & t) - w.a2 * len(q - t) - w.a3 * len(t - q)


def analysis_scores(sentence: Sentence, w: Optional[ScoreWeights] = None) -> Dict[str, float]:
    gold = sentence.gold.spans
    return {a.id: training_score(a.span_set, gold, w) for a in sentence.analyses}


def best_analyses(sentence: Sentence, w: Optional[ScoreWeights] = None) -> FrozenSet[str]:
    """Ids of every analysis reaching the maximal raw training score (exact ties)."""
    scores = analysis_scores(sentence, w)
    top = max(scores.values())
    return frozenset(a for a, s in scores.items() if s == top)


def exact_match(a: Analysis, t: SkeletalTree) -> bool:
    """Span-set equality; A/P labels are ignored."""
    return a.span_set == t.spans


def is_correct(a: Analysis, sentence: Sentence, criterion: str = 'exact',
               w: Optional[ScoreWeights] = None, best: Optional[FrozenSet[str]] = None) -> bool:
    """
    Correctness of one analysis.

    'exact' (default) requires an exact skeletal-tree match; 'best' accepts
    any analysis with the maximal training score.
    """
    if criterion == 'exact':
        return exact_match(a, sentence.gold)
    if criterion == 'best':
        return a.id in (best if best is not None else best_analyses(sentence, w))
    raise ValueError(f"unknown correctness criterion {criterion!r}")


def relativize(sentence: Sentence, w: Optional[ScoreWeights] = None,
               function_names: Optional[Sequence[str]] = None) -> RelativisedSentence:
    """
    Subtract the best analyses' mean training score and mean feature values
    from every analysis of the sentence.
    """
    if function_names is None:
        function_names = list(dict.fromkeys(n for a in sentence.analyses for n in a.features))
    ids = [a.id for a in sentence.analyses]
    raw = analysis_scores(sentence, w)
    top = max(raw.values())
    best = frozenset(i for i in ids if raw[i] == top)
    mask = np.array([i in best for i in ids])

    g = np.array([raw[i] for i in ids], dtype=float)
    s = np.array([[a.feature(n) for n in function_names] for a in sentence.analyses], dtype=float)
    s = s.reshape(len(ids), len(function_names))
    g = g - g[mask].mean()
    z = s - s[mask].mean(axis=0)

    return RelativisedSentence(
        sentence_id=sentence.id,
        g=dict(zip(ids, g.tolist())),
        z={i: dict(zip(function_names, row.tolist())) for i, row in zip(ids, z)},
        best_set=best,
    )
