"""
Semantic collocation statistics over (H1, R, H2) triples.

Triple counts are taken from the analyses ranked highest (or joint highest)
in training score. Five statistics turn a triple into a preference value:

    mutual_info       ln(A / (P1(h1) P2(r) P3(h2)))
    chi_squared       |F - E| (F - E) / E          (signed)
    chi               (F - E) / sqrt(E)
    mean_distance     mean relativised training score of analyses containing the triple
    likelihood_ratio  signed -2 ln(lambda) for h1, h2 independent given r

An analysis is scored by averaging its triple values and multiplying by the
sentence length. The syntactic rule cost function (sum of log rule
probabilities) lives here too since it is trained the same way.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.special import xlogy

from .conf import get_setting
from .corpus import Analysis, Corpus, Triple
from .exceptions import UntrainedModelError
from .goldscore import ScoreWeights, best_analyses, exact_match, relativize

logger = logging.getLogger(__name__)

STATISTICS = ('mutual_info', 'chi_squared', 'chi', 'mean_distance', 'likelihood_ratio')
SMOOTHED_STATISTICS = ('mutual_info', 'chi_squared', 'chi')
TIE_MODES = ('fractional', 'count_all')


@dataclass
class TripleStats:
    """Triple token counts over a population, with their positional marginals."""
    joint: Dict[Triple, float] = field(default_factory=dict)
    m1: Dict[str, float] = field(default_factory=dict)
    m2: Dict[str, float] = field(default_factory=dict)
    m3: Dict[str, float] = field(default_factory=dict)
    n: float = 0.0

    def __post_init__(self):
        # (h1, r) and (r, h2) marginals for tables conditioned on the relation
        self._h1_given_r = defaultdict(float)
        self._h2_given_r = defaultdict(float)
        for t, count in self.joint.items():
            self._h1_given_r[(t.h1, t.r)] += count
            self._h2_given_r[(t.r, t.h2)] += count

    @classmethod
    def from_weighted(cls, weighted: Iterable[Tuple[Triple, float]]) -> 'TripleStats':
        joint = defaultdict(float)
        m1, m2, m3 = defaultdict(float), defaultdict(float), defaultdict(float)
        n = 0.0
        for t, weight in weighted:
            joint[t] += weight
            m1[t.h1] += weight
            m2[t.r] += weight
            m3[t.h2] += weight
            n += weight
        return cls(dict(joint), dict(m1), dict(m2), dict(m3), n)

    @property
    def N(self) -> float:
        return self.n

    def expected(self, t: Triple) -> float:
        """Expected frequency of t if its three fields were independent."""
        if self.n <= 0:
            return 0.0
        return self.m1.get(t.h1, 0.0) * self.m2.get(t.r, 0.0) * self.m3.get(t.h2, 0.0) / self.n ** 2

    def contingency(self, t: Triple) -> Tuple[float, float, float, float]:
        """2x2 table (k11, k12, k21, k22) for h1 against h2 among triples with relation t.r."""
        n_r = self.m2.get(t.r, 0.0)
        k11 = self.joint.get(t, 0.0)
        row = self._h1_given_r.get((t.h1, t.r), 0.0)
        col = self._h2_given_r.get((t.r, t.h2), 0.0)
        k12 = row - k11
        k21 = col - k11
        return k11, k12, k21, n_r - k11 - k12 - k21


@dataclass
class CollocModel:
    statistic: str
    table: Dict[Triple, float]
    default_value: float = 0.0
    smoothing: float = 0.0

    def value(self, t: Triple) -> float:
        return self.table.get(t, self.default_value)

    def to_dict(self) -> dict:
        return {
            'statistic': self.statistic,
            'default_value': self.default_value,
            'smoothing': self.smoothing,
            'table': [[t.h1, t.r, t.h2, v] for t, v in self.table.items()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'CollocModel':
        return cls(
            statistic=data['statistic'],
            table={Triple(h1, r, h2): float(v) for h1, r, h2, v in data['table']},
            default_value=float(data['default_value']),
            smoothing=float(data.get('smoothing', 0.0)),
        )


@dataclass
class RuleModel:
    probs: Dict[str, float]
    floor: float

    def prob(self, rule: str) -> float:
        return self.probs.get(rule, self.floor)

    def to_dict(self) -> dict:
        return {'probs': dict(self.probs), 'floor': self.floor}

    @classmethod
    def from_dict(cls, data: dict) -> 'RuleModel':
        return cls({k: float(v) for k, v in data['probs'].items()}, float(data['floor']))


def _smoothing(statistic: str, smoothing: Optional[float]) -> float:
    if statistic not in SMOOTHED_STATISTICS:
        return 0.0
    return get_setting('COLLOC_SMOOTHING') if smoothing is None else smoothing


# Counting

def extract_triple_counts(corpus: Corpus, weights: Optional[ScoreWeights] = None,
                          tie_mode: Optional[str] = None) -> TripleStats:
    """
    Count triple tokens of each sentence's best analyses.

    In 'fractional' mode tied best analyses each contribute with weight
    1/|best set|; 'count_all' counts every tied analysis fully.
    """
    tie_mode = tie_mode or get_setting('COLLOC_TIE_MODE')
    if tie_mode not in TIE_MODES:
        raise ValueError(f"unknown tie mode {tie_mode!r}")

    def weighted():
        for sentence in corpus.sentences:
            best = best_analyses(sentence, weights)
            weight = 1.0 / len(best) if tie_mode == 'fractional' else 1.0
            for a in sentence.analyses:
                if a.id in best:
                    for t in a.triples:
                        yield t, weight

    return TripleStats.from_weighted(weighted())


def observed_triples(corpus: Corpus) -> List[Triple]:
    """Every distinct triple of every analysis, in first-seen order."""
    return list(dict.fromkeys(t for s in corpus.sentences for a in s.analyses for t in a.triples))


# Statistics on single triples

def signed_chi_square(observed: float, expected: float) -> float:
    return abs(observed - expected) * (observed - expected) / expected


def signed_chi(observed: float, expected: float) -> float:
    return (observed - expected) / math.sqrt(expected)


def _require_trained(stats: TripleStats):
    if stats.n <= 0:
        raise UntrainedModelError("triple statistics have no observations")


def mutual_information(stats: TripleStats, t: Triple, smoothing: Optional[float] = None,
                       default: float = 0.0) -> float:
    _require_trained(stats)
    s = _smoothing('mutual_info', smoothing)
    n = stats.n
    p1, p2, p3 = stats.m1.get(t.h1, 0.0) / n, stats.m2.get(t.r, 0.0) / n, stats.m3.get(t.h2, 0.0) / n
    if p1 == 0 or p2 == 0 or p3 == 0:
        return default
    joint = (stats.joint.get(t, 0.0) + s) / n
    if joint <= 0:
        return default
    return math.log(joint / (p1 * p2 * p3))


def chi_squared_signed(stats: TripleStats, t: Triple, smoothing: Optional[float] = None,
                       default: float = 0.0) -> float:
    _require_trained(stats)
    expected = stats.expected(t)
    if expected <= 0:
        return default
    return signed_chi_square(stats.joint.get(t, 0.0) + _smoothing('chi_squared', smoothing), expected)


def chi_signed(stats: TripleStats, t: Triple, smoothing: Optional[float] = None,
               default: float = 0.0) -> float:
    _require_trained(stats)
    expected = stats.expected(t)
    if expected <= 0:
        return default
    return signed_chi(stats.joint.get(t, 0.0) + _smoothing('chi', smoothing), expected)


def signed_log_likelihood_ratio(k11: float, k12: float, k21: float, k22: float) -> float:
    """
    Binomial -2 ln(lambda) for a 2x2 table, positive when k11 exceeds its
    expectation under independence. Degenerate tables score 0.
    """
    n = k11 + k12 + k21 + k22
    rows, cols = (k11 + k12, k21 + k22), (k11 + k21, k12 + k22)
    if n <= 0 or min(rows) <= 0 or min(cols) <= 0:
        return 0.0
    cells = np.array([k11, k12, k21, k22], dtype=float)
    margins = np.array(rows + cols, dtype=float)
    g2 = 2.0 * (xlogy(cells, cells).sum() - xlogy(margins, margins).sum() + xlogy(n, n))
    expected = rows[0] * cols[0] / n
    if g2 <= 0.0 or math.isclose(k11, expected):
        return 0.0
    return float(g2) if k11 > expected else -float(g2)


def likelihood_ratio(stats: TripleStats, t: Triple, default: float = 0.0) -> float:
    _require_trained(stats)
    if stats.m2.get(t.r, 0.0) <= 0:
        return default
    return signed_log_likelihood_ratio(*stats.contingency(t))


def mean_distance_table(corpus: Corpus, weights: Optional[ScoreWeights] = None) -> Tuple[Dict[Triple, float], float]:
    """
    Mean relativised training score of the analyses containing each triple,
    with the corpus-wide mean over all analyses as the second value.
    """
    totals = defaultdict(float)
    counts = defaultdict(int)
    all_g = []
    for sentence in corpus.sentences:
        rel = relativize(sentence, weights, function_names=())
        for a in sentence.analyses:
            g = rel.g[a.id]
            all_g.append(g)
            for t in set(a.triples):
                totals[t] += g
                counts[t] += 1
    table = {t: totals[t] / counts[t] for t in totals}
    return table, float(np.mean(all_g)) if all_g else 0.0


def mean_distance(corpus: Corpus, weights: Optional[ScoreWeights], t: Triple,
                  default: Optional[float] = None) -> float:
    table, corpus_mean = mean_distance_table(corpus, weights)
    if t in table:
        return table[t]
    return corpus_mean if default is None else default


# Models

def train_colloc_model(corpus: Corpus, statistic: str, weights: Optional[ScoreWeights] = None,
                       smoothing: Optional[float] = None, tie_mode: Optional[str] = None,
                       default_value: Optional[float] = None) -> CollocModel:
    """Score table for every triple observed in the corpus under one statistic."""
    if statistic not in STATISTICS:
        raise ValueError(f"unknown collocation statistic {statistic!r}; choose from {STATISTICS}")
    smoothing = _smoothing(statistic, smoothing)

    if statistic == 'mean_distance':
        table, corpus_mean = mean_distance_table(corpus, weights)
        default = corpus_mean if default_value is None else default_value
        return CollocModel(statistic, table, default, 0.0)

    stats = extract_triple_counts(corpus, weights, tie_mode)
    default = 0.0 if default_value is None else default_value
    if stats.n <= 0:
        raise UntrainedModelError(f"no triples in best analyses to train {statistic}")
    if statistic == 'mutual_info':
        fn = lambda t: mutual_information(stats, t, smoothing, default)
    elif statistic == 'chi_squared':
        fn = lambda t: chi_squared_signed(stats, t, smoothing, default)
    elif statistic == 'chi':
        fn = lambda t: chi_signed(stats, t, smoothing, default)
    else:
        fn = lambda t: likelihood_ratio(stats, t, default)
    table = {t: fn(t) for t in observed_triples(corpus)}
    logger.debug("Trained %s over %d triples (N=%.1f)", statistic, len(table), stats.n)
    return CollocModel(statistic, table, default, smoothing)


def score_analysis(model: CollocModel, a: Analysis, sentence_word_count: int) -> float:
    """Mean triple value of the analysis scaled by sentence length; 0 without triples."""
    if not a.triples:
        return 0.0
    return float(np.mean([model.value(t) for t in a.triples])) * sentence_word_count


def estimate_rule_probs(corpus: Corpus) -> RuleModel:
    """Add-0.5 rule probabilities from analyses with exactly correct skeletal trees."""
    vocabulary = sorted({r for s in corpus.sentences for a in s.analyses for r in a.rules})
    counts = defaultdict(int)
    n_correct = 0
    for sentence in corpus.sentences:
        for a in sentence.analyses:
            if exact_match(a, sentence.gold):
                n_correct += 1
                for r in a.rules:
                    counts[r] += 1
    if n_correct == 0:
        raise UntrainedModelError("no exactly correct analyses to estimate rule probabilities from")
    if not vocabulary:
        # every rule cost is then the empty sum
        logger.warning("No rules in the corpus; the syntactic rule cost is 0 for every analysis")
        return RuleModel({}, 1.0)
    denominator = sum(counts.values()) + 0.5 * len(vocabulary)
    probs = {r: (counts[r] + 0.5) / denominator for r in vocabulary}
    return RuleModel(probs, 0.5 / denominator)


def syntactic_rule_cost(model: RuleModel, a: Analysis) -> float:
    return float(sum(math.log(model.prob(r)) for r in a.rules))


def collocation_table(corpus: Corpus, weights: Optional[ScoreWeights] = None,
                      statistics=STATISTICS, sort_by: str = 'mean_distance',
                      smoothing: Optional[float] = None, tie_mode: Optional[str] = None) -> pd.DataFrame:
    """One row per observed triple with its best-analysis count and each statistic."""
    stats = extract_triple_counts(corpus, weights, tie_mode)
    models = {name: train_colloc_model(corpus, name, weights, smoothing, tie_mode) for name in statistics}
    rows = []
    for t in observed_triples(corpus):
        row = {'h1': t.h1, 'r': t.r, 'h2': t.h2, 'joint': stats.joint.get(t, 0.0)}
        row.update({name: model.value(t) for name, model in models.items()})
        rows.append(row)
    df = pd.DataFrame(rows, columns=['h1', 'r', 'h2', 'joint', *statistics])
    if sort_by in df.columns and not df.empty:
        df = df.sort_values([sort_by, 'h1', 'r', 'h2'], ascending=[False, True, True, True], kind='mergesort')
    return df.reset_index(drop=True)
