"""
Scaling factor computation.

Analyses are ranked by sum_j c_j * s_ij. Factors come from one of:

    normalized_factors   |c_j| = 1 / stddev of the relativised function, signed by
                         its covariance with the relativised training score
    least_squares        minimise sum_i (g_i - sum_j c_j z_ij)^2 via the normal
                         equations (LU elimination with partial pivoting)
    hill_climb           alter one factor at a time to the value that most increases
                         the number of correctly disambiguated sentences, using the
                         exact intervals in which each sentence is decided correctly
"""

import json
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .conf import get_setting
from .corpus import Corpus, Sentence
from .exceptions import ConvergenceError, FactorsError
from .goldscore import ScoreWeights, best_analyses, is_correct, relativize

logger = logging.getLogger(__name__)

TIE_MODES = ('strict', 'lenient')


# Factors

@dataclass(frozen=True)
class ScalingFactors:
    names: Tuple[str, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        if len(self.names) != len(self.values):
            raise FactorsError("factor names and values differ in length")
        if not all(math.isfinite(v) for v in self.values):
            raise FactorsError("scaling factors must be finite")

    @classmethod
    def from_vector(cls, names: Sequence[str], vector) -> 'ScalingFactors':
        return cls(tuple(names), tuple(float(v) for v in np.asarray(vector, dtype=float)))

    @classmethod
    def zeros(cls, names: Sequence[str]) -> 'ScalingFactors':
        return cls(tuple(names), (0.0,) * len(names))

    @property
    def c(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.names, self.values))

    def vector_for(self, function_names: Sequence[str]) -> np.ndarray:
        """Factors ordered by function_names; every name must be covered exactly."""
        values = self.as_dict()
        missing = [n for n in function_names if n not in values]
        if missing:
            raise FactorsError(f"no scaling factor for declared functions {missing}")
        unknown = [n for n in self.names if n not in set(function_names)]
        if unknown:
            raise FactorsError(f"scaling factors for undeclared functions {unknown}")
        return np.array([values[n] for n in function_names], dtype=float)

    def with_value(self, j: int, value: float) -> 'ScalingFactors':
        values = list(self.values)
        values[j] = float(value)
        return ScalingFactors(self.names, tuple(values))


def save_factors(factors: ScalingFactors, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(factors.as_dict(), indent=2) + '\n', encoding='utf-8')
    return path


def load_factors(path) -> ScalingFactors:
    path = Path(path)
    if not path.exists():
        raise FactorsError(f"factors file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise FactorsError(f"malformed factors file {path}: {exc.msg}")
    if not isinstance(data, dict):
        raise FactorsError(f"factors file {path} must hold a name -> value map")
    try:
        return ScalingFactors(tuple(data), tuple(float(v) for v in data.values()))
    except (TypeError, ValueError) as exc:
        raise FactorsError(f"non-numeric factor in {path}: {exc}")


def _factor_vector(c, function_names) -> np.ndarray:
    if isinstance(c, ScalingFactors):
        return c.vector_for(function_names)
    return np.asarray(c, dtype=float)


# Training matrix

@dataclass
class TrainingMatrix:
    function_names: Tuple[str, ...]
    sentence_ids: List[str]
    analysis_ids: List[str]
    g: np.ndarray
    z: np.ndarray

    def __len__(self):
        return len(self.g)

    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame(self.z, columns=list(self.function_names))
        df.insert(0, 'g', self.g)
        df.insert(0, 'analysis_id', self.analysis_ids)
        df.insert(0, 'sentence_id', self.sentence_ids)
        return df


def assemble_training_matrix(corpus: Corpus, weights: Optional[ScoreWeights] = None,
                             functions: Optional[Sequence[str]] = None) -> TrainingMatrix:
    functions = tuple(functions or corpus.function_names)
    sentence_ids, analysis_ids, g_rows, z_rows = [], [], [], []
    for sentence in corpus.sentences:
        if not sentence.analyses:
            raise ValueError(f"sentence {sentence.id} has no analyses")
        rel = relativize(sentence, weights, functions)
        for a in sentence.analyses:
            sentence_ids.append(sentence.id)
            analysis_ids.append(a.id)
            g_rows.append(rel.g[a.id])
            z_rows.append([rel.z[a.id][n] for n in functions])
    z = np.array(z_rows, dtype=float).reshape(len(z_rows), len(functions))
    return TrainingMatrix(functions, sentence_ids, analysis_ids, np.array(g_rows, dtype=float), z)


def sse(m: TrainingMatrix, c) -> float:
    residual = m.g - m.z @ np.asarray(c, dtype=float)
    return float(residual @ residual)


def sse_gradient(m: TrainingMatrix, c) -> np.ndarray:
    """-2 sum_i z_ik (g_i - sum_j c_j z_ij) for each k."""
    return -2.0 * m.z.T @ (m.g - m.z @ np.asarray(c, dtype=float))


def least_squares(m: TrainingMatrix, pivot_tolerance: Optional[float] = None,
                  ridge_scale: Optional[float] = None) -> ScalingFactors:
    if len(m) == 0 or not m.function_names:
        raise ValueError("least squares needs at least one row and one function")
    pivot_tolerance = get_setting('PIVOT_TOLERANCE') if pivot_tolerance is None else pivot_tolerance
    ridge_scale = get_setting('RIDGE_SCALE') if ridge_scale is None else ridge_scale
    if not np.any(m.z):
        logger.warning("Training matrix is all zero; returning zero scaling factors")
        return ScalingFactors.zeros(m.function_names)

    normal = m.z.T @ m.z
    rhs = m.z.T @ m.g
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', LinAlgWarning)
        lu, piv = lu_factor(normal)
        # pivots are compared relative to the largest diagonal entry of the system
        if np.abs(np.diag(lu)).min() < pivot_tolerance * max(1.0, np.abs(np.diag(normal)).max()):
            ridge = ridge_scale * np.trace(normal) / len(m.function_names)
            logger.warning("Normal equations near singular; re-solving with ridge %.3g", ridge)
            lu, piv = lu_factor(normal + ridge * np.eye(len(m.function_names)))
        c = lu_solve((lu, piv), rhs)
    return ScalingFactors.from_vector(m.function_names, c)


def normalized_factors(m: TrainingMatrix) -> ScalingFactors:
    values = []
    g = m.g - m.g.mean() if len(m) else m.g
    for j, name in enumerate(m.function_names):
        column = m.z[:, j]
        sigma = column.std(ddof=1) if len(column) > 1 else 0.0
        if not sigma > 0:
            logger.warning("Function %s has zero variance; its normalized factor is 0", name)
            values.append(0.0)
            continue
        covariance = float((column - column.mean()) @ g)
        values.append(1.0 / sigma if covariance > 0 else -1.0 / sigma)
    return ScalingFactors(m.function_names, tuple(values))


# Correctness under a factor vector

@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float
    lower_closed: bool = False
    upper_closed: bool = False

    def __contains__(self, x) -> bool:
        above = x > self.lower or (self.lower_closed and x == self.lower)
        below = x < self.upper or (self.upper_closed and x == self.upper)
        return above and below


@dataclass(frozen=True)
class IntervalSet:
    intervals: Tuple[Interval, ...] = ()

    def __contains__(self, x) -> bool:
        return any(x in interval for interval in self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    @classmethod
    def everything(cls) -> 'IntervalSet':
        return cls((Interval(-math.inf, math.inf),))


class DecisionBatch:
    """
    Raw feature scores of a list of sentences packed into one matrix, with
    each analysis's correctness and the correct x incorrect analysis pairs
    whose score lines can cross.
    """

    def __init__(self, sentences: Sequence[Sentence], function_names: Sequence[str],
                 weights: Optional[ScoreWeights] = None, criterion: str = 'exact',
                 tie_mode: Optional[str] = None, rtol: Optional[float] = None):
        self.sentence_ids = [s.id for s in sentences]
        self.function_names = tuple(function_names)
        self.tie_mode = tie_mode or get_setting('TIE_MODE')
        if self.tie_mode not in TIE_MODES:
            raise ValueError(f"unknown tie mode {self.tie_mode!r}")
        self.rtol = get_setting('TIE_RTOL') if rtol is None else rtol

        rows, correct, sizes = [], [], []
        for s in sentences:
            best = best_analyses(s, weights) if criterion == 'best' else None
            sizes.append(len(s.analyses))
            for a in s.analyses:
                rows.append([a.feature(n) for n in self.function_names])
                correct.append(is_correct(a, s, criterion, weights, best))
        self.S = np.array(rows, dtype=float).reshape(len(rows), len(self.function_names))
        self.correct = np.array(correct, dtype=bool)
        self.sizes = np.array(sizes, dtype=int)
        self.starts = np.concatenate([[0], np.cumsum(self.sizes)[:-1]]).astype(int) if sizes else np.array([], int)
        self.sentence_of = np.repeat(np.arange(len(sizes)), self.sizes)

        pair_a, pair_b = [], []
        for start, size in zip(self.starts, self.sizes):
            idx = np.arange(start, start + size)
            good, bad = idx[self.correct[idx]], idx[~self.correct[idx]]
            pair_a.append(np.repeat(good, len(bad)))
            pair_b.append(np.tile(bad, len(good)))
        self.pair_a = np.concatenate(pair_a).astype(int) if pair_a else np.array([], int)
        self.pair_b = np.concatenate(pair_b).astype(int) if pair_b else np.array([], int)

    def __len__(self):
        return len(self.sizes)

    def scores(self, c) -> np.ndarray:
        return self.S @ np.asarray(c, dtype=float)

    def _wins(self, cmax, wmax) -> np.ndarray:
        top = np.maximum(cmax, wmax)
        tol = self.rtol * np.maximum(1.0, np.abs(top))
        with np.errstate(invalid='ignore'):
            diff = cmax - wmax
        if self.tie_mode == 'strict':
            return np.isfinite(cmax) & (diff > tol)
        return np.isfinite(cmax) & (diff >= -tol)

    def top_counts(self, c) -> Tuple[np.ndarray, np.ndarray]:
        """Per sentence: number of top-scoring analyses and how many of them are correct."""
        if not len(self):
            return np.array([], int), np.array([], int)
        values = self.scores(c)
        top = np.maximum.reduceat(values, self.starts)
        top_of = top[self.sentence_of]
        is_top = values >= top_of - self.rtol * np.maximum(1.0, np.abs(top_of))
        n_top = np.add.reduceat(is_top.astype(int), self.starts)
        n_good = np.add.reduceat((is_top & self.correct).astype(int), self.starts)
        return n_top, n_good

    def outcomes(self, c) -> np.ndarray:
        """Per-sentence correctness under the batch's tie mode."""
        n_top, n_good = self.top_counts(c)
        if self.tie_mode == 'strict':
            return n_good == n_top
        return n_good > 0

    def segments(self, c, j: int):
        """
        Where each sentence is decided correctly as c_j varies, others fixed.

        Returns arrays (sentence, lower, upper, lower_closed, upper_closed)
        of disjoint segments; every open region between consecutive crossing
        points and every crossing point itself is tested separately.
        """
        c = np.asarray(c, dtype=float)
        slope = self.S[:, j]
        base = self.S @ c - slope * c[j]

        # crossing points of every (correct, incorrect) pair
        ds = slope[self.pair_a] - slope[self.pair_b]
        moving = ds != 0
        with np.errstate(divide='ignore', invalid='ignore'):
            x = (base[self.pair_b] - base[self.pair_a])[moving] / ds[moving]
        sent = self.sentence_of[self.pair_a][moving]
        finite = np.isfinite(x)
        x, sent = x[finite], sent[finite]
        # sort by sentence then position, dropping duplicates
        order = np.lexsort((x, sent))
        x, sent = x[order], sent[order]
        keep = np.ones(len(x), dtype=bool)
        keep[1:] = (sent[1:] != sent[:-1]) | (x[1:] != x[:-1])
        x, sent = x[keep], sent[keep]

        # first and last crossing of each sentence
        first = np.ones(len(x), dtype=bool)
        first[1:] = sent[1:] != sent[:-1]
        last = np.ones(len(x), dtype=bool)
        last[:-1] = sent[1:] != sent[:-1]
        previous = np.concatenate([[-np.inf], x[:-1]]) if len(x) else x
        previous = np.where(first, -np.inf, previous)
        step = np.maximum(1.0, np.abs(x))

        # regions ending at each crossing point, the points, the final regions, whole lines
        flat = np.setdiff1d(np.arange(len(self)), sent)
        seg_sent = np.concatenate([sent, sent, sent[last], flat])
        lower = np.concatenate([previous, x, x[last], np.full(len(flat), -np.inf)])
        upper = np.concatenate([x, x, np.full(last.sum(), np.inf), np.full(len(flat), np.inf)])
        sample_at = np.concatenate([
            np.where(first, x - step, (previous + x) / 2.0),
            x,
            x[last] + step[last],
            np.zeros(len(flat)),
        ])
        is_point = np.concatenate([np.zeros(len(x), bool), np.ones(len(x), bool),
                                   np.zeros(last.sum(), bool), np.zeros(len(flat), bool)])

        wins = self._decided_at(seg_sent, sample_at, base, slope)
        return seg_sent[wins], lower[wins], upper[wins], is_point[wins], is_point[wins]

    def _decided_at(self, seg_sent, sample_at, base, slope) -> np.ndarray:
        if not len(seg_sent):
            return np.zeros(0, dtype=bool)
        sizes = self.sizes[seg_sent]
        block_starts = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int)
        owner = np.repeat(np.arange(len(seg_sent)), sizes)
        analysis = self.starts[seg_sent][owner] + (np.arange(sizes.sum()) - block_starts[owner])
        values = base[analysis] + slope[analysis] * sample_at[owner]
        good = self.correct[analysis]
        correct_max = np.maximum.reduceat(np.where(good, values, -np.inf), block_starts)
        wrong_max = np.maximum.reduceat(np.where(~good, values, -np.inf), block_starts)
        return self._wins(correct_max, wrong_max)


def coverage(lower, upper, lower_closed, upper_closed, xs) -> np.ndarray:
    """Number of segments containing each value of xs."""
    xs = np.asarray(xs, dtype=float)
    closed_lo, open_lo = np.sort(lower[lower_closed]), np.sort(lower[~lower_closed])
    closed_hi, open_hi = np.sort(upper[upper_closed]), np.sort(upper[~upper_closed])
    started = np.searchsorted(closed_lo, xs, 'right') + np.searchsorted(open_lo, xs, 'left')
    ended = np.searchsorted(closed_hi, xs, 'left') + np.searchsorted(open_hi, xs, 'right')
    return started - ended


def _function_index(j: Union[int, str], function_names: Sequence[str]) -> int:
    if isinstance(j, str):
        return list(function_names).index(j)
    return int(j)


def correct_count(corpus: Corpus, c, weights: Optional[ScoreWeights] = None,
                  tie_mode: Optional[str] = None, criterion: str = 'exact') -> int:
    """Sentences whose top-scoring analyses are all correct (any, in lenient mode)."""
    batch = DecisionBatch(corpus.sentences, corpus.function_names, weights, criterion, tie_mode)
    return int(batch.outcomes(_factor_vector(c, corpus.function_names)).sum())


def feasible_intervals(sentence: Sentence, c, j: Union[int, str], weights: Optional[ScoreWeights] = None,
                       tie_mode: Optional[str] = None, function_names: Optional[Sequence[str]] = None,
                       criterion: str = 'exact') -> IntervalSet:
    """Values of c_j, other factors fixed, for which the sentence is decided correctly."""
    if function_names is None:
        function_names = c.names if isinstance(c, ScalingFactors) else \
            list(dict.fromkeys(n for a in sentence.analyses for n in a.features))
    j = _function_index(j, function_names)
    batch = DecisionBatch([sentence], function_names, weights, criterion, tie_mode)
    _, lower, upper, lower_closed, upper_closed = batch.segments(_factor_vector(c, function_names), j)

    merged: List[Interval] = []
    for lo, hi, lc, hc in sorted(zip(lower.tolist(), upper.tolist(), lower_closed.tolist(), upper_closed.tolist())):
        if merged and merged[-1].upper == lo and (merged[-1].upper_closed or lc):
            merged[-1] = Interval(merged[-1].lower, hi, merged[-1].lower_closed, hc)
        else:
            merged.append(Interval(lo, hi, lc, hc))
    return IntervalSet(tuple(merged))


# Hill climbing

@dataclass(frozen=True)
class HillClimbStep:
    iteration: int
    function: str
    old_value: float
    new_value: float
    correct: int


@dataclass
class HillClimber:
    corpus: Corpus
    weights: Optional[ScoreWeights] = None
    tie_mode: Optional[str] = None
    max_iters: Optional[int] = None
    workers: Optional[int] = None
    criterion: str = 'exact'
    steps: List[HillClimbStep] = field(default_factory=list)
    initial_correct: int = 0

    def __post_init__(self):
        self.batch = DecisionBatch(self.corpus.sentences, self.corpus.function_names,
                                   self.weights, self.criterion, self.tie_mode)

    def best_value(self, c: np.ndarray, j: int) -> Tuple[int, float]:
        """Best corpus-wide count reachable by changing c_j alone, and the value reaching it."""
        _, lower, upper, lower_closed, upper_closed = self.batch.segments(c, j)
        ends = np.unique(np.concatenate([lower, upper]))
        ends = ends[np.isfinite(ends)]
        if not len(ends):
            return int(self.batch.outcomes(c).sum()), float(c[j])
        candidates = np.concatenate([
            ends,
            (ends[1:] + ends[:-1]) / 2.0,
            [ends[0] - max(1.0, abs(ends[0])), ends[-1] + max(1.0, abs(ends[-1]))],
        ])
        counts = coverage(lower, upper, lower_closed, upper_closed, candidates)
        best = counts.max()
        tied = candidates[counts == best]
        order = np.lexsort((np.abs(tied), np.abs(tied - c[j])))
        return int(best), float(tied[order[0]])

    def run(self, c0: ScalingFactors) -> ScalingFactors:
        names = self.corpus.function_names
        c = c0.vector_for(names)
        m = len(names)
        cap = self.max_iters or get_setting('MAX_ITERATIONS_PER_FACTOR') * max(m, 1)
        workers = self.workers or get_setting('WORKERS')
        current = int(self.batch.outcomes(c).sum())
        self.initial_correct = current
        self.steps = []
        logger.info("Hill climbing from %d/%d correct", current, len(self.batch))

        for iteration in range(1, cap + 1):
            # best value for each factor with the others held fixed
            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    proposals = list(pool.map(lambda j: self.best_value(c, j), range(m)))
            else:
                proposals = [self.best_value(c, j) for j in range(m)]

            # biggest count wins; lowest function index among equals
            j = max(range(m), key=lambda k: (proposals[k][0], -k)) if m else 0
            if not m or proposals[j][0] <= current:
                logger.info("Hill climbing converged after %d alterations at %d correct",
                            len(self.steps), current)
                return ScalingFactors.from_vector(names, c)

            # rescore before accepting
            trial = c.copy()
            trial[j] = proposals[j][1]
            recount = int(self.batch.outcomes(trial).sum())
            if recount <= current:
                logger.warning("Alteration of %s to %.6g did not increase the count on rescoring; stopping",
                               names[j], trial[j])
                return ScalingFactors.from_vector(names, c)
            self.steps.append(HillClimbStep(iteration, names[j], float(c[j]), float(trial[j]), recount))
            logger.debug("Step %d: %s %.6g -> %.6g, %d correct", iteration, names[j], c[j], trial[j], recount)
            c, current = trial, recount

        raise ConvergenceError(f"hill climbing did not terminate within {cap} iterations")


def hill_climb(corpus: Corpus, c0: ScalingFactors, weights: Optional[ScoreWeights] = None,
               tie_mode: Optional[str] = None, max_iters: Optional[int] = None,
               workers: Optional[int] = None) -> ScalingFactors:
    return HillClimber(corpus, weights, tie_mode, max_iters, workers).run(c0)
