"""
Seeded synthetic corpora with planted ground truth.

Each sentence gets a random binary gold tree, one analysis matching it and
distractors whose spans are edits of it. Feature vectors of a distractor are
those of the correct analysis moved against the planted weights (further the
worse its spans) plus zero-mean noise, so with noise_scale = 0 the planted
weights decide every sentence correctly. Head symbols follow a Zipf law and
each (h1, r) pair has a preferred h2; distractor triples swap in a
dispreferred h2 with probability triple_signal.
"""

import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from .corpus import Analysis, Constituent, Corpus, Sentence, SkeletalTree, Triple
from .exceptions import SynthConfigError

logger = logging.getLogger(__name__)

ZIPF_EXPONENT = 1.1


@dataclass(frozen=True)
class SynthConfig:
    n_sentences: int = 200
    min_analyses: int = 2
    max_analyses: int = 6
    n_functions: int = 5
    planted_weights: Optional[Tuple[float, ...]] = None
    noise_scale: float = 0.0
    margin: float = 1.0
    n_heads: int = 60
    n_relations: int = 5
    n_rules: int = 20
    n_words: int = 500
    triple_signal: float = 0.8
    min_tokens: int = 4
    max_tokens: int = 15
    n_classes: int = 0
    seed: int = 0

    def __post_init__(self):
        problems = []
        if self.n_sentences < 1:
            problems.append("n_sentences must be at least 1")
        if self.min_analyses < 2 or self.max_analyses < self.min_analyses:
            problems.append("analyses per sentence must satisfy 2 <= min_analyses <= max_analyses")
        if self.n_functions < 1:
            problems.append("n_functions must be at least 1")
        if self.planted_weights is not None:
            if len(self.planted_weights) != self.n_functions:
                problems.append(f"planted_weights needs {self.n_functions} values")
            elif not any(self.planted_weights):
                problems.append("planted_weights must not be all zero")
        if self.noise_scale < 0 or self.margin <= 0:
            problems.append("noise_scale must be nonnegative and margin positive")
        if not 0.0 <= self.triple_signal <= 1.0:
            problems.append("triple_signal must lie in [0, 1]")
        if self.min_tokens < 2:
            problems.append("min_tokens must be at least 2; a one-token sentence has no distractor trees")
        if self.max_tokens < self.min_tokens:
            problems.append("max_tokens must be at least min_tokens")
        if self.n_heads < 2 or self.n_relations < 1 or self.n_rules < 2 or self.n_words < 1:
            problems.append("vocabularies need n_heads >= 2, n_relations >= 1, n_rules >= 2, n_words >= 1")
        if self.n_classes < 0:
            problems.append("n_classes must be nonnegative")
        if problems:
            raise SynthConfigError('; '.join(problems))

    @classmethod
    def from_mapping(cls, values: Dict[str, str]) -> 'SynthConfig':
        """Build a config from string values, as read from a key=value file or flags."""
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in types:
                raise SynthConfigError(f"unknown synth setting {key!r}")
            raw = str(raw).strip()
            try:
                if key == 'planted_weights':
                    kwargs[key] = tuple(float(v) for v in raw.split(',') if v.strip())
                elif types[key] in (int, 'int'):
                    kwargs[key] = int(raw)
                else:
                    kwargs[key] = float(raw)
            except ValueError:
                raise SynthConfigError(f"invalid value for {key}: {raw!r}")
        return cls(**kwargs)


def read_config_file(path) -> Dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise SynthConfigError(f"synth config file not found: {path}")
    values = {}
    for line_no, line in enumerate(path.read_text(encoding='utf-8').splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise SynthConfigError(f"{path}:{line_no}: expected key=value")
        key, value = line.split('=', 1)
        values[key.strip()] = value.strip()
    return values


def function_names(cfg: SynthConfig) -> Tuple[str, ...]:
    return tuple(f'F{j + 1}' for j in range(cfg.n_functions))


def planted_weights(cfg: SynthConfig) -> np.ndarray:
    if cfg.planted_weights is not None:
        return np.array(cfg.planted_weights, dtype=float)
    w = np.random.default_rng(cfg.seed).normal(size=cfg.n_functions)
    return np.where(w == 0, 1.0, w)


def _zipf(n: int) -> np.ndarray:
    p = 1.0 / np.arange(1, n + 1) ** ZIPF_EXPONENT
    return p / p.sum()


def _head(k: int) -> str:
    return f'h{k}_Sym'


def _random_tree(rng, n: int) -> Dict[Tuple[int, int], str]:
    spans = {}
    stack = [(0, n)]
    while stack:
        s, e = stack.pop()
        spans[(s, e)] = 'P' if rng.random() < 0.5 else 'A'
        if e - s >= 2:
            k = int(rng.integers(s + 1, e))
            stack.extend(child for child in ((s, k), (k, e)) if child[1] - child[0] >= 2)
    return spans


def _edit_tree(rng, gold: Dict[Tuple[int, int], str], n: int) -> Dict[Tuple[int, int], str]:
    spans = dict(gold)
    for _ in range(int(rng.integers(1, 4))):
        inner = sorted(sp for sp in spans if sp != (0, n))
        op = rng.integers(3)
        if op == 0 and inner:
            del spans[inner[rng.integers(len(inner))]]
        elif op == 1 and inner:
            s, e = inner[rng.integers(len(inner))]
            label = spans.pop((s, e))
            if rng.random() < 0.5:
                s = min(max(0, s + (1 if rng.random() < 0.5 else -1)), e - 1)
            else:
                e = max(min(n, e + (1 if rng.random() < 0.5 else -1)), s + 1)
            spans[(s, e)] = label
        else:
            s = int(rng.integers(0, n))
            e = int(rng.integers(s + 1, n + 1))
            spans.setdefault((s, e), 'A')
    if set(spans) == set(gold):
        # first span absent from gold; one always exists for n >= 2
        extra = next((s, e) for s in range(n) for e in range(s + 1, n + 1) if (s, e) not in gold)
        spans[extra] = 'A'
    return spans


def _constituents(spans: Dict[Tuple[int, int], str]) -> Tuple[Constituent, ...]:
    return tuple(Constituent(s, e, spans[(s, e)]) for s, e in sorted(spans, key=lambda sp: (sp[0], -sp[1])))


class _Vocabulary:
    """Head distribution and preferred-h2 table shared by all sentences of a corpus."""

    def __init__(self, cfg: SynthConfig):
        rng = np.random.default_rng([cfg.seed, 1])
        self.cfg = cfg
        self.p = _zipf(cfg.n_heads)
        self.preferred = rng.choice(cfg.n_heads, size=(cfg.n_heads, cfg.n_relations), p=self.p)

    def good_triple(self, rng) -> Tuple[int, int, int]:
        h1 = int(rng.choice(self.cfg.n_heads, p=self.p))
        r = int(rng.integers(self.cfg.n_relations))
        return h1, r, int(self.preferred[h1, r])

    def bad_triple(self, rng, h1: int, r: int) -> Tuple[int, int, int]:
        while True:
            h2 = int(rng.choice(self.cfg.n_heads, p=self.p))
            if h2 != self.preferred[h1, r]:
                return h1, r, h2

    @staticmethod
    def triple(h1: int, r: int, h2: int) -> Triple:
        return Triple(_head(h1), f'rel{r}', _head(h2))


def _rules(rng, cfg: SynthConfig, count: int, good_share: float) -> Tuple[str, ...]:
    half = cfg.n_rules // 2
    picks = []
    for _ in range(count):
        if rng.random() < good_share:
            picks.append(int(rng.integers(half)))
        else:
            picks.append(int(rng.integers(half, cfg.n_rules)))
    return tuple(f'rule{k}' for k in picks)


def _sentence(cfg: SynthConfig, i: int, names, w: np.ndarray, vocab: _Vocabulary) -> Sentence:
    rng = np.random.default_rng([cfg.seed, 0, i])
    n = int(rng.integers(cfg.min_tokens, cfg.max_tokens + 1))
    tokens = tuple(f'w{k}' for k in rng.integers(cfg.n_words, size=n))
    gold = _random_tree(rng, n)

    n_analyses = int(rng.integers(cfg.min_analyses, cfg.max_analyses + 1))
    correct_at = int(rng.integers(n_analyses))
    f_correct = rng.normal(size=len(names))
    good = [vocab.good_triple(rng) for _ in range(int(rng.integers(1, max(2, n // 3) + 1)))]
    good_rule_share = 0.5 + 0.5 * cfg.triple_signal

    analyses = []
    for k in range(n_analyses):
        if k == correct_at:
            spans, features = gold, f_correct
            triples = [vocab.triple(*t) for t in good]
            rules = _rules(rng, cfg, len(gold), good_rule_share)
        else:
            spans = _edit_tree(rng, gold, n)
            badness = 0.5 * (1 + len(set(spans) ^ set(gold)))
            u = rng.uniform(0.5, 1.5)
            noise = rng.normal(scale=cfg.noise_scale, size=len(names))
            features = f_correct - w * u * badness * cfg.margin + noise
            triples = [vocab.triple(*(vocab.bad_triple(rng, h1, r) if rng.random() < cfg.triple_signal else (h1, r, h2)))
                       for h1, r, h2 in good]
            rules = _rules(rng, cfg, len(spans), 1.0 - good_rule_share)
        analyses.append(Analysis(
            id=f'a{k + 1}',
            spans=_constituents(spans),
            triples=tuple(triples),
            rules=rules,
            features={name: float(v) for name, v in zip(names, features)},
        ))
    return Sentence(f's{i + 1}', tokens, SkeletalTree(_constituents(gold)), tuple(analyses))


def generate(cfg: SynthConfig) -> Corpus:
    """Synthetic corpus; a pure function of cfg."""
    names = function_names(cfg)
    w = planted_weights(cfg)
    vocab = _Vocabulary(cfg)
    sentences = tuple(_sentence(cfg, i, names, w, vocab) for i in range(cfg.n_sentences))
    class_map = {_head(k): f'cc_Class{k % cfg.n_classes}' for k in range(cfg.n_heads)} if cfg.n_classes else {}
    logger.info("Generated %d synthetic sentences over %d functions (seed %d)",
                len(sentences), len(names), cfg.seed)
    return Corpus(names, sentences, class_map)
