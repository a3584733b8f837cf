"""
Corpus data model and the line-delimited corpus format.

A corpus file starts with a header record declaring the preference function
names (and optionally a head-symbol class map), followed by one JSON record
per sentence:

    {"function_names": ["Low1", "Low2"], "class_map": {"dinner_Meal": "cc_SpecificMeal"}}
    {"id": "s1", "tokens": [...], "gold": [[0, 7, "P"], ...],
     "analyses": [{"id": "QH", "spans": [[0, 7, "P"], ...],
                   "triples": [["get_Acquire", "on", "flight_AirplaneTrip"]],
                   "rules": ["s_np_vp"], "features": {"Low1": -9.08}}]}
"""

import json
import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .exceptions import CorpusError

logger = logging.getLogger(__name__)

LABELS = ('A', 'P')


@dataclass(frozen=True)
class Constituent:
    start: int
    end: int
    label: Optional[str] = None

    @property
    def span(self) -> Tuple[int, int]:
        return (self.start, self.end)

    def to_record(self) -> list:
        return [self.start, self.end, self.label]


@dataclass(frozen=True)
class SkeletalTree:
    """Gold tree stored flat as its set of constituents."""
    constituents: Tuple[Constituent, ...] = ()

    @property
    def spans(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset(c.span for c in self.constituents)


@dataclass(frozen=True)
class Triple:
    h1: str
    r: str
    h2: str

    def to_record(self) -> list:
        return [self.h1, self.r, self.h2]

    def __str__(self):
        return f"({self.h1},{self.r},{self.h2})"


@dataclass(frozen=True)
class Analysis:
    id: str
    spans: Tuple[Constituent, ...] = ()
    triples: Tuple[Triple, ...] = ()
    rules: Tuple[str, ...] = ()
    features: Dict[str, float] = field(default_factory=dict)

    @property
    def span_set(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset(c.span for c in self.spans)

    def feature(self, name: str) -> float:
        """Raw score of a preference function; missing functions score 0."""
        return self.features.get(name, 0.0)

    def to_record(self) -> dict:
        return {
            'id': self.id,
            'spans': [c.to_record() for c in self.spans],
            'triples': [t.to_record() for t in self.triples],
            'rules': list(self.rules),
            'features': dict(self.features),
        }


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: Tuple[str, ...]
    gold: SkeletalTree
    analyses: Tuple[Analysis, ...]

    def __len__(self):
        return len(self.tokens)

    def analysis(self, analysis_id: str) -> Analysis:
        for a in self.analyses:
            if a.id == analysis_id:
                return a
        raise KeyError(analysis_id)

    def to_record(self) -> dict:
        return {
            'id': self.id,
            'tokens': list(self.tokens),
            'gold': [c.to_record() for c in self.gold.constituents],
            'analyses': [a.to_record() for a in self.analyses],
        }


@dataclass(frozen=True)
class Corpus:
    function_names: Tuple[str, ...]
    sentences: Tuple[Sentence, ...]
    class_map: Dict[str, str] = field(default_factory=dict)

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def sentence_ids(self) -> List[str]:
        return [s.id for s in self.sentences]

    def subset(self, sentence_ids: Iterable[str]) -> 'Corpus':
        """Corpus restricted to the given ids, keeping corpus order."""
        wanted = set(sentence_ids)
        return replace(self, sentences=tuple(s for s in self.sentences if s.id in wanted))

    def with_features(self, function_names: Sequence[str], values: Dict[Tuple[str, str], Dict[str, float]]) -> 'Corpus':
        """
        Return a copy with extra feature values merged into each analysis.

        values maps (sentence id, analysis id) to {function name: raw score};
        function_names are appended to the declared names if not present.
        """
        names = list(self.function_names) + [n for n in function_names if n not in self.function_names]
        sentences = []
        for s in self.sentences:
            analyses = []
            for a in s.analyses:
                extra = values.get((s.id, a.id))
                analyses.append(replace(a, features={**a.features, **extra}) if extra else a)
            sentences.append(replace(s, analyses=tuple(analyses)))
        return replace(self, function_names=tuple(names), sentences=tuple(sentences))

    def header_record(self) -> dict:
        return {'function_names': list(self.function_names), 'class_map': dict(self.class_map)}


# Parsing

def _list_field(record, key, line, sentence_id, default=None):
    value = record.get(key, default)
    if not isinstance(value, list):
        raise CorpusError(f"{key} must be a list, got {value!r}", line, sentence_id)
    return value


def _constituent(item, line, sentence_id) -> Constituent:
    if not isinstance(item, (list, tuple)) or len(item) not in (2, 3):
        raise CorpusError(f"span must be [start, end, label], got {item!r}", line, sentence_id)
    start, end = item[0], item[1]
    label = item[2] if len(item) == 3 else None
    if not isinstance(start, int) or not isinstance(end, int) or isinstance(start, bool):
        raise CorpusError(f"span bounds must be integers, got {item!r}", line, sentence_id)
    if label is not None and label not in LABELS:
        raise CorpusError(f"span label must be one of {LABELS}, got {label!r}", line, sentence_id)
    return Constituent(start, end, label)


def _triple(item, line, sentence_id) -> Triple:
    if not isinstance(item, (list, tuple)) or len(item) != 3:
        raise CorpusError(f"triple must be [h1, r, h2], got {item!r}", line, sentence_id)
    return Triple(*(str(x) for x in item))


def _analysis(record, line, sentence_id) -> Analysis:
    if not isinstance(record, dict) or 'id' not in record:
        raise CorpusError("analysis record needs an 'id'", line, sentence_id)
    features = record.get('features', {})
    if not isinstance(features, dict):
        raise CorpusError(f"features of analysis {record['id']!r} must be an object", line, sentence_id)
    try:
        features = {str(k): float(v) for k, v in features.items()}
    except (TypeError, ValueError) as exc:
        raise CorpusError(f"non-numeric feature in analysis {record['id']!r}: {exc}", line, sentence_id)
    spans, triples, rules = (_list_field(record, key, line, sentence_id, []) for key in ('spans', 'triples', 'rules'))
    return Analysis(
        id=str(record['id']),
        spans=tuple(_constituent(c, line, sentence_id) for c in spans),
        triples=tuple(_triple(t, line, sentence_id) for t in triples),
        rules=tuple(str(r) for r in rules),
        features=features,
    )


def sentence_from_record(record, line=None) -> Sentence:
    if not isinstance(record, dict):
        raise CorpusError("sentence record must be an object", line)
    missing = [k for k in ('id', 'tokens', 'gold', 'analyses') if k not in record]
    if missing:
        raise CorpusError(f"missing fields {missing}", line, record.get('id'))
    sentence_id = str(record['id'])
    tokens, gold, analyses = (_list_field(record, key, line, sentence_id) for key in ('tokens', 'gold', 'analyses'))
    return Sentence(
        id=sentence_id,
        tokens=tuple(str(t) for t in tokens),
        gold=SkeletalTree(tuple(_constituent(c, line, sentence_id) for c in gold)),
        analyses=tuple(_analysis(a, line, sentence_id) for a in analyses),
    )


def _parse_line(text, line):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"malformed record: {exc.msg}", line)


def parse_corpus(lines: Iterable[str], strict: bool = True) -> Corpus:
    """
    Parse corpus text lines, enforcing every invariant validate() checks.

    With strict=False only malformed records are rejected; invariant
    violations are left for validate() to report.
    """
    header = None
    sentences = []
    seen_ids = set()
    for line_no, text in enumerate(lines, start=1):
        if not text.strip():
            continue
        record = _parse_line(text, line_no)
        if header is None:
            if not isinstance(record, dict) or 'function_names' not in record:
                raise CorpusError("first record must declare function_names", line_no)
            header = record
            names = [str(n) for n in _list_field(header, 'function_names', line_no, None)]
            if len(set(names)) != len(names):
                raise CorpusError("function_names must be unique", line_no)
            continue
        sentence = sentence_from_record(record, line_no)
        if strict and sentence.id in seen_ids:
            raise CorpusError("duplicate sentence id", line_no, sentence.id)
        seen_ids.add(sentence.id)
        problems = sentence_violations(sentence, names) if strict else None
        if problems:
            raise CorpusError(problems[0], line_no, sentence.id)
        sentences.append(sentence)
    if header is None:
        raise CorpusError("empty corpus file: no header record")
    class_map = header.get('class_map') or {}
    if not isinstance(class_map, dict):
        raise CorpusError("class_map must be an object", 1)
    return Corpus(tuple(names), tuple(sentences), {str(k): str(v) for k, v in class_map.items()})


def load_corpus(path, strict: bool = True) -> Corpus:
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus file not found: {path}")
    with path.open(encoding='utf-8') as fh:
        corpus = parse_corpus(fh, strict)
    logger.info("Loaded %d sentences, %d functions from %s",
                len(corpus), len(corpus.function_names), path)
    return corpus


def corpus_lines(corpus: Corpus) -> List[str]:
    records = [corpus.header_record()] + [s.to_record() for s in corpus.sentences]
    return [json.dumps(r, ensure_ascii=False) for r in records]


def dump_corpus(corpus: Corpus, path) -> Path:
    path = Path(path)
    with path.open('w', encoding='utf-8', newline='\n') as fh:
        for text in corpus_lines(corpus):
            fh.write(text + '\n')
    return path


# Class map

def apply_class_map(corpus: Corpus) -> Corpus:
    """Replace head symbols of every triple by their class symbol, if mapped."""
    if not corpus.class_map:
        return corpus
    cmap = corpus.class_map

    def mapped(t: Triple) -> Triple:
        return Triple(cmap.get(t.h1, t.h1), t.r, cmap.get(t.h2, t.h2))

    sentences = tuple(
        replace(s, analyses=tuple(replace(a, triples=tuple(mapped(t) for t in a.triples)) for a in s.analyses))
        for s in corpus.sentences
    )
    return replace(corpus, sentences=sentences)


# Validation

def _span_problems(constituents, n_tokens, owner) -> List[str]:
    problems = []
    for c in constituents:
        if not 0 <= c.start < c.end <= n_tokens:
            problems.append(f"{owner}: span ({c.start},{c.end}) out of range for {n_tokens} tokens")
    return problems


def _nesting_problems(constituents, owner) -> List[str]:
    problems = []
    spans = [c.span for c in constituents]
    if len(set(spans)) != len(spans):
        problems.append(f"{owner}: duplicate constituent spans")
    ordered = sorted(set(spans))
    for i, (s1, e1) in enumerate(ordered):
        for s2, e2 in ordered[i + 1:]:
            if s2 >= e1:
                break
            if s1 < s2 and e2 > e1:
                problems.append(f"{owner}: constituents ({s1},{e1}) and ({s2},{e2}) partially overlap")
    return problems


def sentence_violations(sentence: Sentence, function_names: Sequence[str]) -> List[str]:
    problems = []
    declared = set(function_names)
    if not sentence.tokens:
        problems.append(f"sentence {sentence.id}: no tokens")
    if not sentence.analyses:
        problems.append(f"sentence {sentence.id}: no analyses")
    n = len(sentence.tokens)
    owner = f"sentence {sentence.id} gold"
    problems += _span_problems(sentence.gold.constituents, n, owner)
    problems += _nesting_problems(sentence.gold.constituents, owner)
    ids = [a.id for a in sentence.analyses]
    if len(set(ids)) != len(ids):
        problems.append(f"sentence {sentence.id}: duplicate analysis ids")
    for a in sentence.analyses:
        owner = f"sentence {sentence.id} analysis {a.id}"
        problems += _span_problems(a.spans, n, owner)
        undeclared = sorted(set(a.features) - declared)
        if undeclared:
            problems.append(f"{owner}: undeclared feature names {undeclared}")
        for t in a.triples:
            if not (t.h1 and t.r and t.h2):
                problems.append(f"{owner}: triple {t} has an empty field")
    return problems


def validate(corpus: Corpus) -> List[str]:
    """Every invariant violation in the corpus; empty when well formed."""
    problems = []
    if len(set(corpus.function_names)) != len(corpus.function_names):
        problems.append("corpus: function_names are not unique")
    ids = corpus.sentence_ids
    if len(set(ids)) != len(ids):
        problems.append("corpus: duplicate sentence ids")
    for s in corpus.sentences:
        problems += sentence_violations(s, corpus.function_names)
    return problems


# Bracketed tree notation, e.g. "(P do (A I) get (A dinner) (P on (A this flight)))"

_TOKEN_RE = re.compile(r'\(|\)|[^\s()]+')


def parse_bracketed_tree(text: str) -> Tuple[Tuple[str, ...], SkeletalTree]:
    """Read a labelled bracketed tree into its tokens and flat constituent set."""
    tokens: List[str] = []
    constituents: List[Constituent] = []
    stack: List[Tuple[int, str]] = []
    pieces = _TOKEN_RE.findall(text)
    i = 0
    while i < len(pieces):
        piece = pieces[i]
        if piece == '(':
            if i + 1 >= len(pieces) or pieces[i + 1] not in LABELS:
                raise CorpusError(f"bracket at piece {i} must be followed by a label in {LABELS}")
            stack.append((len(tokens), pieces[i + 1]))
            i += 2
            continue
        if piece == ')':
            if not stack:
                raise CorpusError("unbalanced ')' in bracketed tree")
            start, label = stack.pop()
            if start == len(tokens):
                raise CorpusError("empty constituent in bracketed tree")
            constituents.append(Constituent(start, len(tokens), label))
        else:
            tokens.append(piece)
        i += 1
    if stack:
        raise CorpusError("unbalanced '(' in bracketed tree")
    constituents.sort(key=lambda c: (c.start, -c.end))
    return tuple(tokens), SkeletalTree(tuple(constituents))
