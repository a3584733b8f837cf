"""Small hand-built corpora shared by the test modules."""

import shutil
import tempfile
from pathlib import Path

from disambiguation.corpus import Analysis, Constituent, Corpus, Sentence, SkeletalTree, Triple


def spans(*pairs, label='P'):
    return tuple(Constituent(s, e, label) for s, e in pairs)


def make_analysis(aid, span_pairs=(), features=None, triples=(), rules=()):
    return Analysis(
        id=aid,
        spans=spans(*span_pairs),
        triples=tuple(Triple(*t) for t in triples),
        rules=tuple(rules),
        features=dict(features or {}),
    )


def make_sentence(sid, n_tokens, gold, analyses):
    return Sentence(sid, tuple(f'w{i}' for i in range(n_tokens)), SkeletalTree(spans(*gold)), tuple(analyses))


def make_corpus(function_names, sentences, class_map=None):
    return Corpus(tuple(function_names), tuple(sentences), dict(class_map or {}))


GOLD = ((0, 3), (1, 3))
WRONG = ((0, 3), (0, 2))


def binary_sentence(sid, correct_features, wrong_features, correct_first=True, triples=((), ())):
    """Three-token sentence with one correct and one incorrect analysis."""
    good = make_analysis('good', GOLD, correct_features, triples[0])
    bad = make_analysis('bad', WRONG, wrong_features, triples[1])
    return make_sentence(sid, 3, GOLD, (good, bad) if correct_first else (bad, good))


def worked_example_sentence():
    """
    Three analyses with training scores 10, 10, 4 under weights (1, 0, 0):
    the first two share all ten gold spans, the third only four.
    """
    gold = tuple((0, e) for e in range(11, 1, -1))
    return make_sentence('worked', 11, gold, (
        make_analysis('q1', gold, {'phi': 16, 'f1': 8, 'f2': 4}),
        make_analysis('q2', gold, {'phi': 16, 'f1': 6, 'f2': 10}),
        make_analysis('q3', gold[:4], {'phi': 10, 'f1': 2, 'f2': 12}),
    ))


class TempDirMixin:
    def setUp(self):
        super().setUp()
        self.tmp = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)
        super().tearDown()
