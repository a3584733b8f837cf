import json
from dataclasses import replace
from pathlib import Path

from disambiguation.conf import output_path
from disambiguation.corpus import dump_corpus, load_corpus, parse_bracketed_tree
from disambiguation.exceptions import CorpusError

from ._base import PreferenceCommand


def read_trees(path):
    """Sentence id -> (tokens, tree) from lines of '<id><TAB><bracketed tree>'."""
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"trees file not found: {path}")
    trees = {}
    for line_no, line in enumerate(path.read_text(encoding='utf-8').splitlines(), start=1):
        if not line.strip():
            continue
        sentence_id, sep, text = line.partition('\t')
        if not sep:
            raise CorpusError("expected '<id><TAB><tree>'", line_no)
        try:
            trees[sentence_id.strip()] = parse_bracketed_tree(text)
        except CorpusError as e:
            raise CorpusError(e.args[0], line_no, sentence_id.strip())
    return trees


class Command(PreferenceCommand):
    help = 'Convert bracketed gold trees into corpus records, optionally attaching them to a corpus'

    def add_arguments(self, parser):
        parser.add_argument('trees', help="File of '<id><TAB>(P ... (A ...))' lines")
        parser.add_argument('-o', '--output', default='gold.jsonl', help='File to write')
        parser.add_argument('--corpus', help='Corpus whose gold trees are replaced by the converted ones')

    def handle(self, *args, **options):
        trees = read_trees(options['trees'])
        path = output_path(options['output'])

        if not options['corpus']:
            with path.open('w', encoding='utf-8', newline='\n') as fh:
                for sentence_id, (tokens, tree) in trees.items():
                    record = {'id': sentence_id, 'tokens': list(tokens),
                              'gold': [c.to_record() for c in tree.constituents]}
                    fh.write(json.dumps(record, ensure_ascii=False) + '\n')
            self.stdout.write(self.style.SUCCESS(f'{len(trees)} gold trees written to {path}'))
            return

        corpus = load_corpus(options['corpus'])
        sentences = []
        for s in corpus.sentences:
            if s.id in trees:
                tokens, tree = trees[s.id]
                if tokens != s.tokens:
                    raise CorpusError("tree tokens differ from the corpus tokens", sentence_id=s.id)
                s = replace(s, gold=tree)
            sentences.append(s)
        missing = sorted(set(trees) - set(corpus.sentence_ids))
        if missing:
            self.stdout.write(self.style.WARNING(f'{len(missing)} trees have no sentence in the corpus'))
        dump_corpus(replace(corpus, sentences=tuple(sentences)), path)
        self.stdout.write(self.style.SUCCESS(f'Corpus with {len(trees) - len(missing)} new gold trees written to {path}'))
