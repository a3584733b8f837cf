from disambiguation.corpus import load_corpus
from disambiguation.evaluation import rank
from disambiguation.goldscore import exact_match

from ._base import PreferenceCommand
from .evaluate import trained_from_files


class Command(PreferenceCommand):
    help = 'Rank the analyses of every sentence under a factors file'

    def add_arguments(self, parser):
        parser.add_argument('corpus', help='Corpus file')
        parser.add_argument('factors', help='Factors file')
        parser.add_argument('--models', help='Trained models file for derived functions')
        parser.add_argument('--top', type=int, help='Show only the N best analyses per sentence')
        parser.add_argument('--functions', help='Comma-separated subset of declared functions to use')
        self.add_weight_arguments(parser)
        self.add_machine_argument(parser)

    def handle(self, *args, **options):
        trained = trained_from_files(self, options, options['factors'])
        corpus = trained.prepare(load_corpus(options['corpus']))

        records = []
        for sentence in corpus.sentences:
            ranking = rank(sentence, trained.factors, corpus.function_names)
            if options['top']:
                ranking = ranking[:options['top']]
            records.append({
                'sentence_id': sentence.id,
                'ranking': [
                    {'analysis_id': aid, 'score': score, 'correct': exact_match(sentence.analysis(aid), sentence.gold)}
                    for aid, score in ranking
                ],
            })

        if options['machine']:
            self.emit_json(records)
            return
        for record in records:
            self.stdout.write(record['sentence_id'])
            for item in record['ranking']:
                mark = '*' if item['correct'] else ' '
                self.stdout.write(f"  {mark} {item['analysis_id']:<12} {item['score']: .4f}")
