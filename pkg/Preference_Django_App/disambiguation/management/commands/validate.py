from django.core.management.base import CommandError

from disambiguation.corpus import load_corpus, validate

from ._base import DATA_ERROR, PreferenceCommand


class Command(PreferenceCommand):
    help = 'Check a corpus file and list every invariant violation'

    def add_arguments(self, parser):
        parser.add_argument('corpus', help='Corpus file')
        self.add_machine_argument(parser)

    def handle(self, *args, **options):
        corpus = load_corpus(options['corpus'], strict=False)
        problems = validate(corpus)
        if options['machine']:
            self.emit_json({'sentences': len(corpus), 'violations': problems})
        else:
            for problem in problems:
                self.stdout.write(self.style.WARNING(problem))
        if problems:
            raise CommandError(f'{len(problems)} violations in {options["corpus"]}', returncode=DATA_ERROR)
        if not options['machine']:
            self.stdout.write(self.style.SUCCESS(f'{len(corpus)} sentences, no violations'))
