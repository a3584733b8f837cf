"""
Single entry point over the management commands.

    run(['crossval', 'corpus.jsonl', '-k', '5', '--methods', 'random,lsq,lsq+hillclimb'])

Exit codes: 0 success, 1 usage error, 2 data error.
"""

import os
import sys
from typing import Optional, Sequence

SUBCOMMANDS = {
    'train': 'train',
    'evaluate': 'evaluate',
    'crossval': 'crossval',
    'compare': 'compare',
    'colloc-stats': 'colloc_stats',
    'synth': 'synth',
    'score': 'score',
    'validate': 'validate',
    'convert': 'convert',
}

USAGE = f"usage: prefscale {{{','.join(SUBCOMMANDS)}}} [options]"


def _setup_django():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'preference_scaling.settings')
    import django
    django.setup()


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in SUBCOMMANDS:
        sys.stderr.write(USAGE + '\n')
        if argv and argv[0] not in ('-h', '--help'):
            sys.stderr.write(f"unknown subcommand {argv[0]!r}\n")
        return 1

    _setup_django()
    from django.core.management import call_command
    from django.core.management.base import CommandError

    try:
        call_command(SUBCOMMANDS[argv[0]], *argv[1:])
    except CommandError as e:
        sys.stderr.write(f"{argv[0]}: {e}\n")
        return e.returncode
    return 0


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
