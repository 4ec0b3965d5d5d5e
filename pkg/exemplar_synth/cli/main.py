"""`exemplar-synth` command line entry point.

Every verb exits 0 on success. Failures print one tab separated line
`error<TAB><kind><TAB><message>` on stderr and exit with the error's code:
2 for usage errors, 3 for configuration errors and 1 otherwise.
"""

from __future__ import annotations

import logging
import sys
from typing import IO, List, Optional, Sequence

from exemplar_synth.exceptions import ExemplarSynthError
from exemplar_synth.settings import ExemplarSynthSettings, exemplar_synth_settings

from .base import ArgumentParser, CommandError
from .commands import COMMAND_MODULES

logger = logging.getLogger(__name__)

PROG = "exemplar-synth"


def build_parser(
    stdout: Optional[IO[str]] = None,
    settings: Optional[ExemplarSynthSettings] = None,
) -> ArgumentParser:
    parser = ArgumentParser(
        prog=PROG,
        description="Exemplar-guided, style-consistent image synthesis",
    )
    subparsers = parser.add_subparsers(dest="verb", metavar="VERB")
    subparsers.required = True
    for module in COMMAND_MODULES:
        module.Command(stdout=stdout, settings=settings).register(subparsers)
    return parser


def format_error(error: ExemplarSynthError) -> str:
    message = " ".join(error.message.split())
    return f"error\t{error.kind}\t{message}"


def run(
    argv: Sequence[str],
    *,
    stdout: Optional[IO[str]] = None,
    stderr: Optional[IO[str]] = None,
) -> int:
    stderr = stderr or sys.stderr
    settings = exemplar_synth_settings()
    logging.basicConfig(
        level=settings["LOG_LEVEL"].upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        parser = build_parser(stdout=stdout, settings=settings)
        options = vars(parser.parse_args(list(argv)))
        command = options.pop("command")
        command.execute(options)
    except ExemplarSynthError as e:
        if e.suggestion and not isinstance(e, CommandError):
            logger.info("Hint: %s", e.suggestion)
        stderr.write(format_error(e) + "\n")
        return e.exit_code
    except SystemExit as e:
        # `--help` exits through argparse
        return e.code if isinstance(e.code, int) else 0

    return 0


def main(argv: Optional[List[str]] = None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
