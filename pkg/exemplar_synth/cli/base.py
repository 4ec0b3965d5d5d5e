from __future__ import annotations

import abc
import argparse
import logging
import sys
from pathlib import Path
from typing import IO, Any, ClassVar, Dict, Optional

from exemplar_synth.config import (
    TrainConfig,
    apply_overrides,
    default_config,
    ensure_valid,
    load_config,
    save_config,
)
from exemplar_synth.exceptions import ExemplarSynthError
from exemplar_synth.settings import ExemplarSynthSettings, exemplar_synth_settings

logger = logging.getLogger(__name__)

RESOLVED_CONFIG_NAME = "resolved-config.txt"


class CommandError(ExemplarSynthError):
    """Bad command line usage: unknown verb or flag, or a missing argument."""

    kind = "usage"
    exit_code = 2


class ArgumentParser(argparse.ArgumentParser):
    """`argparse` parser that raises `CommandError` instead of exiting."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise CommandError(message)


class BaseCommand(abc.ABC):
    """One `exemplar-synth` verb.

    Subclasses declare `name` and `help`, add their own flags in
    `add_arguments` and do the work in `handle`. `--config`, `--set`, `--seed`
    and `--out` are shared by every command; the resolved config is written to
    the output directory before `handle` runs.
    """

    name: ClassVar[str]
    help: ClassVar[str]
    #: Whether `--out` names a directory that receives the resolved config.
    writes_out_dir: ClassVar[bool] = True

    def __init__(
        self,
        stdout: Optional[IO[str]] = None,
        settings: Optional[ExemplarSynthSettings] = None,
    ):
        self.stdout = stdout or sys.stdout
        self.settings = settings or exemplar_synth_settings()

    def add_arguments(self, parser: argparse.ArgumentParser):
        pass

    def register(self, subparsers: Any) -> argparse.ArgumentParser:
        parser = subparsers.add_parser(self.name, help=self.help, description=self.help)
        parser.add_argument(
            "--config",
            dest="config_path",
            type=Path,
            help="Config document to start from",
        )
        parser.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="Override one dotted config key; may be repeated",
        )
        parser.add_argument(
            "--seed",
            type=int,
            help="Shorthand for seed, sampler.seed and toy.seed",
        )
        parser.add_argument("--out", type=Path, required=True, help="Output directory")
        self.add_arguments(parser)
        parser.set_defaults(command=self)
        return parser

    def base_config(self) -> TrainConfig:
        return default_config()

    def resolve_config(self, options: Dict[str, Any]) -> TrainConfig:
        path = options.get("config_path")
        config = load_config(path) if path is not None else self.base_config()
        config = apply_overrides(config, options.get("overrides") or [])

        seed = options.get("seed")
        if seed is not None:
            config = apply_overrides(
                config,
                [f"seed={seed}", f"sampler.seed={seed}", f"toy.seed={seed}"],
            )

        return ensure_valid(config)

    def execute(self, options: Dict[str, Any]):
        config = self.resolve_config(options)
        out: Path = options["out"]
        if self.writes_out_dir:
            out.mkdir(parents=True, exist_ok=True)
            save_config(config, out / RESOLVED_CONFIG_NAME)

        logger.debug("Running %s with output in %s", self.name, out)
        self.handle(config, **options)

    @abc.abstractmethod
    def handle(self, config: TrainConfig, **options: Any): ...

    def write(self, line: str):
        self.stdout.write(line + "\n")
