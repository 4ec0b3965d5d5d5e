"""Code for reading process-level settings from the environment."""

import os
from typing import Mapping, Optional, cast

import torch
from typing_extensions import TypedDict

ENV_PREFIX = "EXEMPLAR_SYNTH_"


class ExemplarSynthSettings(TypedDict):
    """Dictionary defining the shape of the runtime settings.

    All settings are optional and have defaults as described in their docstrings and
    defined in `DEFAULT_SETTINGS`. Each one can be overridden by an environment
    variable named `EXEMPLAR_SYNTH_<KEY>`.

    None of these enter the config hash: they change where and how a run executes,
    never what it computes.
    """

    #: Torch device to run on. "auto" picks cuda when available.
    DEVICE: str

    #: Level passed to `logging.basicConfig` by the command line.
    LOG_LEVEL: str

    #: If True, long loops display tqdm progress bars.
    PROGRESS_BAR: bool

    #: If True, cudnn is put in deterministic mode and benchmarking is disabled.
    DETERMINISTIC: bool

    #: File name of the machine readable metric ledger written by `evaluate`.
    RESULTS_LEDGER: str


DEFAULT_SETTINGS = ExemplarSynthSettings(
    DEVICE="auto",
    LOG_LEVEL="INFO",
    PROGRESS_BAR=True,
    DETERMINISTIC=True,
    RESULTS_LEDGER="results.jsonl",
)

_TRUE_VALUES = {"1", "true", "yes", "on"}


def _from_env(environ: Mapping[str, str]) -> dict:
    overrides = {}
    for key, default in DEFAULT_SETTINGS.items():
        raw = environ.get(f"{ENV_PREFIX}{key}")
        if raw is None:
            continue

        if isinstance(default, bool):
            overrides[key] = raw.strip().lower() in _TRUE_VALUES
        else:
            overrides[key] = raw.strip()

    return overrides


def exemplar_synth_settings(
    environ: Optional[Mapping[str, str]] = None,
) -> ExemplarSynthSettings:
    """Get exemplar-synth settings.

    Return `DEFAULT_SETTINGS` updated with any `EXEMPLAR_SYNTH_*` variables found
    in the environment.

    Preferred to direct environment access for the type hints and defaults.
    """
    defaults = DEFAULT_SETTINGS
    return cast(
        ExemplarSynthSettings,
        {**defaults, **_from_env(os.environ if environ is None else environ)},
    )


def resolve_device(settings: Optional[ExemplarSynthSettings] = None) -> torch.device:
    device = (settings or exemplar_synth_settings())["DEVICE"]
    if device == "auto":
        device = "cuda" if torch.cuda.is_available() else "cpu"

    return torch.device(device)
