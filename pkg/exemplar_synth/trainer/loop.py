from __future__ import annotations

import csv
import dataclasses
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence

import torch
from torchvision.utils import save_image
from tqdm import tqdm

from exemplar_synth.config import TrainConfig, ensure_valid, save_config
from exemplar_synth.exceptions import ConfigurationError, TrainingDivergenceError
from exemplar_synth.losses.perceptual import PerceptualExtractor
from exemplar_synth.networks.checkpoint import load_checkpoint, save_checkpoint
from exemplar_synth.networks.state import NetworkState, build_state
from exemplar_synth.settings import exemplar_synth_settings, resolve_device
from exemplar_synth.types import stack_images, stack_labels
from exemplar_synth.utils.imageio import label_to_rgb

from .schedule import Phase, PhaseSchedule
from .step import LossRecord, training_step
from .stream import TrainingStream

if TYPE_CHECKING:
    from exemplar_synth.corpus.base import Corpus
    from exemplar_synth.sampler import PairRecord
    from exemplar_synth.settings import ExemplarSynthSettings
    from exemplar_synth.types import TrainingSample
    from exemplar_synth.utils.typing import PathLike

logger = logging.getLogger(__name__)

LOSS_LOG_NAME = "losses.csv"
RESOLVED_CONFIG_NAME = "resolved-config.txt"
FINAL_CHECKPOINT_NAME = "final.ckpt"

#: Smoothing factor of the running loss averages.
RUNNING_DECAY = 0.99


def checkpoint_name(iteration: int) -> str:
    return f"ckpt-{iteration:08d}.ckpt"


@dataclasses.dataclass
class TrainState:
    """Progress of a training run.

    The sampler cursor is the iteration itself: batches are a pure function of
    the seed and the iteration.
    `running` is not stored in checkpoints; a resumed run rebuilds it from the
    `losses.csv` rows before the resume point and starts empty without them.
    """

    network: NetworkState
    schedule: PhaseSchedule
    running: Dict[str, float] = dataclasses.field(default_factory=dict)

    @property
    def iteration(self) -> int:
        return self.network.iteration

    @property
    def phase(self) -> Phase:
        return self.schedule.phase_at(min(self.iteration, self.schedule.total - 1))

    def update_running(self, record: LossRecord):
        for name in LossRecord.columns()[2:]:
            value = getattr(record, name)
            previous = self.running.get(name)
            self.running[name] = (
                value if previous is None else RUNNING_DECAY * previous + (1 - RUNNING_DECAY) * value
            )


@dataclasses.dataclass(frozen=True)
class TrainResult:
    checkpoint: Path
    iteration: int
    diverged: bool = False


def configure_determinism(deterministic: bool):
    torch.backends.cudnn.deterministic = deterministic
    torch.backends.cudnn.benchmark = not deterministic


def _open_loss_log(path: Path, resume_at: int):
    """Open the loss log for appending, dropping rows at or past `resume_at`.

    Returns the file, its writer and the records kept from earlier runs.
    """
    columns = LossRecord.columns()
    rows: List[List[str]] = []
    if resume_at and path.is_file():
        with path.open(newline="", encoding="utf-8") as f:
            rows = [row for row in csv.reader(f) if row and row[0] != columns[0]]
        rows = [row for row in rows if int(row[0]) < resume_at]

    f = path.open("w", newline="", encoding="utf-8")
    writer = csv.writer(f)
    writer.writerow(columns)
    writer.writerows(rows)
    return f, writer, [LossRecord.from_row(row) for row in rows]


@torch.no_grad()
def write_sample_grid(
    state: NetworkState,
    probes: Sequence[TrainingSample],
    path: PathLike,
):
    """Save one (x, I, G(x, I, F(I)), z) row per probe sample."""
    if not probes:
        return

    device = state.device
    x = stack_labels([p.x for p in probes]).to(device)
    exemplar = stack_images([p.exemplar for p in probes]).to(device)
    exemplar_labels = stack_labels([p.exemplar_labels for p in probes]).to(device)
    z = stack_images([p.z for p in probes]).to(device)
    fake = state.generator(x, exemplar, exemplar_labels)

    x_rgb = torch.stack([label_to_rgb(labels) for labels in x])
    rows = torch.stack([x_rgb, exemplar, fake, z], dim=1).flatten(0, 1)
    save_image(rows.cpu(), path, nrow=4, normalize=True, value_range=(-1, 1))


def train(
    config: TrainConfig,
    corpus: Corpus,
    pairs: Sequence[PairRecord],
    out_dir: PathLike,
    *,
    resume: Optional[PathLike] = None,
    until: Optional[int] = None,
    extractor: Optional[PerceptualExtractor] = None,
    settings: Optional[ExemplarSynthSettings] = None,
) -> TrainResult:
    """Train G, D_R and D_SC on `pairs` drawn from `corpus`.

    Checkpoints land in `out_dir` every `checkpoint_every` iterations, sample
    grids every `sample_every` iterations and one loss record per step in
    `losses.csv`. The run stops at the end of the schedule, or at `until`, and
    writes a checkpoint there (`final.ckpt` at the end of the schedule).
    Resuming from a checkpoint of the same config continues the exact same run.

    On divergence `diverged-<iteration>.ckpt` is written and the error re-raised.
    """
    ensure_valid(config)
    corpus.ensure_fits(config)

    settings = settings or exemplar_synth_settings()
    configure_determinism(settings["DETERMINISTIC"])
    device = resolve_device(settings)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "samples").mkdir(exist_ok=True)
    save_config(config, out_dir / RESOLVED_CONFIG_NAME)

    schedule = PhaseSchedule.from_config(config)
    stream = TrainingStream(corpus, pairs, config)
    network = build_state(config, device=device)
    if resume is not None:
        load_checkpoint(network, resume)
    state = TrainState(network, schedule)

    stop = schedule.total if until is None else until
    if not state.iteration <= stop <= schedule.total:
        raise ConfigurationError(
            f"Cannot train from iteration {state.iteration} until {stop} "
            f"(schedule ends at {schedule.total})",
        )

    if extractor is None:
        extractor = PerceptualExtractor.vgg16(
            config.perceptual.layers,
            config.perceptual.weights_path,
            config.perceptual.seed,
        )
    extractor = extractor.to(device)
    probes = stream.probes(config.probe_count)

    logger.info(
        "Training %s from iteration %d to %d on %s",
        network.config_hash,
        state.iteration,
        stop,
        device,
    )
    log_file, log, history = _open_loss_log(out_dir / LOSS_LOG_NAME, state.iteration)
    # running averages continue from the logged steps of a resumed run
    for record in history:
        state.update_running(record)
    phase = state.phase
    try:
        for _ in tqdm(
            range(state.iteration, stop),
            initial=state.iteration,
            total=stop,
            disable=not settings["PROGRESS_BAR"],
            desc="train",
        ):
            batch = stream.batch(state.iteration).to(device)
            try:
                record = training_step(
                    network,
                    batch,
                    schedule=schedule,
                    weights=config.loss_weights,
                    extractor=extractor,
                )
            except TrainingDivergenceError:
                path = save_checkpoint(network, out_dir / f"diverged-{network.iteration}.ckpt")
                logger.error("Training diverged; snapshot written to %s", path)
                raise

            log.writerow(record.to_row())
            state.update_running(record)

            if state.iteration < schedule.total and state.phase is not phase:
                phase = state.phase
                logger.info("Entering %s phase at iteration %d", phase.value, state.iteration)
            if state.iteration % config.checkpoint_every == 0:
                log_file.flush()
                save_checkpoint(network, out_dir / checkpoint_name(state.iteration))
            if state.iteration % config.sample_every == 0:
                write_sample_grid(
                    network,
                    probes,
                    out_dir / "samples" / f"iter-{state.iteration:08d}.png",
                )
    finally:
        log_file.close()

    name = FINAL_CHECKPOINT_NAME if state.iteration == schedule.total else checkpoint_name(state.iteration)
    path = save_checkpoint(network, out_dir / name)
    logger.info(
        "Stopped at iteration %d; running losses: %s",
        state.iteration,
        ", ".join(f"{k}={v:.4g}" for k, v in state.running.items()),
    )
    return TrainResult(checkpoint=path, iteration=state.iteration)
