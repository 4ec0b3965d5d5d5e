"""Three-phase training schedule.

1. warmup: constant learning rate, adversarial style-consistency loss off
2. scadv: constant learning rate, every loss on
3. decay: learning rate decays linearly to zero, every loss on
"""

from __future__ import annotations

import dataclasses
import enum
from typing import TYPE_CHECKING

from exemplar_synth.exceptions import ScheduleError

if TYPE_CHECKING:
    from exemplar_synth.config import TrainConfig


class Phase(str, enum.Enum):
    WARMUP = "warmup"
    SCADV = "scadv"
    DECAY = "decay"


@dataclasses.dataclass(frozen=True)
class PhaseSchedule:
    n_warmup: int = 250_000
    n_scadv: int = 250_000
    n_decay: int = 500_000
    base_lr: float = 2e-4

    def __post_init__(self):
        if self.n_warmup < 0 or self.n_scadv < 0:
            raise ScheduleError("Phase lengths must be nonnegative")
        if self.n_decay <= 0:
            raise ScheduleError("The decay phase must last at least one iteration")
        if self.base_lr <= 0:
            raise ScheduleError("base_lr must be positive")

    @classmethod
    def from_config(cls, config: TrainConfig) -> PhaseSchedule:
        return cls(
            n_warmup=config.phases.n_warmup,
            n_scadv=config.phases.n_scadv,
            n_decay=config.phases.n_decay,
            base_lr=config.base_lr,
        )

    @property
    def decay_start(self) -> int:
        return self.n_warmup + self.n_scadv

    @property
    def total(self) -> int:
        return self.decay_start + self.n_decay

    def check(self, iteration: int):
        if not 0 <= iteration <= self.total:
            raise ScheduleError(f"Iteration {iteration} outside the schedule [0, {self.total}]")

    def phase_at(self, iteration: int) -> Phase:
        self.check(iteration)
        if iteration < self.n_warmup:
            return Phase.WARMUP
        if iteration < self.decay_start:
            return Phase.SCADV
        return Phase.DECAY


def lr_at(schedule: PhaseSchedule, iteration: int) -> float:
    """Learning rate for the step taken at `iteration`.

    Constant up to the decay start, then linear down to exactly 0 at
    `schedule.total`.
    """
    schedule.check(iteration)
    if iteration < schedule.decay_start:
        return schedule.base_lr
    return schedule.base_lr * ((schedule.total - iteration) / schedule.n_decay)


def scadv_enabled_at(schedule: PhaseSchedule, iteration: int) -> bool:
    schedule.check(iteration)
    return iteration >= schedule.n_warmup
