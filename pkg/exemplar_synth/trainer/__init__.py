from .loop import TrainResult, TrainState, train, write_sample_grid
from .schedule import Phase, PhaseSchedule, lr_at, scadv_enabled_at
from .step import LossRecord, training_step
from .stream import StepBatch, TrainingStream

__all__ = [
    "LossRecord",
    "Phase",
    "PhaseSchedule",
    "StepBatch",
    "TrainResult",
    "TrainState",
    "TrainingStream",
    "lr_at",
    "scadv_enabled_at",
    "train",
    "training_step",
    "write_sample_grid",
]
