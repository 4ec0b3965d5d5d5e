from __future__ import annotations

from typing import TYPE_CHECKING, ClassVar, Optional, Sequence

if TYPE_CHECKING:
    from exemplar_synth.config import Violation


class ExemplarSynthError(Exception):
    """Base class for every error raised by this package.

    Attributes
    ----------
        message:
            Human readable description, also used as the exception args
        suggestion:
            Optional hint on how to fix the problem
        kind:
            Short machine readable slug printed by the command line
        exit_code:
            Process exit code used by the command line

    """

    kind: ClassVar[str] = "error"
    exit_code: ClassVar[int] = 1

    def __init__(self, message: str, *, suggestion: Optional[str] = None):
        self.message = message
        self.suggestion = suggestion
        super().__init__(self.message)


class ConfigurationError(ExemplarSynthError):
    kind = "config"
    exit_code = 3


class InvalidConfigError(ConfigurationError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)

        rules = "; ".join(f"{v.field}: {v.rule}" for v in self.violations)
        super().__init__(
            f"Config has {len(self.violations)} violation(s): {rules}",
            suggestion="Fix the listed keys in the config file or via --set",
        )


class ConfigHashMismatchError(ConfigurationError):
    kind = "config-hash"

    def __init__(self, expected: str, found: str):
        self.expected = expected
        self.found = found

        super().__init__(
            f"Checkpoint was trained with config hash {expected}, "
            f"but the supplied config hashes to {found}",
            suggestion="Pass the resolved-config.txt written next to the checkpoint",
        )


class CorpusError(ExemplarSynthError):
    kind = "corpus"


class EmptyDomainError(ExemplarSynthError):
    kind = "empty-domain"

    def __init__(self, constraint: str):
        self.constraint = constraint
        super().__init__(f"No valid pair exists: {constraint}")


class ShapeError(ExemplarSynthError):
    kind = "shape"

    def __init__(self, tensor_name: str, expected: str, found: object):
        self.tensor_name = tensor_name
        super().__init__(f'Tensor "{tensor_name}" expected {expected}, got {found}')


class TrainingDivergenceError(ExemplarSynthError):
    kind = "divergence"

    def __init__(self, what: str, iteration: Optional[int] = None):
        self.what = what
        self.iteration = iteration

        where = f" at iteration {iteration}" if iteration is not None else ""
        super().__init__(f"Non-finite values in {what}{where}")


class BatchCompositionError(ExemplarSynthError):
    kind = "batch"


class ScheduleError(ExemplarSynthError):
    kind = "schedule"


class CheckpointError(ExemplarSynthError):
    kind = "checkpoint"


class MetricError(ExemplarSynthError):
    kind = "metric"


class LabelerUnavailableError(ExemplarSynthError):
    kind = "labeler"
