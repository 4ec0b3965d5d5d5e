from .gradcheck import GradCheckResult, central_difference_check
from .receptive_field import ReceptiveField, gradient_support, trace_receptive_field

__all__ = [
    "GradCheckResult",
    "ReceptiveField",
    "central_difference_check",
    "gradient_support",
    "trace_receptive_field",
]
