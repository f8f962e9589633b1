"""Event-triggered optimal backstepping control of strict-feedback plants with faults."""
from .errors import ConfigError, GainConditionError, NumericBlowup, RejectedInput

__version__ = "0.1.0"

__all__ = ["ConfigError", "GainConditionError", "NumericBlowup", "RejectedInput", "__version__"]
