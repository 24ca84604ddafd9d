"""S-box security metrics and coordinate-mix search for side-channel resistance."""

from .boolfn import BinaryMatrix, InvalidInput, SBoxTable, TruthTable
from .metrics import MetricsReport, full_report

__version__ = "0.1.0"

__all__ = [
    "BinaryMatrix",
    "InvalidInput",
    "MetricsReport",
    "SBoxTable",
    "TruthTable",
    "full_report",
    "__version__",
]
