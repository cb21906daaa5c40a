"""Display-only renderer for verification-harness outputs."""

from .render import render_experiment, write_index
from .schema import EXPECTED_HEADER, ExperimentData, Row, SchemaError, \
    discover, read_experiment_csv

__version__ = "0.1.0"

__all__ = ["EXPECTED_HEADER", "ExperimentData", "Row", "SchemaError",
           "discover", "read_experiment_csv", "render_experiment",
           "write_index", "__version__"]
