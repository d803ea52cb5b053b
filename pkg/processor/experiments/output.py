# Standard library imports
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

# Third-party imports
import numpy as np
import pandas as pd

# Local application imports
from config.config import OUTPUT_DIR
from processor import __version__
from utils.common import format_float

# Configure logger for this module
logger = logging.getLogger(__name__)


@dataclass(eq=False)
class ExperimentResult:
    """Table plus summary produced by one experiment run."""

    experiment: str
    parameters: Dict[str, Any]
    table: pd.DataFrame
    summary: Dict[str, Any] = field(default_factory=dict)


def to_native(value: Any) -> Any:
    """Recursively convert numpy scalars and arrays into JSON-serialisable Python values."""
    if isinstance(value, dict):
        return {str(key): to_native(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_native(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_native(item) for item in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    return value


def _dumps(document: Any) -> str:
    return json.dumps(to_native(document), sort_keys=True, indent=2) + "\n"


def render_csv(result: ExperimentResult) -> str:
    """CSV text with the metadata comment block and a header row."""
    header = [
        f"# experiment: {result.experiment}",
        f"# parameters: {json.dumps(to_native(result.parameters), sort_keys=True)}",
        f"# version: {__version__}",
    ]
    body = result.table.map(format_float).to_csv(index=False, lineterminator="\n")
    return "\n".join(header) + "\n" + body


def render_json(result: ExperimentResult) -> str:
    return _dumps({
        "experiment": result.experiment,
        "parameters": result.parameters,
        "version": __version__,
        "summary": result.summary,
        "table": result.table.to_dict(orient="records"),
    })


def render_summary(result: ExperimentResult) -> str:
    return _dumps({
        "experiment": result.experiment,
        "parameters": result.parameters,
        "version": __version__,
        "summary": result.summary,
    })


def resolve_output_path(out: str) -> Path:
    """Relative paths are taken from LQCA_OUTPUT_DIR."""
    path = Path(out)
    return path if path.is_absolute() else Path(OUTPUT_DIR) / path


def summary_path(path: Path) -> Path:
    return path.with_name(f"{path.stem}.summary.json")


def write_result(result: ExperimentResult, fmt: str = "csv", out: Optional[str] = None) -> Optional[Path]:
    """Write a result as CSV (plus a summary JSON next to it) or as one JSON document.

    Without ``out`` the text goes to stdout and no summary file is written.

    Returns:
        The path of the main output file, or None when writing to stdout.
    """
    text = render_csv(result) if fmt == "csv" else render_json(result)
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        logger.info(f"Summary for {result.experiment}: {json.dumps(to_native(result.summary), sort_keys=True)}")
        return None
    path = resolve_output_path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    logger.info(f"Wrote {len(result.table)} rows to {path}")
    if fmt == "csv":
        with open(summary_path(path), "w", encoding="utf-8", newline="\n") as handle:
            handle.write(render_summary(result))
        logger.info(f"Wrote summary to {summary_path(path)}")
    return path
