"""Input files and output tables of the command line."""

import json
from pathlib import Path
from typing import Any, Optional, TextIO

import numpy as np
import pandas as pd

from ..analysis.transform import SigmaCDF
from ..core.errors import DomainError, InputDataError, NonMonotoneCDFError, UnsupportedBodyError
from ..core.logging import get_logger
from ..geometry.bodies import ConvexSphericalBody


logger = get_logger(__name__)

FLOAT_FORMAT = "%.17g"
INTERIOR_PREFIX = "interior:"


def _parse_vector(text: str, row: int) -> list[float]:
    try:
        values = [float(token) for token in text.split()]
    except ValueError as e:
        raise InputDataError(f"Row {row}: not a list of numbers: {text.strip()!r}", row=row) from e
    if not values:
        raise InputDataError(f"Row {row}: empty vector", row=row)
    return values


def read_body_file(path: Path) -> ConvexSphericalBody:
    """
    Parse a halfspace body file.

    One normal vector per line with whitespace-separated components, plus a
    line ``interior: x_1 ... x_d`` holding the interior witness. Blank lines
    and lines starting with ``#`` are skipped.

    Raises:
        InputDataError: On unreadable, empty or malformed files, or bodies that
            fail validation.
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise InputDataError(f"Cannot read body file {path}: {e}") from e

    normals: list[list[float]] = []
    interior: Optional[list[float]] = None
    for row, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if text.lower().startswith(INTERIOR_PREFIX):
            if interior is not None:
                raise InputDataError(f"Row {row}: second interior line", row=row)
            interior = _parse_vector(text[len(INTERIOR_PREFIX):], row)
        else:
            normals.append(_parse_vector(text, row))
            if len(normals[-1]) != len(normals[0]):
                raise InputDataError(f"Row {row}: normal has {len(normals[-1])} components, "
                                     f"expected {len(normals[0])}", row=row)

    if not normals:
        raise InputDataError(f"Body file {path} has no normals")
    if interior is None:
        raise InputDataError(f"Body file {path} has no '{INTERIOR_PREFIX}' line")
    try:
        body = ConvexSphericalBody(normals=np.array(normals), interior_point=np.array(interior))
    except (DomainError, UnsupportedBodyError) as e:
        raise InputDataError(f"Invalid body in {path}: {e}") from e
    logger.info("loaded body", path=str(path), d=body.dim, constraints=len(normals))
    return body


def read_sigma_table(path: Path) -> SigmaCDF:
    """
    Read a chord-length distribution table with columns ``s`` and ``F_sigma``.

    Files without those headers are read by position (first two columns).

    Raises:
        InputDataError: On unreadable, empty or non-numeric files.
        NonMonotoneCDFError: At the first data row where the CDF decreases.
    """
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError as e:
        raise InputDataError(f"Chord table {path} is empty") from e
    except (OSError, pd.errors.ParserError) as e:
        raise InputDataError(f"Cannot read chord table {path}: {e}") from e

    if frame.empty:
        raise InputDataError(f"Chord table {path} has no rows")
    if {"s", "F_sigma"} <= set(frame.columns):
        columns = frame[["s", "F_sigma"]]
    elif frame.shape[1] >= 2:
        columns = frame.iloc[:, :2]
    else:
        raise InputDataError(f"Chord table {path} needs columns s and F_sigma")

    numeric = columns.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna().any(axis=1).to_numpy()
    if bad.any():
        row = int(np.argmax(bad)) + 1
        raise InputDataError(f"Chord table row {row} is not numeric", row=row)

    try:
        return SigmaCDF.from_table(
            numeric.iloc[:, 0].to_numpy(), numeric.iloc[:, 1].to_numpy(), {"source": str(path)}
        )
    except NonMonotoneCDFError:
        raise
    except DomainError as e:
        raise InputDataError(f"Invalid chord table {path}: {e}") from e


def write_table(
    frame: pd.DataFrame,
    fmt: str,
    stream: TextIO,
    metadata: Optional[dict[str, Any]] = None,
) -> None:
    """Write ``frame`` as CSV (17 significant digits) or as a JSON document."""
    if fmt == "csv":
        frame.to_csv(stream, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return
    payload = {
        "metadata": metadata or {},
        "columns": list(frame.columns),
        "data": frame.to_dict(orient="records"),
    }
    stream.write(json.dumps(payload, default=_json_default) + "\n")


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Not JSON serializable: {type(value).__name__}")
