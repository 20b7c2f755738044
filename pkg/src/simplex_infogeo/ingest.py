"""CSV ingestion of compositional samples.

Layout: a header row of part names whose first cell labels the sample-id
column, then one row per sample. Row numbers in errors count data rows from 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np
import pandas as pd

from .errors import InputError, ParseError, RaggedRows, ZeroPartError
from .models import ZeroPolicy

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Dataset:
    samples: np.ndarray
    part_names: Tuple[str, ...]
    sample_ids: Tuple[str, ...]
    replaced_zeros: int = 0

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != len(self.part_names):
            raise RaggedRows(
                f"sample matrix of shape {samples.shape} does not match {len(self.part_names)} part names"
            )
        if samples.shape[0] != len(self.sample_ids):
            raise ParseError(f"{samples.shape[0]} rows but {len(self.sample_ids)} sample ids")
        if not np.all(samples > 0):
            raise ZeroPartError("every part must be strictly positive after zero handling")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "part_names", tuple(self.part_names))
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))

    @property
    def N(self) -> int:
        return int(self.samples.shape[0])

    @property
    def D(self) -> int:
        return int(self.samples.shape[1])


def _read_frame(path: str | Path) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except FileNotFoundError as exc:
        raise InputError(f"input file not found: {path}") from exc
    except pd.errors.EmptyDataError as exc:
        raise ParseError(f"input file {path} is empty") from exc
    except pd.errors.ParserError as exc:
        raise RaggedRows(f"rows of {path} have inconsistent lengths: {exc}") from exc
    except (UnicodeDecodeError, OSError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if len(frame) and not isinstance(frame.index, pd.RangeIndex):
        # every data row had one field more than the header and pandas took the first as an index
        raise RaggedRows(f"rows of {path} are longer than the header")
    header = pd.read_csv(path, header=None, nrows=1, dtype=str, keep_default_na=False, encoding="utf-8")
    names = [str(name).strip() for name in header.iloc[0].tolist()]
    duplicates = sorted({name for name in names if names.count(name) > 1})
    if duplicates:
        # pandas would have renamed them to a, a.1, ...
        raise ParseError(f"duplicate column names in the header of {path}: {', '.join(duplicates)}")
    return frame


def _parse_cell(raw: object, row: int, column: str) -> float:
    if not isinstance(raw, str):
        # pandas pads short rows with NaN even when default NA parsing is off
        raise RaggedRows("row is shorter than the header", row=row, column=column)
    text = raw.strip()
    if not text:
        raise ParseError("empty cell", row=row, column=column)
    try:
        value = float(text)
    except ValueError as exc:
        raise ParseError(f"not a number: {text!r}", row=row, column=column) from exc
    if not math.isfinite(value) or value < 0:
        raise ParseError(f"parts must be finite and nonnegative, got {text!r}", row=row, column=column)
    return value


def ingest_csv(path: str | Path, zero_policy: ZeroPolicy | None = None) -> Dataset:
    policy = zero_policy or ZeroPolicy()
    frame = _read_frame(path)
    columns = [str(c) for c in frame.columns]
    if len(columns) < 3:
        raise ParseError(f"need a sample-id column and at least two parts, got header {columns}")
    part_names = tuple(columns[1:])
    if frame.empty:
        raise ParseError(f"{path} has a header but no samples")

    sample_ids = []
    rows = np.empty((len(frame), len(part_names)), dtype=float)
    replaced = 0
    for r, record in enumerate(frame.itertuples(index=False, name=None), start=1):
        sample_id = record[0]
        if not isinstance(sample_id, str) or not sample_id.strip():
            raise ParseError("missing sample id", row=r, column=columns[0])
        sample_ids.append(sample_id.strip())
        for c, name in enumerate(part_names):
            value = _parse_cell(record[c + 1], r, name)
            if value == 0.0:
                if policy.kind == "error":
                    raise ZeroPartError("zero part under the 'error' policy", row=r, column=name)
                value = float(policy.epsilon)
                replaced += 1
            rows[r - 1, c] = value

    if len(set(sample_ids)) != len(sample_ids):
        raise ParseError(f"duplicate sample ids in {path}")
    if replaced:
        logger.warning("Replaced %d zero parts with %s before closure", replaced, policy.epsilon)
    closed = rows / rows.sum(axis=1, keepdims=True)
    logger.debug("Ingested %d samples with %d parts from %s", closed.shape[0], closed.shape[1], path)
    return Dataset(closed, part_names, tuple(sample_ids), replaced)
