"""An in-memory table of named columns, the common result type of the
diagnostics."""

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from triphase.io.typing import Cell


@dataclass
class Table:
  """Rows with named columns and free-form metadata. Cells are floats, except
  for label cells, which stay strings."""
  columns: Tuple[str, ...]
  rows: List[Tuple[Cell, ...]] = field(default_factory=list)
  meta: Dict[str, Any] = field(default_factory=dict)

  def __post_init__(self):
    self.columns = tuple(self.columns)
    if len(set(self.columns)) != len(self.columns):
      raise ValueError(f'duplicate column names in {self.columns}')
    rows = list(self.rows)
    self.rows = []
    self.extend(rows)

  def append(self, row: Sequence[Cell]) -> None:
    if len(row) != len(self.columns):
      raise ValueError(f'row must have {len(self.columns)} values, but has '
                       f'{len(row)}')
    self.rows.append(tuple(v if isinstance(v, str) else float(v) for v in row))

  def extend(self, rows: Iterable[Sequence[Cell]]) -> None:
    for row in rows:
      self.append(row)

  def __len__(self) -> int:
    return len(self.rows)

  def column(self, name: str) -> np.ndarray:
    """Gets the values of the named column.

    Raises:
        KeyError: if the table has no such column.
    """
    try:
      idx = self.columns.index(name)
    except ValueError:
      raise KeyError(f'no column "{name}" in {self.columns}') from None
    return np.array([row[idx] for row in self.rows], dtype=float)

  def max(self, name: str) -> float:
    values = self.column(name)
    return float(np.nanmax(np.abs(values))) if values.size else 0.0
