"""This module includes methods to write and read result tables as CSV
files."""

import csv
from typing import Optional

from triphase.io.table import Table
from triphase.io.typing import FilePath
from triphase.io.utils import Compression, copen, detect_compression


def write_table(table: Table, fp: FilePath, *, encoding: str = 'utf-8',
                compression: Optional[Compression] = None,
                delimiter: str = ',') -> None:
  """Writes the table with a header row to the specified file.

  Floats are written with their shortest round-trip representation, so equal
  tables give equal bytes.

  Args:
      table (Table): the table to write.
      fp (FilePath): file path of the target. It must not be None or an empty
      string.
      encoding (str, optional): Name of the encoding. Defaults to 'utf-8'.
      compression (Compression, optional): Compression type of the file.
      Defaults to None, which means that the type is detected from the suffix
      of the file name.
      delimiter (str, optional): Delimiter used to separate columns in the CSV
      file. Defaults to the comma character ','.

  Raises:
      IOError: An error occurred accessing the given file.
      ValueError: if the file path is missing.
  """
  if not fp:
    raise ValueError('a valid file path must be specified')
  compression = compression or detect_compression(fp)
  with copen(fp, mode='text', compression=compression, encoding=encoding,
             write=True) as f:
    writer = csv.writer(f, delimiter=delimiter, lineterminator='\r\n')
    writer.writerow(table.columns)
    for row in table.rows:
      writer.writerow([v if isinstance(v, str) else repr(float(v))
                       for v in row])


def _cell(text: str):
  try:
    return float(text)
  except ValueError:
    return text


def read_table(fp: FilePath, *, encoding: str = 'utf-8',
               compression: Optional[Compression] = None,
               delimiter: str = ',') -> Table:
  """Reads a table written by `write_table`.

  Args:
      fp (FilePath): file path to the source. It must not be None or an empty
      string.
      encoding (str, optional): Name of the encoding. Defaults to 'utf-8'.
      compression (Compression, optional): Compression type of the file.
      Defaults to None, which means that the type is detected from the suffix
      of the file name.
      delimiter (str, optional): Delimiter used to separate columns in the CSV
      file. Defaults to the comma character ','.

  Raises:
      IOError: An error occurred accessing the given file.
      ValueError: The content in the given CSV file is wrongly formatted.

  Returns:
      Table: the table with the columns of the header row.
  """
  if not fp:
    raise ValueError('a valid file path must be specified')
  compression = compression or detect_compression(fp)
  with copen(fp, mode='text', compression=compression, encoding=encoding) as f:
    reader = csv.reader(f, delimiter=delimiter)
    header = next(reader, None)
    if header is None:
      raise ValueError('the table has no header row')
    table = Table(tuple(header))
    for no, row in enumerate(reader, start=2):
      if len(row) != len(header):
        raise ValueError(f'row {no} must have {len(header)} columns, but has '
                         f'{len(row)}')
      table.append([_cell(v) for v in row])
  return table
