"""Unit testing writing and reading result tables as CSV files."""

import math
import tempfile
import unittest
from os.path import join

import pytest

from triphase.io.csv import read_table, write_table
from triphase.io.table import Table


def _table() -> Table:
  table = Table(('check', 'value', 'threshold'))
  table.append(('energy_defect', 1.0 / 3.0, 1e-4))
  table.append(('picard_iterations', 12, 40))
  table.append(('initial_continuity_exponent', math.inf, 0.5))
  return table


class TestTableFiles(unittest.TestCase):
  """Testing the CSV tables."""

  def test_must_read_what_was_written(self):
    with tempfile.TemporaryDirectory() as tmp:
      for name in ('verify.csv', 'verify.csv.gz', 'verify.tsv.xz'):
        fp = join(tmp, name)
        write_table(_table(), fp, delimiter='\t' if 'tsv' in name else ',')
        table = read_table(fp, delimiter='\t' if 'tsv' in name else ',')

        assert table.columns == ('check', 'value', 'threshold')
        assert table.rows == _table().rows

  def test_must_write_identical_bytes_for_identical_tables(self):
    with tempfile.TemporaryDirectory() as tmp:
      first, second = join(tmp, 'a.csv'), join(tmp, 'b.csv')
      write_table(_table(), first)
      write_table(_table(), second)
      with open(first, 'rb') as a, open(second, 'rb') as b:
        content = a.read()

        assert content == b.read()
        assert content.startswith(b'check,value,threshold\r\n')
        assert b'0.3333333333333333' in content

  def test_must_throw_value_error_when_file_path_is_empty(self):
    with pytest.raises(ValueError, match='a valid file path must be specified'):
      write_table(_table(), '')
    with pytest.raises(ValueError, match='a valid file path must be specified'):
      read_table(None)

  def test_must_throw_value_error_when_header_is_missing(self):
    with tempfile.NamedTemporaryFile() as test_f:
      with pytest.raises(ValueError, match='has no header row'):
        read_table(test_f.name)

  def test_must_throw_value_error_when_row_is_short(self):
    with tempfile.TemporaryDirectory() as tmp:
      fp = join(tmp, 'broken.csv')
      with open(fp, 'w', encoding='utf-8') as f:
        f.write('time,gap\n0.0,1.0\n0.1\n')
      with pytest.raises(ValueError, match='row 3 must have 2 columns'):
        read_table(fp)
