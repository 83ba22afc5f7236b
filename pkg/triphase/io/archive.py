"""A module to read and write trajectory archives.

An archive is an LZ4 frame holding a header with the grid and the kind of the
stored fields, followed by one record per time: the time, the three fields and,
optionally, their time derivatives, all as little-endian float64.
"""

import struct
from typing import Optional, Tuple

import numpy as np
from lz4.frame import open as lz4_open

from triphase.errors import ConfigurationError
from triphase.io.typing import FilePath
from triphase.state.field import TriField
from triphase.state.params import GridSpec
from triphase.state.trajectory import Trajectory, Variables

_magic = b'TRIPHASE1'
_header = struct.Struct('<dqdqddBB')
_float = np.dtype('<f8')

Record = Tuple[float, TriField, Optional[TriField]]


class TrajectoryWriter:
  """A writer of trajectory samples to a LZ4-compressed binary file."""

  def __init__(self, fp: FilePath, grid: GridSpec, *,
               variables: Variables = Variables.PHYSICAL,
               derivs: bool = True) -> None:
    """Initializes a new writer to the specified file and writes the header.

    Args:
        fp (FilePath): path to the archive.
        grid (GridSpec): the grid of all samples.
        variables (Variables, optional): the kind of the stored fields.
        Defaults to PHYSICAL.
        derivs (bool, optional): True, if every sample carries its time
        derivative. Defaults to True.
    """
    self._grid = grid
    self._derivs = derivs
    self._f = lz4_open(fp, mode='wb')
    self._f.write(_magic + _header.pack(grid.l_h, grid.n_h, grid.l_z,
                                        grid.n_z, grid.dt, grid.t_end,
                                        variables.value, int(derivs)))

  def __enter__(self) -> 'TrajectoryWriter':
    return self

  def _write_field(self, f: TriField) -> None:
    if f.grid != self._grid:
      raise ConfigurationError('the sample lives on a different grid')
    for arr in (f.f_a, f.f_b, f.f_s):
      self._f.write(np.ascontiguousarray(arr, dtype=_float).tobytes())

  def write(self, time: float, state: TriField,
            deriv: Optional[TriField] = None) -> None:
    """Writes one sample.

    Raises:
        ConfigurationError: if the sample lives on another grid, or the
        derivative is missing or unexpected.
    """
    if (deriv is not None) != self._derivs:
      raise ConfigurationError('the archive expects derivatives' if
                               self._derivs else
                               'the archive stores no derivatives')
    self._f.write(struct.pack('<d', time))
    self._write_field(state)
    if deriv is not None:
      self._write_field(deriv)

  def __exit__(self, typ, value, tb) -> None:
    self.close()

  def close(self) -> None:
    if self._f:
      self._f.close()
      self._f = None


class TrajectoryReader:
  """A reader of trajectory samples from a LZ4-compressed binary file."""

  def __init__(self, fp: FilePath) -> None:
    """Initializes a new reader from the specified file and reads the header.

    Raises:
        ConfigurationError: if the file isn't a trajectory archive.
    """
    self._f = lz4_open(fp, mode='rb')
    head = self._f.read(len(_magic) + _header.size)
    if len(head) != len(_magic) + _header.size or \
            not head.startswith(_magic):
      self._f.close()
      raise ConfigurationError('the file isn\'t a trajectory archive')
    l_h, n_h, l_z, n_z, dt, t_end, variables, derivs = \
        _header.unpack(head[len(_magic):])
    self.grid = GridSpec(l_h=l_h, n_h=n_h, l_z=l_z, n_z=n_z, dt=dt,
                         t_end=t_end)
    self.variables = Variables(variables)
    self.has_derivs = bool(derivs)

  def __enter__(self) -> 'TrajectoryReader':
    return self

  def _read_array(self, shape) -> np.ndarray:
    size = int(np.prod(shape)) * _float.itemsize
    b_arr = self._f.read(size)
    if len(b_arr) != size:
      raise ConfigurationError('the archive ends within a sample')
    return np.frombuffer(b_arr, dtype=_float).reshape(shape)

  def _read_field(self) -> TriField:
    grid = self.grid
    return TriField(self._read_array(grid.bulk_shape),
                    self._read_array(grid.bulk_shape),
                    self._read_array(grid.surface_shape), grid)

  def read(self) -> Optional[Record]:
    """Reads the next sample.

    Returns:
        Record: the time, the state and the derivative (or None), or None, if
        the end of the archive has been reached.
    """
    b_arr = self._f.read(8)
    if not b_arr:
      return None
    if len(b_arr) != 8:
      raise ConfigurationError('the archive ends within a sample')
    time = struct.unpack('<d', b_arr)[0]
    state = self._read_field()
    deriv = self._read_field() if self.has_derivs else None
    return time, state, deriv

  def __exit__(self, typ, value, tb) -> None:
    self.close()

  def close(self) -> None:
    if self._f:
      self._f.close()
      self._f = None


def write_trajectory(traj: Trajectory, fp: FilePath) -> None:
  """Writes all samples of a trajectory to an archive."""
  derivs = traj.derivs or [None] * len(traj)
  with TrajectoryWriter(fp, traj.grid, variables=traj.variables,
                        derivs=traj.derivs is not None) as writer:
    for t, state, deriv in zip(traj.times, traj.states, derivs):
      writer.write(float(t), state, deriv)


def read_trajectory(fp: FilePath) -> Trajectory:
  """Reads all samples of an archive into a trajectory."""
  times, states, derivs = [], [], []
  with TrajectoryReader(fp) as reader:
    while True:
      record = reader.read()
      if record is None:
        break
      times.append(record[0])
      states.append(record[1])
      derivs.append(record[2])
    has_derivs, variables = reader.has_derivs, reader.variables
  if not states:
    raise ConfigurationError('the archive holds no samples')
  return Trajectory(times, states, derivs if has_derivs else None, variables)


def read_first_state(fp: FilePath) -> TriField:
  """Reads the state of the first sample of an archive.

  Raises:
      ConfigurationError: if the archive holds no samples.
  """
  with TrajectoryReader(fp) as reader:
    record = reader.read()
  if record is None:
    raise ConfigurationError('the archive holds no samples')
  return record[1]
