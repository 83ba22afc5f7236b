"""The state triple `(f_A, f_B, f_S)` sampled on the truncated grid, together
with the quadrature inner product of the product space H."""

import math
from dataclasses import dataclass, replace

import numpy as np

from triphase.errors import ConfigurationError
from triphase.state.params import GridSpec
from triphase.state.typing import RealArray


def _frozen(arr, shape, name: str) -> RealArray:
  arr = np.array(arr, dtype=float)
  if arr.shape != tuple(shape):
    raise ConfigurationError(
        f'{name} must have shape {tuple(shape)}, but has {arr.shape}')
  if not np.all(np.isfinite(arr)):
    raise ConfigurationError(f'{name} contains non-finite entries')
  arr.flags.writeable = False
  return arr


@dataclass(frozen=True, eq=False)
class TriField:
  """Samples of an upper bulk field `f_a`, a lower bulk field `f_b` and a
  surface field `f_s`.

  `f_a[i, j, m]` is the value at `(x_i, x_j, z_m)` and `f_b[i, j, m]` the value
  at `(x_i, x_j, -z_m)`. The surface field carries the weight `weight_s` in the
  inner product, which is 1 for the H-norm and alpha_S for the physical energy.
  """
  f_a: RealArray
  f_b: RealArray
  f_s: RealArray
  grid: GridSpec
  weight_s: float = 1.0

  def __post_init__(self):
    object.__setattr__(self, 'f_a', _frozen(self.f_a, self.grid.bulk_shape,
                                            'f_a'))
    object.__setattr__(self, 'f_b', _frozen(self.f_b, self.grid.bulk_shape,
                                            'f_b'))
    object.__setattr__(self, 'f_s', _frozen(self.f_s, self.grid.surface_shape,
                                            'f_s'))
    if not (math.isfinite(self.weight_s) and self.weight_s > 0):
      raise ConfigurationError(
          f'weight_s must be positive, but was {self.weight_s}')

  def with_weight(self, weight_s: float) -> 'TriField':
    return replace(self, weight_s=weight_s)

  def _check_compatible(self, other: 'TriField') -> None:
    if not isinstance(other, TriField):
      raise ConfigurationError(
          f'expected a TriField, but got {type(other).__name__}')
    if self.grid != other.grid:
      raise ConfigurationError('fields live on different grids')

  def __add__(self, other: 'TriField') -> 'TriField':
    self._check_compatible(other)
    return TriField(self.f_a + other.f_a, self.f_b + other.f_b,
                    self.f_s + other.f_s, self.grid, self.weight_s)

  def __sub__(self, other: 'TriField') -> 'TriField':
    self._check_compatible(other)
    return TriField(self.f_a - other.f_a, self.f_b - other.f_b,
                    self.f_s - other.f_s, self.grid, self.weight_s)

  def __mul__(self, scalar: float) -> 'TriField':
    return TriField(scalar * self.f_a, scalar * self.f_b, scalar * self.f_s,
                    self.grid, self.weight_s)

  __rmul__ = __mul__

  def __neg__(self) -> 'TriField':
    return self * -1.0

  def max_abs(self) -> float:
    return float(max(np.max(np.abs(self.f_a)), np.max(np.abs(self.f_b)),
                     np.max(np.abs(self.f_s))))


def zeros(grid: GridSpec, weight_s: float = 1.0) -> TriField:
  return TriField(np.zeros(grid.bulk_shape), np.zeros(grid.bulk_shape),
                  np.zeros(grid.surface_shape), grid, weight_s)


def h_inner(f: TriField, g: TriField) -> float:
  """Computes the quadrature of the H inner product.

  The horizontal weights are the uniform midpoint weights `h` of the periodic
  box and the vertical weights the uniform trapezoid weights `dz` over the
  interior sine nodes, whose end values at the interface and the far wall are
  zero for u-variables.

  Args:
      f (TriField): first triple.
      g (TriField): second triple on the same grid and with the same surface
      weight.

  Raises:
      ConfigurationError: if the grids or surface weights don't match.

  Returns:
      float: the weighted sum of the three integrals.
  """
  f._check_compatible(g)
  if f.weight_s != g.weight_s:
    raise ConfigurationError(
        f'surface weights differ: {f.weight_s} != {g.weight_s}')
  grid = f.grid
  area = grid.h ** 2
  bulk = area * grid.dz * (np.vdot(f.f_a, g.f_a) + np.vdot(f.f_b, g.f_b))
  surface = f.weight_s * area * np.vdot(f.f_s, g.f_s)
  return float(bulk + surface)


def h_norm(f: TriField) -> float:
  return math.sqrt(max(h_inner(f, f), 0.0))
