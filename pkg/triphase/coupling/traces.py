"""Interface traces of bulk fields and of their normal derivatives."""

from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from triphase.errors import DomainError
from triphase.state.field import TriField
from triphase.state.params import GridSpec, PhysParams
from triphase.state.typing import RealArray

SERIES = 'series'
EXTRAPOLATE = 'extrapolate'


@lru_cache(maxsize=8)
def extrapolation_weights(n_z: int, order: int = 4) -> np.ndarray:
  """Gets the Lagrange weights that extrapolate the values at the first
  `order` interior nodes to the interface.

  With four nodes the weights are (4, -6, 4, -1), which is exact for cubics.
  """
  p = min(order, n_z)
  nodes = np.arange(1, p + 1, dtype=float)
  weights = np.ones(p)
  for j in range(p):
    for i in range(p):
      if i != j:
        weights[j] *= (0.0 - nodes[i]) / (nodes[j] - nodes[i])
  weights.flags.writeable = False
  return weights


def sine_coefficients(f: RealArray, grid: GridSpec) -> RealArray:
  """Gets the vertical sine coefficients of bulk samples along the last
  axis."""
  return sfft.dst(np.asarray(f, dtype=float), type=1, axis=-1) / (grid.n_z + 1)


def _trace(f: RealArray, grid: GridSpec, method: str) -> RealArray:
  f = np.asarray(f, dtype=float)
  if method == SERIES:
    # a sine series vanishes at the interface
    return np.zeros(f.shape[:-1])
  if method == EXTRAPOLATE:
    w = extrapolation_weights(grid.n_z)
    return f[..., :w.size] @ w
  raise DomainError(f'trace method "{method}" isn\'t supported')


def trace_plus(f_a: RealArray, grid: GridSpec, *,
               method: str = EXTRAPOLATE) -> RealArray:
  """Gets the interface value of an upper bulk field.

  Args:
      f_a (RealArray): bulk samples of shape (n_h, n_h, n_z).
      grid (GridSpec): the grid of the samples.
      method (str, optional): 'series' sums the sine series at the interface,
      which is zero for every u-variable; 'extrapolate' extrapolates the
      samples at the four nodes closest to the interface with a cubic
      polynomial. Defaults to 'extrapolate'.

  Raises:
      DomainError: if the method is unknown.
  """
  return _trace(f_a, grid, method)


def trace_minus(f_b: RealArray, grid: GridSpec, *,
                method: str = EXTRAPOLATE) -> RealArray:
  return _trace(f_b, grid, method)


def trace_normal_deriv_plus(f_a: RealArray, grid: GridSpec) -> RealArray:
  """Gets `d/dx3 f_A` at the interface from the sine series, i.e. the sum of
  `k_n b_n` over the vertical modes."""
  return sine_coefficients(f_a, grid) @ grid.k


def trace_normal_deriv_minus(f_b: RealArray, grid: GridSpec) -> RealArray:
  """Gets `d/dx3 f_B` at the interface. The lower samples are indexed by the
  distance from the interface, so the sign flips."""
  return -(sine_coefficients(f_b, grid) @ grid.k)


def flux_jump(f: TriField, params: PhysParams) -> RealArray:
  """Gets the interface flux jump `kappa_A d3 f_A - kappa_B d3 f_B` of the bulk
  components."""
  grid = f.grid
  return params.kappa_a * trace_normal_deriv_plus(f.f_a, grid) \
      - params.kappa_b * trace_normal_deriv_minus(f.f_b, grid)
