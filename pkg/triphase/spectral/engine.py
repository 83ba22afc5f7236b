"""Diagonalization of the operator L by horizontal Fourier modes times vertical
sine modes.

A bulk field is expanded as

    f(x_h, z) = sum_{xi, n} c[xi, n] exp(i xi . (x_h + l_h/2)) sin(k_n z)

where z is the distance from the interface, and a surface field as
`sum_xi c[xi] exp(i xi . (x_h + l_h/2))`. The coefficients are computed with the
FFT in x_h and the type-I discrete sine transform (DST-I) in z, which makes the
homogeneous Dirichlet conditions at the interface and at the far wall exact.
The eigenvalues of L are `kappa_A (|xi|^2 + k_n^2)` on the upper bulk,
`kappa_B (|xi|^2 + k_n^2)` on the lower bulk, and `kappa_S~ |xi|^2` on the
surface.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
import scipy.fft as sfft

from triphase.errors import ConfigurationError, DomainError
from triphase.settings import worker_count
from triphase.state.field import TriField
from triphase.state.params import GridSpec, PhysParams
from triphase.state.typing import ComplexArray, RealArray


@dataclass(frozen=True, eq=False)
class SpectralTri:
  """Coefficients of a state triple in the diagonalizing basis."""
  c_a: ComplexArray
  c_b: ComplexArray
  c_s: ComplexArray
  grid: GridSpec
  weight_s: float = 1.0

  def __post_init__(self):
    for name, shape in (('c_a', self.grid.bulk_shape),
                        ('c_b', self.grid.bulk_shape),
                        ('c_s', self.grid.surface_shape)):
      arr = np.asarray(getattr(self, name), dtype=complex)
      if arr.shape != tuple(shape):
        raise ConfigurationError(
            f'{name} must have shape {tuple(shape)}, but has {arr.shape}')
      object.__setattr__(self, name, arr)

  def _check_compatible(self, other: 'SpectralTri') -> None:
    if self.grid != other.grid:
      raise ConfigurationError('coefficients live on different grids')

  def __add__(self, other: 'SpectralTri') -> 'SpectralTri':
    self._check_compatible(other)
    return SpectralTri(self.c_a + other.c_a, self.c_b + other.c_b,
                       self.c_s + other.c_s, self.grid, self.weight_s)

  def __sub__(self, other: 'SpectralTri') -> 'SpectralTri':
    self._check_compatible(other)
    return SpectralTri(self.c_a - other.c_a, self.c_b - other.c_b,
                       self.c_s - other.c_s, self.grid, self.weight_s)

  def __mul__(self, scalar) -> 'SpectralTri':
    return SpectralTri(scalar * self.c_a, scalar * self.c_b, scalar * self.c_s,
                       self.grid, self.weight_s)

  __rmul__ = __mul__

  def scale(self, m_a, m_b, m_s) -> 'SpectralTri':
    """Multiplies the components mode-wise by the given multipliers."""
    return SpectralTri(m_a * self.c_a, m_b * self.c_b, m_s * self.c_s,
                       self.grid, self.weight_s)


def zeros_spectral(grid: GridSpec, weight_s: float = 1.0) -> SpectralTri:
  return SpectralTri(np.zeros(grid.bulk_shape, dtype=complex),
                     np.zeros(grid.bulk_shape, dtype=complex),
                     np.zeros(grid.surface_shape, dtype=complex), grid,
                     weight_s)


@lru_cache(maxsize=32)
def eigenvalues(grid: GridSpec, params: PhysParams) \
        -> Tuple[RealArray, RealArray, RealArray]:
  """Gets the eigenvalues of L on the upper bulk, lower bulk and surface modes.

  The returned arrays are shared between callers and read-only.
  """
  mu = grid.mu
  modes = mu[:, :, None] + grid.k[None, None, :] ** 2
  lam_a = params.kappa_a * modes
  lam_b = params.kappa_b * modes
  lam_s = params.kappa_s_tilde * mu
  for arr in (lam_a, lam_b, lam_s):
    arr.flags.writeable = False
  return lam_a, lam_b, lam_s


def bulk_to_spectral(f: RealArray, grid: GridSpec) -> ComplexArray:
  b = sfft.dst(np.asarray(f, dtype=float), type=1, axis=-1) / (grid.n_z + 1)
  return sfft.fft2(b, axes=(0, 1), workers=worker_count()) / grid.n_h ** 2


def bulk_from_spectral(c: ComplexArray, grid: GridSpec) -> RealArray:
  b = sfft.ifft2(c * grid.n_h ** 2, axes=(0, 1), workers=worker_count()).real
  return sfft.dst(b, type=1, axis=-1) / 2


def surface_to_spectral(f: RealArray, grid: GridSpec) -> ComplexArray:
  return sfft.fft2(np.asarray(f, dtype=float), workers=worker_count()) \
      / grid.n_h ** 2


def surface_from_spectral(c: ComplexArray, grid: GridSpec) -> RealArray:
  return sfft.ifft2(c * grid.n_h ** 2, workers=worker_count()).real


def to_spectral(f: TriField) -> SpectralTri:
  """Transforms a sampled triple into its coefficients.

  Bulk fields with nonzero values at the interface or the far wall are
  projected onto the odd extension, i.e. their sine series converges slowly
  towards the boundary values (a constant profile has coefficients
  `4/(n pi)` for odd n and zero for even n).
  """
  grid = f.grid
  return SpectralTri(bulk_to_spectral(f.f_a, grid),
                     bulk_to_spectral(f.f_b, grid),
                     surface_to_spectral(f.f_s, grid), grid, f.weight_s)


def from_spectral(c: SpectralTri) -> TriField:
  grid = c.grid
  return TriField(bulk_from_spectral(c.c_a, grid),
                  bulk_from_spectral(c.c_b, grid),
                  surface_from_spectral(c.c_s, grid), grid, c.weight_s)


def apply_semigroup(c: SpectralTri, t: float,
                    params: PhysParams) -> SpectralTri:
  """Applies `exp(-tL)` mode-wise.

  Args:
      c (SpectralTri): coefficients of the initial state.
      t (float): nonnegative time.
      params (PhysParams): the coefficients defining L.

  Raises:
      DomainError: if t is negative.
  """
  if not t >= 0:
    raise DomainError(f'time must be nonnegative, but was {t}')
  lam_a, lam_b, lam_s = eigenvalues(c.grid, params)
  return c.scale(np.exp(-t * lam_a), np.exp(-t * lam_b), np.exp(-t * lam_s))


def apply_l_power(c: SpectralTri, q: float, params: PhysParams) -> SpectralTri:
  """Applies the fractional power `L^q` mode-wise.

  Args:
      c (SpectralTri): coefficients of the state.
      q (float): exponent in [0, 1]. `L^0` is the identity, including on the
      constant surface mode, whose eigenvalue is zero.
      params (PhysParams): the coefficients defining L.

  Raises:
      DomainError: if q is outside of [0, 1].
  """
  if not 0 <= q <= 1:
    raise DomainError(f'q must be in [0, 1], but was {q}')
  lam_a, lam_b, lam_s = eigenvalues(c.grid, params)
  return c.scale(np.power(lam_a, q), np.power(lam_b, q), np.power(lam_s, q))


def bulk_weight(grid: GridSpec) -> float:
  """Parseval weight of the squared bulk coefficients."""
  return grid.l_h ** 2 * grid.l_z / 2


def surface_weight(grid: GridSpec) -> float:
  """Parseval weight of the squared surface coefficients."""
  return grid.l_h ** 2


def spectral_inner(c: SpectralTri, d: SpectralTri) -> float:
  """Computes the H inner product from coefficients by Parseval's identity."""
  c._check_compatible(d)
  grid = c.grid
  bulk = np.vdot(d.c_a, c.c_a) + np.vdot(d.c_b, c.c_b)
  surface = np.vdot(d.c_s, c.c_s)
  return float((bulk_weight(grid) * bulk
                + c.weight_s * surface_weight(grid) * surface).real)


def spectral_norm(c: SpectralTri) -> float:
  return math.sqrt(max(spectral_inner(c, c), 0.0))


def grad_norms(c: SpectralTri) -> Tuple[float, float, float]:
  """Computes the squared gradient norms of the three components spectrally.

  Returns:
      Tuple[float, float, float]: `||grad f_A||^2`, `||grad f_B||^2` and the
      unweighted `||grad_h f_S||^2`.
  """
  grid = c.grid
  modes = grid.mu[:, :, None] + grid.k[None, None, :] ** 2
  g_a = bulk_weight(grid) * float(np.sum(modes * np.abs(c.c_a) ** 2))
  g_b = bulk_weight(grid) * float(np.sum(modes * np.abs(c.c_b) ** 2))
  g_s = surface_weight(grid) * float(np.sum(grid.mu * np.abs(c.c_s) ** 2))
  return g_a, g_b, g_s


def commutation_defect(c: SpectralTri, t: float, params: PhysParams) -> float:
  """Gets the largest mode-wise difference between `L exp(-tL) c` and
  `L^(1/2) exp(-tL) L^(1/2) c`, relative to the largest coefficient of the
  former."""
  direct = apply_l_power(apply_semigroup(c, t, params), 1.0, params)
  split = apply_l_power(
      apply_semigroup(apply_l_power(c, 0.5, params), t, params), 0.5, params)
  scale = max(1.0, *(float(np.max(np.abs(a)))
                     for a in (direct.c_a, direct.c_b, direct.c_s)))
  diff = max(float(np.max(np.abs(a - b))) for a, b in
             ((direct.c_a, split.c_a), (direct.c_b, split.c_b),
              (direct.c_s, split.c_s)))
  return diff / scale


def semigroup_energy_defect(c: SpectralTri, times: Sequence[float],
                            params: PhysParams, *,
                            exact: bool = False) -> float:
  """Checks `||W(t)||^2 + 2 int_0^t ||L^(1/2) W||^2 = ||W(0)||^2` along the
  free evolution `W(t) = exp(-tL) c`.

  Args:
      c (SpectralTri): initial coefficients.
      times (Sequence[float]): increasing time grid starting at 0.
      params (PhysParams): the coefficients defining L.
      exact (bool, optional): integrate the dissipation in closed form per mode
      instead of the trapezoid rule on `times`. Defaults to False.

  Returns:
      float: the largest defect over `times` relative to `||c||^2`.
  """
  times = np.asarray(times, dtype=float)
  if times.ndim != 1 or times.size == 0 or times[0] != 0 \
          or np.any(np.diff(times) <= 0):
    raise ConfigurationError('times must increase strictly from 0')
  initial = spectral_norm(c) ** 2
  if initial == 0:
    return 0.0
  lam_a, lam_b, lam_s = eigenvalues(c.grid, params)
  if exact:
    defects = []
    for t in times:
      w = apply_semigroup(c, t, params)
      loss = c.scale(np.sqrt(-np.expm1(-2 * t * lam_a)),
                     np.sqrt(-np.expm1(-2 * t * lam_b)),
                     np.sqrt(-np.expm1(-2 * t * lam_s)))
      defects.append(spectral_norm(w) ** 2 + spectral_norm(loss) ** 2
                     - initial)
    return float(np.max(np.abs(defects))) / initial
  energy = np.empty_like(times)
  rate = np.empty_like(times)
  for j, t in enumerate(times):
    w = apply_semigroup(c, t, params)
    energy[j] = spectral_norm(w) ** 2
    rate[j] = spectral_norm(apply_l_power(w, 0.5, params)) ** 2
  dissipated = np.concatenate(
      ([0.0], np.cumsum(0.5 * np.diff(times) * (rate[1:] + rate[:-1]))))
  return float(np.max(np.abs(energy + 2 * dissipated - initial))) / initial
