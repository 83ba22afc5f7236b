"""Physical parameters and the truncated computational grid."""

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from triphase.errors import ConfigurationError, DomainError
from triphase.state.typing import RealArray


@dataclass(frozen=True)
class PhysParams:
  """The constant coefficients of the three-phase heat system.

  The bulk densities and heat capacities are fixed to one. The surface
  conductivity is derived from the surface diffusivity and the surface mass, i.e.
  `kappa_s = kappa_s_tilde * alpha_s`.
  """
  kappa_a: float = 1.0
  kappa_b: float = 1.0
  kappa_s_tilde: float = 1.0
  alpha_s: float = 20.0
  beta: float = 1.0

  def __post_init__(self):
    for name in ('kappa_a', 'kappa_b', 'kappa_s_tilde', 'alpha_s', 'beta'):
      value = getattr(self, name)
      if not (math.isfinite(value) and value > 0):
        raise DomainError(f'{name} must be a positive real, but was {value}')

  @property
  def kappa_s(self) -> float:
    return self.kappa_s_tilde * self.alpha_s

  def kappa(self, sign: str) -> float:
    """Gets the bulk conductivity of the half space with the given sign.

    Args:
        sign (str): '+' for the upper and '-' for the lower half space.

    Raises:
        DomainError: if the sign is neither '+' nor '-'.
    """
    return self.kappa_a if check_sign(sign) == '+' else self.kappa_b


@dataclass(frozen=True)
class GridSpec:
  """Periodic box of side `l_h` times two slabs of depth `l_z` with `n_z`
  interior sine nodes each, plus a uniform time grid on `[0, t_end]`."""
  l_h: float = 16.0
  n_h: int = 32
  l_z: float = 8.0
  n_z: int = 32
  dt: float = 1e-3
  t_end: float = 1.0

  def __post_init__(self):
    if not (self.l_h > 0 and self.l_z > 0):
      raise ConfigurationError(
          f'box sizes must be positive, but were l_h={self.l_h}, l_z={self.l_z}')
    if self.n_h <= 0 or self.n_h % 2 != 0:
      raise ConfigurationError(
          f'n_h must be an even positive integer, but was {self.n_h}')
    if self.n_z <= 0:
      raise ConfigurationError(
          f'n_z must be a positive integer, but was {self.n_z}')
    if not (self.dt > 0 and self.t_end > 0):
      raise ConfigurationError(
          f'dt and t_end must be positive, but were {self.dt}, {self.t_end}')
    steps = self.t_end / self.dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
      raise ConfigurationError(
          f't_end/dt must be an integer, but was {steps}')

  def with_changes(self, **changes) -> 'GridSpec':
    return replace(self, **changes)

  @property
  def n_steps(self) -> int:
    return int(round(self.t_end / self.dt))

  @property
  def h(self) -> float:
    return self.l_h / self.n_h

  @property
  def dz(self) -> float:
    return self.l_z / (self.n_z + 1)

  @property
  def bulk_shape(self):
    return self.n_h, self.n_h, self.n_z

  @property
  def surface_shape(self):
    return self.n_h, self.n_h

  @cached_property
  def x(self) -> RealArray:
    """Horizontal node coordinates `-l_h/2 + j*h`, `j = 0, ..., n_h-1`."""
    return -0.5 * self.l_h + self.h * np.arange(self.n_h)

  @cached_property
  def z(self) -> RealArray:
    """Distances `m*dz` of the interior nodes from the interface."""
    return self.dz * np.arange(1, self.n_z + 1)

  @cached_property
  def xi(self) -> RealArray:
    """Horizontal wavenumbers in FFT order."""
    return 2 * np.pi * np.fft.fftfreq(self.n_h, d=self.h)

  @cached_property
  def k(self) -> RealArray:
    """Vertical sine wavenumbers `n*pi/l_z`, `n = 1, ..., n_z`."""
    return np.pi * np.arange(1, self.n_z + 1) / self.l_z

  @cached_property
  def mu(self) -> RealArray:
    """Squared horizontal wavenumber |xi|^2 on the (n_h x n_h) mode grid."""
    return self.xi[:, None] ** 2 + self.xi[None, :] ** 2

  def times(self, t_end: float = None) -> RealArray:
    """Gets the uniform time grid from 0 to `t_end` (inclusive).

    Args:
        t_end (float, optional): final time, which must be a multiple of dt.
        Defaults to the grid's own t_end.

    Raises:
        ConfigurationError: if t_end isn't a multiple of dt.
    """
    t_end = self.t_end if t_end is None else t_end
    steps = t_end / self.dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
      raise ConfigurationError(
          f'{t_end} isn\'t a multiple of the time step {self.dt}')
    return self.dt * np.arange(int(round(steps)) + 1)

  def mesh(self):
    """Gets the (x1, x2, z) coordinate arrays broadcastable to bulk shape."""
    return self.x[:, None, None], self.x[None, :, None], self.z[None, None, :]


def check_sign(sign: str) -> str:
  if sign not in ('+', '-'):
    raise DomainError(f'sign must be "+" or "-", but was "{sign}"')
  return sign
