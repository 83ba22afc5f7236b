"""Real-space heat kernels of the half spaces and of the interface.

The half-space kernel with homogeneous Dirichlet data on the interface is built
by the method of images from the whole-space Gaussian. Both kernels factor
into one-dimensional Gaussians, so the propagation of sampled data is a tensor
quadrature, which serves as an independent check of the spectral semigroup.
"""

import numpy as np

from triphase.errors import DomainError
from triphase.state.params import GridSpec, PhysParams, check_sign
from triphase.state.typing import Point, RealArray


def _check_time(t: float) -> None:
  if not t > 0:
    raise DomainError(f'time must be positive, but was {t}')


def _gauss_1d(r, s: float):
  return np.exp(-np.square(r) / (4 * s)) / np.sqrt(4 * np.pi * s)


def eval_kernel_halfspace(x: Point, y: Point, t: float, kappa: float,
                          sign: str) -> RealArray:
  """Evaluates the Dirichlet heat kernel of a half space.

  The kernel is `Phi(x - y, kappa t) - Phi(x - y*, kappa t)`, where `y*` is
  the reflection of y through the interface and Phi the three-dimensional
  Gaussian. Points may be given as arrays of shape (..., 3), which are
  broadcast against each other.

  Args:
      x (Point): evaluation point(s).
      y (Point): source point(s) in the same half space as x.
      t (float): positive time.
      kappa (float): positive conductivity.
      sign (str): '+' for the upper and '-' for the lower half space.

  Raises:
      DomainError: if t or kappa isn't positive, or a point lies in the other
      half space.
  """
  _check_time(t)
  if not kappa > 0:
    raise DomainError(f'kappa must be positive, but was {kappa}')
  check_sign(sign)
  x = np.asarray(x, dtype=float)
  y = np.asarray(y, dtype=float)
  orientation = 1.0 if sign == '+' else -1.0
  if np.any(orientation * x[..., 2] < 0) or np.any(orientation * y[..., 2] < 0):
    raise DomainError(f'points must lie in the half space "{sign}"')
  s = kappa * t
  d_h = np.sum(np.square(x[..., :2] - y[..., :2]), axis=-1)
  direct = np.square(x[..., 2] - y[..., 2])
  image = np.square(x[..., 2] + y[..., 2])
  norm = (4 * np.pi * s) ** -1.5
  return norm * np.exp(-d_h / (4 * s)) * (np.exp(-direct / (4 * s))
                                          - np.exp(-image / (4 * s)))


def eval_kernel_surface(x_h: Point, t: float, params: PhysParams) -> RealArray:
  """Evaluates the surface heat kernel `exp(-|x_h|^2/(4 D t))/(4 pi D t)` with
  the surface diffusivity `D = kappa_s_tilde`.

  Raises:
      DomainError: if t isn't positive.
  """
  _check_time(t)
  x_h = np.asarray(x_h, dtype=float)
  s = params.kappa_s_tilde * t
  return np.exp(-np.sum(np.square(x_h), axis=-1) / (4 * s)) / (4 * np.pi * s)


def _periodic_offsets(grid: GridSpec) -> RealArray:
  d = grid.x[:, None] - grid.x[None, :]
  return np.mod(d + grid.l_h / 2, grid.l_h) - grid.l_h / 2


def propagate_halfspace(f: RealArray, grid: GridSpec, t: float,
                        kappa: float) -> RealArray:
  """Propagates bulk samples by quadrature against the image kernel.

  Horizontal offsets use the nearest periodic image, so the data must be
  localized well inside the box, and the far wall is ignored, so it must decay
  before the slab ends.

  Args:
      f (RealArray): bulk samples of shape (n_h, n_h, n_z), indexed by the
      distance from the interface.
      grid (GridSpec): the grid of the samples.
      t (float): positive time.
      kappa (float): positive conductivity.

  Returns:
      RealArray: the propagated samples on the same nodes.
  """
  _check_time(t)
  if not kappa > 0:
    raise DomainError(f'kappa must be positive, but was {kappa}')
  s = kappa * t
  k_h = grid.h * _gauss_1d(_periodic_offsets(grid), s)
  z = grid.z
  k_z = grid.dz * (_gauss_1d(z[:, None] - z[None, :], s)
                   - _gauss_1d(z[:, None] + z[None, :], s))
  return np.einsum('ip,jq,mr,pqr->ijm', k_h, k_h, k_z, np.asarray(f),
                   optimize=True)


def propagate_surface(f_s: RealArray, grid: GridSpec, t: float,
                      params: PhysParams) -> RealArray:
  """Propagates surface samples by quadrature against the surface kernel."""
  _check_time(t)
  k_h = grid.h * _gauss_1d(_periodic_offsets(grid), params.kappa_s_tilde * t)
  return k_h @ np.asarray(f_s) @ k_h.T
