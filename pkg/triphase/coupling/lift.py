"""The change of variables `u = theta - theta_S exp(-beta |x3|)`, which turns
interface-matched temperatures into bulk fields with zero interface traces.

Besides the pointwise lift, the module provides `LiftedSpectrum`, the
representation of a bulk field as a sine series plus an amplitude times the
lift profile. Products and gradients of such fields are integrated in closed
form, so energies of temperatures with nonzero traces are exact rather than
limited by the slow convergence of the profile's sine series.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from triphase.coupling.traces import EXTRAPOLATE, extrapolation_weights, \
    trace_minus, trace_plus
from triphase.errors import DataError, DomainError
from triphase.spectral.engine import SpectralTri, bulk_from_spectral, \
    bulk_to_spectral, surface_from_spectral, \
    surface_to_spectral, surface_weight
from triphase.state.field import TriField
from triphase.state.params import GridSpec, PhysParams, check_sign
from triphase.state.typing import ComplexArray, RealArray

DEFAULT_TRACE_TOL = 0.1


@dataclass(frozen=True)
class Profile:
  """The lift profile `psi(z) = exp(-beta z)` on a slab of depth l_z.

  `coeffs` are the exact sine projection coefficients
  `(2/l_z) int_0^l_z psi(z) sin(k_n z) dz`, `norm_sq` is `||psi||^2` over the
  slab and `tail` the part of it the sine modes miss.
  """
  beta: float
  samples: RealArray
  coeffs: RealArray
  flux_weights: RealArray
  norm_sq: float
  tail: float
  far_value: float
  extrapolated: float


@lru_cache(maxsize=32)
def _profile(l_z: float, n_z: int, beta: float) -> Profile:
  z = l_z * np.arange(1, n_z + 1) / (n_z + 1)
  k = np.pi * np.arange(1, n_z + 1) / l_z
  far = math.exp(-beta * l_z)
  parity = np.where(np.arange(1, n_z + 1) % 2 == 0, 1.0, -1.0)
  flux_weights = k * (1 - parity * far)
  coeffs = (2 / l_z) * flux_weights / (k ** 2 + beta ** 2)
  norm_sq = -math.expm1(-2 * beta * l_z) / (2 * beta)
  tail = norm_sq - (l_z / 2) * float(np.sum(coeffs ** 2))
  samples = np.exp(-beta * z)
  w = extrapolation_weights(n_z)
  for arr in (samples, coeffs, flux_weights):
    arr.flags.writeable = False
  return Profile(beta=beta, samples=samples, coeffs=coeffs,
                 flux_weights=flux_weights, norm_sq=norm_sq, tail=tail,
                 far_value=far, extrapolated=float(samples[:w.size] @ w))


def profile(grid: GridSpec, beta: float) -> Profile:
  """Gets the cached lift profile for the vertical grid of `grid`."""
  if not beta > 0:
    raise DomainError(f'beta must be positive, but was {beta}')
  return _profile(float(grid.l_z), int(grid.n_z), float(beta))


def profile_coefficients(grid: GridSpec, beta: float) -> RealArray:
  return profile(grid, beta).coeffs


def _extend(f_s: RealArray, prof: Profile) -> RealArray:
  return np.asarray(f_s)[:, :, None] * prof.samples[None, None, :]


def trace_gaps(theta: TriField, params: PhysParams) \
        -> Tuple[RealArray, RealArray]:
  """Measures `gamma_+[theta_A] - theta_S` and `gamma_-[theta_B] - theta_S`.

  The gaps are the extrapolated interface values of `theta - theta_S psi`, so
  the lift profile itself contributes no extrapolation error.
  """
  prof = profile(theta.grid, params.beta)
  ext = _extend(theta.f_s, prof)
  return (trace_plus(theta.f_a - ext, theta.grid, method=EXTRAPOLATE),
          trace_minus(theta.f_b - ext, theta.grid, method=EXTRAPOLATE))


def relative_trace_gap(theta: TriField, params: PhysParams) -> float:
  """Gets the largest trace gap relative to the largest field value."""
  gap_a, gap_b = trace_gaps(theta, params)
  gap = float(max(np.max(np.abs(gap_a)), np.max(np.abs(gap_b))))
  scale = theta.max_abs()
  return gap / scale if scale > 0 else 0.0


def lift_to_u(theta: TriField, params: PhysParams, *,
              trace_tol: float = DEFAULT_TRACE_TOL) -> TriField:
  """Lifts temperatures to u-variables with zero interface traces.

  Args:
      theta (TriField): temperatures whose bulk traces match the surface
      temperature.
      params (PhysParams): parameters providing the lift rate beta.
      trace_tol (float, optional): tolerance of the relative trace gap.
      Defaults to 0.1, since the extrapolated traces of sampled fields are
      only accurate to the fourth order of the vertical spacing.

  Raises:
      DataError: if the traces are incompatible beyond the tolerance.

  Returns:
      TriField: `(theta_A - theta_S psi, theta_B - theta_S psi, theta_S)`.
  """
  gap = relative_trace_gap(theta, params)
  if gap > trace_tol:
    raise DataError(
        f'bulk traces differ from the surface field by {gap:.3e} '
        f'(relative), which exceeds the tolerance {trace_tol:.1e}', gap=gap)
  ext = _extend(theta.f_s, profile(theta.grid, params.beta))
  return TriField(theta.f_a - ext, theta.f_b - ext, theta.f_s, theta.grid,
                  theta.weight_s)


def lower_to_theta(u: TriField, params: PhysParams) -> TriField:
  """Inverts `lift_to_u`: `theta = u + u_S psi` in both half spaces."""
  ext = _extend(u.f_s, profile(u.grid, params.beta))
  return TriField(u.f_a + ext, u.f_b + ext, u.f_s, u.grid, u.weight_s)


def project_compatible(theta: TriField, params: PhysParams) -> TriField:
  """Makes the bulk traces match the surface field by adding multiples of the
  lift profile, so that the extrapolated trace gaps vanish."""
  prof = profile(theta.grid, params.beta)
  gap_a, gap_b = trace_gaps(theta, params)
  return TriField(theta.f_a - _extend(gap_a / prof.extrapolated, prof),
                  theta.f_b - _extend(gap_b / prof.extrapolated, prof),
                  theta.f_s, theta.grid, theta.weight_s)


def _gauss_legendre(l_z: float, panels: int = 16, points: int = 16):
  nodes, weights = np.polynomial.legendre.leggauss(points)
  edges = np.linspace(0.0, l_z, panels + 1)
  half = 0.5 * np.diff(edges)
  mid = 0.5 * (edges[1:] + edges[:-1])
  z = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
  w = (half[:, None] * weights[None, :]).ravel()
  return z, w


def weighted_surface_norm(f_s: RealArray, params: PhysParams, sign: str,
                          grid: GridSpec) -> float:
  """Computes `||exp(-beta |x3|) f_S||` over one slab.

  The horizontal integral uses the grid's midpoint weights and the vertical
  one composite Gauss-Legendre quadrature, which resolves the profile to
  machine precision. For tensor data the value equals
  `sqrt((1 - exp(-2 beta l_z))/(2 beta)) ||f_S||`.

  Args:
      f_s (RealArray): surface samples of shape (n_h, n_h).
      params (PhysParams): parameters providing beta.
      sign (str): '+' for the upper and '-' for the lower half space.
      grid (GridSpec): the grid of the samples.
  """
  check_sign(sign)
  z, w = _gauss_legendre(grid.l_z)
  vertical = float(np.sum(w * np.exp(-2 * params.beta * z)))
  horizontal = grid.h ** 2 * float(np.sum(np.square(f_s)))
  return math.sqrt(vertical * horizontal)


@dataclass(frozen=True, eq=False)
class LiftedSpectrum:
  """Bulk fields as `sum_n c[xi, n] sin(k_n z) + amp[xi] psi(z)` per
  horizontal mode, and a surface field with coefficients `c_s`.

  For a trace-compatible temperature both amplitudes equal `c_s`. Derived
  quantities such as Laplacians use the same representation with other
  amplitudes.
  """
  c_a: ComplexArray
  amp_a: ComplexArray
  c_b: ComplexArray
  amp_b: ComplexArray
  c_s: ComplexArray
  grid: GridSpec
  beta: float

  @property
  def profile(self) -> Profile:
    return profile(self.grid, self.beta)

  @classmethod
  def from_lifted(cls, v: SpectralTri, beta: float) -> 'LiftedSpectrum':
    """Lowers u-variable coefficients to temperatures exactly."""
    return cls(v.c_a, v.c_s, v.c_b, v.c_s, v.c_s, v.grid, beta)

  @classmethod
  def expand(cls, theta: TriField, params: PhysParams, *,
             traces: str = 'surface') -> 'LiftedSpectrum':
    """Represents sampled temperatures.

    Args:
        theta (TriField): the samples.
        params (PhysParams): parameters providing beta.
        traces (str, optional): 'surface' takes the surface field as the trace
        of both bulk fields; 'extrapolate' measures each bulk trace by
        extrapolation, which admits variations violating the trace
        constraint. Defaults to 'surface'.

    Raises:
        DomainError: if the trace policy is unknown.
    """
    grid = theta.grid
    prof = profile(grid, params.beta)
    if traces == 'surface':
      t_a = t_b = np.asarray(theta.f_s)
    elif traces == 'extrapolate':
      gap_a, gap_b = trace_gaps(theta, params)
      t_a = theta.f_s + gap_a / prof.extrapolated
      t_b = theta.f_s + gap_b / prof.extrapolated
    else:
      raise DomainError(f'trace policy "{traces}" isn\'t supported')
    c_a = bulk_to_spectral(theta.f_a - _extend(t_a, prof), grid)
    c_b = bulk_to_spectral(theta.f_b - _extend(t_b, prof), grid)
    return cls(c_a, surface_to_spectral(t_a, grid), c_b,
               surface_to_spectral(t_b, grid),
               surface_to_spectral(theta.f_s, grid), grid, params.beta)

  def to_field(self, weight_s: float = 1.0) -> TriField:
    prof = self.profile
    grid = self.grid
    f_a = bulk_from_spectral(self.c_a, grid) \
        + _extend(surface_from_spectral(self.amp_a, grid), prof)
    f_b = bulk_from_spectral(self.c_b, grid) \
        + _extend(surface_from_spectral(self.amp_b, grid), prof)
    return TriField(f_a, f_b, surface_from_spectral(self.c_s, grid), grid,
                    weight_s)

  def __add__(self, other: 'LiftedSpectrum') -> 'LiftedSpectrum':
    return LiftedSpectrum(self.c_a + other.c_a, self.amp_a + other.amp_a,
                          self.c_b + other.c_b, self.amp_b + other.amp_b,
                          self.c_s + other.c_s, self.grid, self.beta)

  def __mul__(self, scalar: float) -> 'LiftedSpectrum':
    return LiftedSpectrum(scalar * self.c_a, scalar * self.amp_a,
                          scalar * self.c_b, scalar * self.amp_b,
                          scalar * self.c_s, self.grid, self.beta)

  __rmul__ = __mul__

  def laplacian(self) -> 'LiftedSpectrum':
    """Applies the Laplacian to the bulk and the horizontal Laplacian to the
    surface component; `psi'' = beta^2 psi` keeps the profile amplitudes in
    the profile direction."""
    mu = self.grid.mu
    modes = mu[:, :, None] + self.grid.k[None, None, :] ** 2
    b2 = self.beta ** 2
    return LiftedSpectrum(-modes * self.c_a, (b2 - mu) * self.amp_a,
                          -modes * self.c_b, (b2 - mu) * self.amp_b,
                          -mu * self.c_s, self.grid, self.beta)

  def normal_derivs(self) -> Tuple[ComplexArray, ComplexArray]:
    """Gets the coefficients of `d3 theta_A` and `d3 theta_B` at the
    interface."""
    k = self.grid.k
    return (self.c_a @ k - self.beta * self.amp_a,
            -(self.c_b @ k) + self.beta * self.amp_b)

  def _bulk_l2(self, c1, t1, c2, t2) -> float:
    prof = self.profile
    half = self.grid.l_z / 2
    per_mode = half * np.sum(c1 * np.conj(c2), axis=-1) \
        + half * (c1 @ prof.coeffs) * np.conj(t2) \
        + half * t1 * np.conj(c2 @ prof.coeffs) \
        + prof.norm_sq * t1 * np.conj(t2)
    return float(surface_weight(self.grid) * np.sum(per_mode).real)

  def _bulk_dirichlet(self, c1, t1, c2, t2) -> float:
    prof = self.profile
    grid = self.grid
    half = grid.l_z / 2
    b2 = self.beta ** 2
    vertical = half * np.sum(grid.k ** 2 * c1 * np.conj(c2), axis=-1) \
        - b2 * half * (c1 @ prof.coeffs) * np.conj(t2) \
        - b2 * half * t1 * np.conj(c2 @ prof.coeffs) \
        + b2 * prof.norm_sq * t1 * np.conj(t2)
    horizontal = grid.mu * (
        half * np.sum(c1 * np.conj(c2), axis=-1)
        + half * (c1 @ prof.coeffs) * np.conj(t2)
        + half * t1 * np.conj(c2 @ prof.coeffs)
        + prof.norm_sq * t1 * np.conj(t2))
    return float(surface_weight(grid) * np.sum(vertical + horizontal).real)

  def profile_moments(self) -> Tuple[ComplexArray, ...]:
    """Gets per horizontal mode the L2 and the gradient inner products of both
    bulk fields with the lift profile, in the order (A, B, grad A, grad B)."""
    prof = self.profile
    half = self.grid.l_z / 2
    mu = self.grid.mu
    b2 = self.beta ** 2
    out = []
    for c, t in ((self.c_a, self.amp_a), (self.c_b, self.amp_b)):
      out.append(half * (c @ prof.coeffs) + prof.norm_sq * t)
    for c, t in ((self.c_a, self.amp_a), (self.c_b, self.amp_b)):
      out.append((mu - b2) * half * (c @ prof.coeffs)
                 + (mu + b2) * prof.norm_sq * t)
    return tuple(out)

  def far_values(self) -> Tuple[ComplexArray, ComplexArray]:
    """Gets the coefficients of both bulk fields at the far walls."""
    far = self.profile.far_value
    return self.amp_a * far, self.amp_b * far

  def far_normal_derivs(self) -> Tuple[ComplexArray, ComplexArray]:
    """Gets the coefficients of the derivatives along the distance from the
    interface at both far walls."""
    k = self.grid.k
    parity = np.where(np.arange(1, k.size + 1) % 2 == 0, 1.0, -1.0)
    far = self.profile.far_value
    return (self.c_a @ (k * parity) - self.beta * far * self.amp_a,
            self.c_b @ (k * parity) - self.beta * far * self.amp_b)

  def l2_inners(self, other: 'LiftedSpectrum') -> Tuple[float, float, float]:
    """Gets the three unweighted L2 inner products with `other`."""
    s = float(surface_weight(self.grid)
              * np.sum(self.c_s * np.conj(other.c_s)).real)
    return (self._bulk_l2(self.c_a, self.amp_a, other.c_a, other.amp_a),
            self._bulk_l2(self.c_b, self.amp_b, other.c_b, other.amp_b), s)

  def dirichlet_inners(self, other: 'LiftedSpectrum') \
          -> Tuple[float, float, float]:
    """Gets the three gradient inner products with `other`."""
    s = float(surface_weight(self.grid)
              * np.sum(self.grid.mu * self.c_s * np.conj(other.c_s)).real)
    return (self._bulk_dirichlet(self.c_a, self.amp_a, other.c_a,
                                 other.amp_a),
            self._bulk_dirichlet(self.c_b, self.amp_b, other.c_b,
                                 other.amp_b), s)

  def energy(self, alpha_s: float) -> float:
    """Gets `||theta_A||^2 + ||theta_B||^2 + alpha_S ||theta_S||^2`."""
    a, b, s = self.l2_inners(self)
    return a + b + alpha_s * s

  def dissipation_rate(self, params: PhysParams) -> float:
    """Gets `2 (kappa_A ||grad theta_A||^2 + kappa_B ||grad theta_B||^2
    + kappa_S ||grad_h theta_S||^2)`."""
    a, b, s = self.dirichlet_inners(self)
    return 2 * (params.kappa_a * a + params.kappa_b * b + params.kappa_s * s)

