"""Mode-wise evaluation of the Duhamel formula

    V(t) = exp(-tL) V0 + int_0^t exp(-(t - s)L) F(s) ds

with an exponential integrator. Between two time nodes the forcing is
interpolated linearly, and the integral of the interpolant is evaluated exactly
with the weights phi1 and phi2. The homogeneous part is therefore exact, and
the forcing contributes a second-order error in the time step.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from triphase.errors import ConfigurationError
from triphase.spectral.engine import SpectralTri, bulk_weight, eigenvalues, \
    from_spectral, surface_weight
from triphase.state.params import GridSpec, PhysParams
from triphase.state.trajectory import Trajectory, Variables
from triphase.state.typing import ComplexArray, RealArray

_SERIES_TERMS = 14
_SERIES_RADIUS = 0.1


def phi_functions(z: RealArray) -> Tuple[RealArray, RealArray]:
  """Evaluates `phi1(z) = (e^z - 1)/z` and `phi2(z) = (e^z - 1 - z)/z^2`.

  Small arguments use the Taylor series, so `phi1(0) = 1` and
  `phi2(0) = 1/2`.
  """
  z = np.asarray(z, dtype=float)
  small = np.abs(z) < _SERIES_RADIUS
  safe = np.where(small, 1.0, z)
  em1 = np.expm1(safe)
  phi1 = em1 / safe
  phi2 = (em1 - safe) / safe ** 2
  zs = np.where(small, z, 0.0)
  s1 = np.zeros_like(z)
  s2 = np.zeros_like(z)
  power = np.ones_like(z)
  for j in range(_SERIES_TERMS):
    s1 += power / math.factorial(j + 1)
    s2 += power / math.factorial(j + 2)
    power = power * zs
  return np.where(small, s1, phi1), np.where(small, s2, phi2)


@lru_cache(maxsize=16)
def integrator_weights(grid: GridSpec, params: PhysParams, step: float):
  """Gets `(exp(-lam h), h phi1(-lam h), h phi2(-lam h))` for the three
  components, keyed by grid, parameters and step h."""
  weights = []
  for lam in eigenvalues(grid, params):
    z = -lam * step
    phi1, phi2 = phi_functions(z)
    triple = (np.exp(z), step * phi1, step * phi2)
    for arr in triple:
      arr.flags.writeable = False
    weights.append(triple)
  return tuple(weights)


@dataclass(frozen=True, eq=False)
class SpectralPath:
  """Coefficients and stored derivatives of a trajectory, stacked in time
  along the first axis."""
  times: RealArray
  a: ComplexArray
  b: ComplexArray
  s: ComplexArray
  da: ComplexArray
  db: ComplexArray
  ds: ComplexArray
  grid: GridSpec
  weight_s: float = 1.0

  def __len__(self) -> int:
    return self.times.size

  def state(self, j: int) -> SpectralTri:
    return SpectralTri(self.a[j], self.b[j], self.s[j], self.grid,
                       self.weight_s)

  def deriv(self, j: int) -> SpectralTri:
    return SpectralTri(self.da[j], self.db[j], self.ds[j], self.grid,
                       self.weight_s)

  def __sub__(self, other: 'SpectralPath') -> 'SpectralPath':
    return SpectralPath(self.times, self.a - other.a, self.b - other.b,
                        self.s - other.s, self.da - other.da,
                        self.db - other.db, self.ds - other.ds, self.grid,
                        self.weight_s)

  def shifted(self, offset: float) -> 'SpectralPath':
    return SpectralPath(self.times + offset, self.a, self.b, self.s, self.da,
                        self.db, self.ds, self.grid, self.weight_s)

  def norms(self, a, b, s) -> RealArray:
    """Gets the H norms of stacked coefficient arrays per time."""
    bulk = np.sum(np.abs(a) ** 2, axis=(1, 2, 3)) \
        + np.sum(np.abs(b) ** 2, axis=(1, 2, 3))
    surface = np.sum(np.abs(s) ** 2, axis=(1, 2))
    return np.sqrt(bulk_weight(self.grid) * bulk
                   + self.weight_s * surface_weight(self.grid) * surface)

  def l_norms(self, params: PhysParams) -> RealArray:
    lam_a, lam_b, lam_s = eigenvalues(self.grid, params)
    return self.norms(lam_a * self.a, lam_b * self.b, lam_s * self.s)

  def xt_parts(self, params: PhysParams) -> Tuple[float, float, float]:
    """Gets `sup ||v||`, `||dv/dt||_L2` and `||Lv||_L2` with the trapezoid
    rule in time."""
    sup = float(np.max(self.norms(self.a, self.b, self.s)))
    if len(self) < 2:
      return sup, 0.0, 0.0
    d = self.norms(self.da, self.db, self.ds)
    lv = self.l_norms(params)
    return (sup, math.sqrt(float(trapezoid(d ** 2, self.times))),
            math.sqrt(float(trapezoid(lv ** 2, self.times))))

  def xt_norm(self, params: PhysParams) -> float:
    return sum(self.xt_parts(params))

  def to_trajectory(self, variables: Variables = Variables.LIFTED) \
          -> Trajectory:
    states = [from_spectral(self.state(j)) for j in range(len(self))]
    derivs = [from_spectral(self.deriv(j)) for j in range(len(self))]
    return Trajectory(self.times - self.times[0], states, derivs, variables)


def frozen_path(v0: SpectralTri, times: RealArray) -> SpectralPath:
  """Holds v0 constant in time with a zero derivative."""
  n = times.size
  a = np.broadcast_to(v0.c_a, (n,) + v0.c_a.shape).copy()
  b = np.broadcast_to(v0.c_b, (n,) + v0.c_b.shape).copy()
  s = np.broadcast_to(v0.c_s, (n,) + v0.c_s.shape).copy()
  return SpectralPath(times, a, b, s, np.zeros_like(a), np.zeros_like(b),
                      np.zeros_like(s), v0.grid, v0.weight_s)


def integrate(v0: SpectralTri, f_a: ComplexArray, f_b: ComplexArray,
              f_s: ComplexArray, times: RealArray,
              params: PhysParams) -> SpectralPath:
  """Integrates `dv/dt + Lv = F` from v0 over uniform `times` with the
  forcing coefficients stacked in time."""
  grid = v0.grid
  n = times.size
  if f_a.shape[0] != n or f_b.shape[0] != n or f_s.shape[0] != n:
    raise ConfigurationError(
        f'forcing has {f_a.shape[0]} samples for {n} times')
  lams = eigenvalues(grid, params)
  out = []
  forcing = (f_a, f_b, f_s)
  if n > 1:
    weights = integrator_weights(grid, params, float(times[1] - times[0]))
  for idx, (y0, f) in enumerate(zip((v0.c_a, v0.c_b, v0.c_s), forcing)):
    y = np.empty((n,) + y0.shape, dtype=complex)
    y[0] = y0
    if n > 1:
      decay, w1, w2 = weights[idx]
      for j in range(n - 1):
        y[j + 1] = decay * y[j] + w1 * f[j] + w2 * (f[j + 1] - f[j])
    out.append((y, -lams[idx] * y + f))
  (a, da), (b, db), (s, ds) = out
  return SpectralPath(np.asarray(times, dtype=float), a, b, s, da, db, ds,
                      grid, v0.weight_s)


def duhamel_step(v0: SpectralTri, forcing: Sequence[SpectralTri],
                 window: Tuple[float, float],
                 params: PhysParams) -> Trajectory:
  """Evaluates the mild solution on a window with sampled forcing.

  Args:
      v0 (SpectralTri): initial coefficients.
      forcing (Sequence[SpectralTri]): forcing at every node of the window's
      time grid, whose step is the grid's dt.
      window (Tuple[float, float]): start and end of the window.
      params (PhysParams): the coefficients defining L.

  Raises:
      ConfigurationError: if the forcing isn't sampled on the window's grid.

  Returns:
      Trajectory: the lifted states with their derivatives `-Lv + F`, in the
      window's local time.
  """
  grid = v0.grid
  start, end = window
  steps = (end - start) / grid.dt
  n = int(round(steps)) + 1
  if end <= start or abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
    raise ConfigurationError(
        f'window [{start}, {end}] isn\'t a multiple of dt={grid.dt}')
  if len(forcing) != n:
    raise ConfigurationError(
        f'expected {n} forcing samples on the window, but got {len(forcing)}')
  if any(f.grid != grid for f in forcing):
    raise ConfigurationError('forcing lives on a different grid')
  times = grid.dt * np.arange(n)
  path = integrate(v0, np.stack([f.c_a for f in forcing]),
                   np.stack([f.c_b for f in forcing]),
                   np.stack([f.c_s for f in forcing]), times, params)
  return path.to_trajectory()
