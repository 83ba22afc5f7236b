"""Time-indexed sequences of state triples and the X_T norm."""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from triphase.errors import ConfigurationError, StateError
from triphase.spectral.engine import apply_l_power, spectral_norm, to_spectral
from triphase.state.field import TriField, h_norm
from triphase.state.params import GridSpec, PhysParams


class Variables(Enum):
  """The kind of fields a trajectory stores."""
  LIFTED = 1
  PHYSICAL = 2


@dataclass(frozen=True, eq=False)
class Trajectory:
  """States and stored time derivatives on a uniform time grid.

  `derivs[j]` is the time derivative taken from the evolution law at
  `times[j]`; it is never a difference quotient of the states. LIFTED
  trajectories store the u-variables with zero interface traces, PHYSICAL ones
  the temperatures themselves.
  """
  times: np.ndarray
  states: Tuple[TriField, ...]
  derivs: Optional[Tuple[TriField, ...]] = None
  variables: Variables = Variables.LIFTED
  energy_ledger: Optional[Any] = None
  report: Optional[Any] = None

  def __post_init__(self):
    times = np.array(self.times, dtype=float)
    times.flags.writeable = False
    object.__setattr__(self, 'times', times)
    object.__setattr__(self, 'states', tuple(self.states))
    if self.derivs is not None:
      object.__setattr__(self, 'derivs', tuple(self.derivs))
    if times.ndim != 1 or times.size == 0:
      raise ConfigurationError('a trajectory needs at least one time')
    if times[0] != 0:
      raise ConfigurationError(
          f'times must start at 0, but start at {times[0]}')
    if len(self.states) != times.size:
      raise ConfigurationError(
          f'{len(self.states)} states for {times.size} times')
    if self.derivs is not None and len(self.derivs) != times.size:
      raise ConfigurationError(
          f'{len(self.derivs)} derivatives for {times.size} times')
    if times.size > 1:
      steps = np.diff(times)
      if np.any(steps <= 0):
        raise ConfigurationError('times must be strictly increasing')
      if np.max(np.abs(steps - steps[0])) > 1e-9 * steps[0]:
        raise ConfigurationError('times must be uniformly spaced')
    grids = {s.grid for s in self.states}
    if len(grids) > 1:
      raise ConfigurationError('states live on different grids')

  @property
  def grid(self) -> GridSpec:
    return self.states[0].grid

  @property
  def dt(self) -> float:
    return float(self.times[1] - self.times[0]) if self.times.size > 1 else 0.0

  def __len__(self) -> int:
    return self.times.size

  def with_ledger(self, ledger) -> 'Trajectory':
    return replace(self, energy_ledger=ledger)

  def with_report(self, report) -> 'Trajectory':
    return replace(self, report=report)

  def require_derivs(self) -> Tuple[TriField, ...]:
    if self.derivs is None:
      raise StateError('the trajectory has no stored time derivatives')
    return self.derivs


def time_l2(values: Sequence[float], times: np.ndarray) -> float:
  """Gets the L2(0,T) norm of sampled norms by the trapezoid rule."""
  values = np.asarray(values, dtype=float)
  if values.size < 2:
    return 0.0
  return math.sqrt(max(float(trapezoid(values ** 2, times)), 0.0))


def xt_norm(traj: Trajectory, params: PhysParams) -> float:
  """Computes the X_T norm `sup ||v|| + ||dv/dt||_L2 + ||Lv||_L2`.

  The supremum runs over the stored times and the time integrals use the
  trapezoid rule on the stored grid.

  Args:
      traj (Trajectory): trajectory with stored derivatives.
      params (PhysParams): the coefficients defining L.

  Raises:
      StateError: if the trajectory carries no derivatives.

  Returns:
      float: the three-term sum.
  """
  derivs = traj.require_derivs()
  sup = max(h_norm(s) for s in traj.states)
  d = [h_norm(s) for s in derivs]
  lv = [spectral_norm(apply_l_power(to_spectral(s), 1.0, params))
        for s in traj.states]
  return sup + time_l2(d, traj.times) + time_l2(lv, traj.times)
