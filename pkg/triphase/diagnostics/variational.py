"""The dissipation functional of the three-phase system and the checks that
identify the heat fluxes as its first variation.

    E_TD[theta] = -1/2 (kappa_A ||grad theta_A||^2 + kappa_B ||grad theta_B||^2
                        + kappa_S ||grad_h theta_S||^2)

Integrating the first variation by parts gives the bulk fluxes
`kappa_A Lap theta_A`, `kappa_B Lap theta_B` and the surface flux

    Q_S = kappa_S Lap_h theta_S + kappa_A d3 theta_A - kappa_B d3 theta_B,

provided the variation satisfies the trace constraint. All forms are evaluated
in closed form on `LiftedSpectrum`, so the truncated slabs contribute an
explicit far-wall term and nothing else.
"""

import logging
import math
from typing import Sequence

import numpy as np

from triphase.coupling.interface import CouplingScheme
from triphase.coupling.lift import DEFAULT_TRACE_TOL, LiftedSpectrum, \
    relative_trace_gap
from triphase.errors import ConfigurationError, DataError, DomainError
from triphase.io.table import Table
from triphase.spectral.engine import surface_weight, to_spectral
from triphase.state.field import TriField
from triphase.state.params import PhysParams
from triphase.state.trajectory import Trajectory, Variables

logger = logging.getLogger(__name__)

GATEAUX_COLUMNS = ('eps', 'central_difference', 'flux_pairing',
                   'far_wall_term', 'boundary_term', 'observed_boundary',
                   'defect')


def _dissipation(sp: LiftedSpectrum, params: PhysParams) -> float:
  a, b, s = sp.dirichlet_inners(sp)
  return -0.5 * (params.kappa_a * a + params.kappa_b * b + params.kappa_s * s)


def e_td(theta: TriField, params: PhysParams, *,
         traces: str = 'surface') -> float:
  """Evaluates the dissipation functional, which is never positive.

  Args:
      theta (TriField): the temperatures.
      params (PhysParams): the coefficients; the surface conductivity is
      `kappa_S = kappa_S~ alpha_S`.
      traces (str, optional): trace policy of `LiftedSpectrum.expand`.
      Defaults to 'surface'.
  """
  return _dissipation(LiftedSpectrum.expand(theta, params, traces=traces),
                      params)


def _surface_pairing(q, phi_s, grid) -> float:
  return float(surface_weight(grid) * np.sum(q * np.conj(phi_s)).real)


def surface_flux(sp: LiftedSpectrum, params: PhysParams):
  """Gets the coefficients of Q_S."""
  nd_a, nd_b = sp.normal_derivs()
  return -params.kappa_s * sp.grid.mu * sp.c_s + params.kappa_a * nd_a \
      - params.kappa_b * nd_b


def gateaux_check(theta: TriField, phi: TriField, params: PhysParams,
                  eps_list: Sequence[float] = (1e-1, 1e-2, 1e-3), *,
                  constrained: bool = True,
                  trace_tol: float = DEFAULT_TRACE_TOL) -> Table:
  """Compares central differences of E_TD along phi with the flux pairing
  `<kappa_A Lap theta_A, phi_A> + <kappa_B Lap theta_B, phi_B> + <Q_S,
  phi_S>`.

  The central difference is exact in eps since E_TD is quadratic. It differs
  from the pairing by the far-wall term `-kappa d_z theta(l) phi(l)` of both
  slabs and, for unconstrained variations, by the boundary term
  `kappa_A <d3 theta_A, phi_A - phi_S> - kappa_B <d3 theta_B, phi_B - phi_S>`
  at the interface. The defect of each row is the part of the difference that
  neither term explains, relative to the size of the central difference.

  Args:
      theta (TriField): trace-compatible temperatures.
      phi (TriField): the variation.
      params (PhysParams): the coefficients of the system.
      eps_list (Sequence[float], optional): step sizes. Defaults to (1e-1,
      1e-2, 1e-3).
      constrained (bool, optional): True requires phi to satisfy the trace
      constraint and takes phi_S as its bulk traces; False measures the bulk
      traces of phi by extrapolation. Defaults to True.
      trace_tol (float, optional): tolerance of the relative trace gap of a
      constrained variation. Defaults to 0.1.

  Raises:
      DataError: if a constrained variation violates the trace constraint.
      DomainError: if eps_list is empty or holds nonpositive steps.

  Returns:
      Table: one row per step size.
  """
  if not eps_list or any(not eps > 0 for eps in eps_list):
    raise DomainError(f'eps_list must hold positive steps, but was {eps_list}')
  if constrained:
    gap = relative_trace_gap(phi, params)
    if gap > trace_tol:
      raise DataError(f'the variation violates the trace constraint by '
                      f'{gap:.3e} (relative)', gap=gap)
  th = LiftedSpectrum.expand(theta, params, traces='surface')
  ph = LiftedSpectrum.expand(phi, params,
                             traces='surface' if constrained else 'extrapolate')
  grid = th.grid
  lap = th.laplacian()
  l2_a, l2_b, _ = lap.l2_inners(ph)
  pairing = params.kappa_a * l2_a + params.kappa_b * l2_b \
      + _surface_pairing(surface_flux(th, params), ph.c_s, grid)
  far_a, far_b = th.far_normal_derivs()
  phi_far_a, phi_far_b = ph.far_values()
  far_term = -params.kappa_a * _surface_pairing(far_a, phi_far_a, grid) \
      - params.kappa_b * _surface_pairing(far_b, phi_far_b, grid)
  nd_a, nd_b = th.normal_derivs()
  boundary = params.kappa_a * _surface_pairing(nd_a, ph.amp_a - ph.c_s, grid) \
      - params.kappa_b * _surface_pairing(nd_b, ph.amp_b - ph.c_s, grid)
  table = Table(GATEAUX_COLUMNS, meta={'constrained': constrained})
  for eps in eps_list:
    derivative = (_dissipation(th + ph * eps, params)
                  - _dissipation(th + ph * (-eps), params)) / (2 * eps)
    observed = derivative - pairing - far_term
    scale = max(abs(derivative), abs(pairing), abs(far_term), abs(boundary))
    defect = abs(observed - boundary) / scale if scale > 0 else 0.0
    table.append((eps, derivative, pairing, far_term, boundary, observed,
                  defect))
  table.meta['max_defect'] = table.max('defect')
  return table


def _spectra(traj: Trajectory, params: PhysParams):
  for state, deriv in zip(traj.states, traj.require_derivs()):
    if traj.variables == Variables.LIFTED:
      yield (LiftedSpectrum.from_lifted(to_spectral(state), params.beta),
             LiftedSpectrum.from_lifted(to_spectral(deriv), params.beta))
    else:
      yield (LiftedSpectrum.expand(state, params),
             LiftedSpectrum.expand(deriv, params))


def heat_balance_residual(traj: Trajectory, params: PhysParams,
                          scheme: CouplingScheme =
                          CouplingScheme.CONSERVATIVE) -> Table:
  """Evaluates the heat balance `alpha d_t theta - Q` along a trajectory with
  its stored derivatives.

  The bulk residuals are the sine-series parts of `d_t theta - kappa Lap
  theta`. The surface residual of the LITERAL scheme is `d_t theta_S - Q_S /
  alpha_S`; the one of the CONSERVATIVE scheme tests the whole system with the
  lift profile in both slabs and 1 on the surface, divided by alpha_S.

  Raises:
      StateError: if the trajectory has no stored derivatives.
  """
  grid = traj.grid
  sw = surface_weight(grid)
  half = grid.l_z / 2
  kappas = (params.kappa_a, params.kappa_b)
  table = Table(('time', 'upper_residual', 'lower_residual',
                 'surface_residual'), meta={'scheme': scheme.name})
  for t, (th, dth) in zip(traj.times, _spectra(traj, params)):
    lap = th.laplacian()
    coeffs = th.profile.coeffs
    bulk = []
    for kappa, c, amp, lc, lamp in ((kappas[0], dth.c_a, dth.amp_a, lap.c_a,
                                     lap.amp_a),
                                    (kappas[1], dth.c_b, dth.amp_b, lap.c_b,
                                     lap.amp_b)):
      res = c + amp[..., None] * coeffs \
          - kappa * (lc + lamp[..., None] * coeffs)
      bulk.append(math.sqrt(sw * half * float(np.sum(np.abs(res) ** 2))))
    if scheme == CouplingScheme.LITERAL:
      res_s = dth.c_s - surface_flux(th, params) / params.alpha_s
    else:
      m_a, m_b, _, _ = dth.profile_moments()
      _, _, g_a, g_b = th.profile_moments()
      res_s = (params.alpha_s * dth.c_s + m_a + m_b + params.kappa_a * g_a
               + params.kappa_b * g_b
               + params.kappa_s * grid.mu * th.c_s) / params.alpha_s
    table.append((t, bulk[0], bulk[1],
                  math.sqrt(sw * float(np.sum(np.abs(res_s) ** 2)))))
  table.meta['max_residual'] = max(table.max(c) for c in table.columns[1:])
  return table


def transport_check(traj: Trajectory) -> Table:
  """Compares the rate of change of the heat content of each fixed region
  with the integral of the stored derivatives.

  The rate is the difference quotient of the contents between neighbouring
  times and the integral is the mean of the integrated derivatives at both
  times, so the defect is of second order in dt.

  Raises:
      ConfigurationError: if the trajectory has a single time.
      StateError: if the trajectory has no stored derivatives.
  """
  if len(traj) < 2:
    raise ConfigurationError('the transport check needs at least two times')
  derivs = traj.require_derivs()
  grid = traj.grid
  bulk, surface = grid.h ** 2 * grid.dz, grid.h ** 2

  def content(f: TriField):
    return np.array([bulk * np.sum(f.f_a), bulk * np.sum(f.f_b),
                     surface * np.sum(f.f_s)])

  contents = np.array([content(s) for s in traj.states])
  rates = np.array([content(d) for d in derivs])
  quotient = np.diff(contents, axis=0) / traj.dt
  mean = 0.5 * (rates[1:] + rates[:-1])
  midpoints = 0.5 * (traj.times[1:] + traj.times[:-1])
  table = Table(('time', 'upper_defect', 'lower_defect', 'surface_defect'))
  table.extend((t, *np.abs(q - m)) for t, q, m in zip(midpoints, quotient,
                                                      mean))
  table.meta['max_defect'] = max(table.max(c) for c in table.columns[1:])
  return table
