"""Empirical estimation of the constants in the bounds of F and in the maximal
L2-regularity estimate of the linear problem.

The constants are measured on the discrete system with random probes. Probe
trajectories are superpositions of Gaussian bumps with random decay rates, so
their time derivatives are known exactly. Forcings for the regularity constants
are single-component Gaussian bumps with damped oscillating amplitudes. All
time integrals stream over the probe time grid, so the memory use stays at a
few grid-sized arrays per worker.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Dict, List, Sequence, Tuple

import numpy as np

from triphase.coupling.interface import CouplingScheme, forcing_arrays
from triphase.errors import ConfigurationError, DomainError
from triphase.settings import worker_count
from triphase.solver.duhamel import integrator_weights
from triphase.spectral.engine import SpectralTri, bulk_to_spectral, \
    bulk_weight, eigenvalues, surface_to_spectral, surface_weight
from triphase.state.params import GridSpec, PhysParams

logger = logging.getLogger(__name__)

COMPONENTS = ('a', 'b', 's')


@dataclass(frozen=True)
class ConstantsReport:
  """Measured constants and the thresholds derived from them."""
  c_star: float
  k_a: float
  k_b: float
  k_s: float
  alpha_0: float
  beta_0: float
  c_star_big: float
  leading_factor: float
  window_t: float
  trials: int
  maximizer: int

  def to_text(self) -> str:
    """Serializes the report into `key = value` lines."""
    return ''.join(f'{k} = {v!r}\n' for k, v in asdict(self).items())

  @classmethod
  def from_text(cls, text: str) -> 'ConstantsReport':
    """Parses the output of `to_text`.

    Raises:
        ConfigurationError: if a line is malformed or keys are missing.
    """
    types = {f.name: f.type for f in fields(cls)}
    values = {}
    for no, line in enumerate(text.splitlines(), start=1):
      if not line.strip():
        continue
      key, sep, value = (p.strip() for p in line.partition('='))
      if not sep or key not in types:
        raise ConfigurationError(f'unexpected entry "{line}"', line=no)
      values[key] = int(value) if types[key] in (int, 'int') else float(value)
    missing = set(types) - set(values)
    if missing:
      raise ConfigurationError(f'missing keys: {", ".join(sorted(missing))}')
    return cls(**values)

  def thresholds_met(self, params: PhysParams) -> bool:
    return params.alpha_s > self.alpha_0 and params.beta > self.beta_0


def derive_report(c_star: float, k: Tuple[float, float, float],
                  params: PhysParams, *, window_t: float = 1.0,
                  trials: int = 0, maximizer: int = -1) -> ConstantsReport:
  """Completes measured constants with alpha_0, beta_0, the leading
  contraction factor and C_star.

  The leading factor multiplies `||phi||_X` in the bound of the Picard map
  without the `T^(1/2)` terms; C_star collects the `T^(1/2)` terms for T <= 1.
  """
  k_a, k_b, k_s = k
  kt = params.kappa_s_tilde
  ka, kb = params.kappa_a, params.kappa_b
  beta, alpha = params.beta, params.alpha_s
  rb = math.sqrt(beta)
  alpha_0 = 8 * c_star * k_s
  beta_0 = 64 * c_star ** 2 * (k_a * (1 + ka / kt) + k_b * (1 + kb / kt)) ** 2
  leading = c_star * (k_s / alpha + k_a * (1 + ka / kt) / rb
                      + k_b * (1 + kb / kt) / rb)
  sup_part = 2 / rb + (ka + kb) / (kt * rb) + (ka + kb) * beta ** 1.5 \
      + (1 + (ka + kb) * (beta + 1)) / alpha
  reg_part = k_a * ka * beta ** 1.5 + k_b * kb * beta ** 1.5 \
      + k_s * (ka + kb) * (beta + 1) / alpha
  return ConstantsReport(c_star=c_star, k_a=k_a, k_b=k_b, k_s=k_s,
                         alpha_0=alpha_0, beta_0=beta_0,
                         c_star_big=c_star * (sup_part + reg_part),
                         leading_factor=leading, window_t=window_t,
                         trials=trials, maximizer=maximizer)


def bound_prefactors(params: PhysParams, window_t: float) \
        -> Tuple[float, float, float]:
  """Gets the parameter-dependent factors of the bounds of F1, F2 and F3."""
  rt = math.sqrt(window_t)
  rb = math.sqrt(params.beta)
  kt = params.kappa_s_tilde
  p1 = 1 / rb + params.kappa_a / (kt * rb) \
      + rt * params.kappa_a * params.beta ** 2 / rb
  p2 = 1 / rb + params.kappa_b / (kt * rb) \
      + rt * params.kappa_b * params.beta ** 2 / rb
  p3 = 1 / params.alpha_s + rt * (params.kappa_a + params.kappa_b) \
      * (params.beta + 1) / params.alpha_s
  return p1, p2, p3


@dataclass(frozen=True, eq=False)
class Probe:
  """The trajectory `phi(t) = sum_k exp(-rates[k] t) shapes[k]`."""
  shapes: Sequence[SpectralTri]
  rates: Sequence[float]


def _trapezoid_weights(n: int, step: float) -> np.ndarray:
  w = np.full(n, step)
  w[0] = w[-1] = step / 2
  return w


def _sq(grid: GridSpec, a, b, s, weight_s: float = 1.0) -> float:
  return float(bulk_weight(grid) * (np.sum(np.abs(a) ** 2)
                                    + np.sum(np.abs(b) ** 2))
               + weight_s * surface_weight(grid) * np.sum(np.abs(s) ** 2))


def probe_norms(probe: Probe, params: PhysParams, window_t: float,
                steps: int, scheme: CouplingScheme = CouplingScheme.LITERAL) \
        -> Dict[str, float]:
  """Measures `||phi||_X` and `||F_i(phi)||_L2(0,T)` of a probe.

  Returns:
      Dict[str, float]: keys 'x', 'f1', 'f2' and 'f3'.
  """
  grid = probe.shapes[0].grid
  lam_a, lam_b, lam_s = eigenvalues(grid, params)
  times = np.linspace(0.0, window_t, steps + 1)
  tw = _trapezoid_weights(times.size, window_t / steps)
  sup = 0.0
  acc = dict(d=0.0, lv=0.0, f1=0.0, f2=0.0, f3=0.0)
  for t, w in zip(times, tw):
    amps = [math.exp(-r * t) for r in probe.rates]
    c = [sum(m * getattr(g, f'c_{x}') for m, g in zip(amps, probe.shapes))
         for x in COMPONENTS]
    d = [sum(-r * m * getattr(g, f'c_{x}')
             for r, m, g in zip(probe.rates, amps, probe.shapes))
         for x in COMPONENTS]
    sup = max(sup, math.sqrt(_sq(grid, *c)))
    acc['d'] += w * _sq(grid, *d)
    acc['lv'] += w * _sq(grid, lam_a * c[0], lam_b * c[1], lam_s * c[2])
    f_a, f_b, f_s = forcing_arrays(c[0], c[1], c[2], d[2], grid, params,
                                   scheme)
    acc['f1'] += w * bulk_weight(grid) * float(np.sum(np.abs(f_a) ** 2))
    acc['f2'] += w * bulk_weight(grid) * float(np.sum(np.abs(f_b) ** 2))
    acc['f3'] += w * surface_weight(grid) * float(np.sum(np.abs(f_s) ** 2))
  return dict(x=sup + math.sqrt(acc['d']) + math.sqrt(acc['lv']),
              f1=math.sqrt(acc['f1']), f2=math.sqrt(acc['f2']),
              f3=math.sqrt(acc['f3']))


def probe_ratios(probe: Probe, params: PhysParams, window_t: float,
                 steps: int, scheme: CouplingScheme = CouplingScheme.LITERAL) \
        -> Tuple[float, float, float]:
  """Gets `||F_i(phi)|| / (p_i ||phi||_X)` with the bound prefactors p_i
  divided out."""
  norms = probe_norms(probe, params, window_t, steps, scheme)
  if norms['x'] == 0:
    return 0.0, 0.0, 0.0
  p = bound_prefactors(params, window_t)
  return tuple(norms[f'f{i + 1}'] / (p[i] * norms['x']) for i in range(3))


def regularity_ratio(shape: SpectralTri, component: str, rate: float,
                     omega: float, params: PhysParams, window_t: float,
                     steps: int) -> float:
  """Measures `(||dU/dt|| + ||LU||) / ||f||` in L2(0,T) for `dU/dt + LU = f`
  with zero initial data and `f(t) = exp(-rate t) cos(omega t) shape`
  restricted to one component.

  Raises:
      DomainError: if the component isn't 'a', 'b' or 's'.
  """
  if component not in COMPONENTS:
    raise DomainError(f'component must be one of {COMPONENTS}, '
                      f'but was "{component}"')
  grid = shape.grid
  idx = COMPONENTS.index(component)
  lam = eigenvalues(grid, params)[idx]
  step = window_t / steps
  decay, w1, w2 = integrator_weights(grid, params, step)[idx]
  g = getattr(shape, f'c_{component}')
  weight = surface_weight(grid) if component == 's' else bulk_weight(grid)
  times = np.linspace(0.0, window_t, steps + 1)
  tw = _trapezoid_weights(times.size, step)
  amp = np.exp(-rate * times) * np.cos(omega * times)
  y = np.zeros_like(g)
  acc_d = acc_l = acc_f = 0.0
  for j in range(times.size):
    f = amp[j] * g
    acc_d += tw[j] * weight * float(np.sum(np.abs(-lam * y + f) ** 2))
    acc_l += tw[j] * weight * float(np.sum(np.abs(lam * y) ** 2))
    acc_f += tw[j] * weight * float(np.sum(np.abs(f) ** 2))
    if j + 1 < times.size:
      y = decay * y + w1 * f + w2 * (amp[j + 1] - amp[j]) * g
  if acc_f == 0:
    return 0.0
  return (math.sqrt(acc_d) + math.sqrt(acc_l)) / math.sqrt(acc_f)


def gaussian_bulk(grid: GridSpec, rng: np.random.Generator) -> np.ndarray:
  """Draws a Gaussian bump inside a slab, away from the interface and the far
  wall."""
  x1, x2, z = grid.mesh()
  span = grid.l_h / 4
  c1, c2 = rng.uniform(-span, span, size=2)
  cz = rng.uniform(0.2 * grid.l_z, 0.5 * grid.l_z)
  width = rng.uniform(0.6, 1.5)
  return rng.normal() * np.exp(
      -((x1 - c1) ** 2 + (x2 - c2) ** 2 + (z - cz) ** 2) / (2 * width ** 2))


def gaussian_surface(grid: GridSpec, rng: np.random.Generator) -> np.ndarray:
  x1, x2, _ = grid.mesh()
  span = grid.l_h / 4
  c1, c2 = rng.uniform(-span, span, size=2)
  width = rng.uniform(0.6, 1.5)
  return rng.normal() * np.exp(
      -((x1[..., 0] - c1) ** 2 + (x2[..., 0] - c2) ** 2) / (2 * width ** 2))


def random_probe(grid: GridSpec, rng: np.random.Generator,
                 bumps: int = 3) -> Probe:
  shapes, rates = [], []
  for _ in range(bumps):
    shapes.append(SpectralTri(
        bulk_to_spectral(gaussian_bulk(grid, rng), grid),
        bulk_to_spectral(gaussian_bulk(grid, rng), grid),
        surface_to_spectral(gaussian_surface(grid, rng), grid), grid))
    rates.append(float(rng.uniform(0.0, 5.0)))
  return Probe(shapes, rates)


def _trial(grid: GridSpec, params: PhysParams, window_t: float, steps: int,
           seed: int, trial: int) -> Tuple[Tuple[float, float, float],
                                           Tuple[float, float, float]]:
  rng = np.random.default_rng([seed, trial])
  ratios = probe_ratios(random_probe(grid, rng), params, window_t, steps)
  zero = np.zeros(grid.bulk_shape)
  k = []
  for component in COMPONENTS:
    bulk = bulk_to_spectral(gaussian_bulk(grid, rng), grid)
    surface = surface_to_spectral(gaussian_surface(grid, rng), grid)
    shape = SpectralTri(bulk if component == 'a' else zero,
                        bulk if component == 'b' else zero,
                        surface if component == 's'
                        else np.zeros(grid.surface_shape), grid)
    k.append(regularity_ratio(shape, component, float(rng.uniform(0.0, 5.0)),
                              float(rng.uniform(0.0, 20.0)), params,
                              window_t, steps))
  return ratios, tuple(k)


def estimate_constants(grid: GridSpec, params: PhysParams, trials: int = 64,
                       *, seed: int = 0, window_t: float = None,
                       steps: int = 64) -> ConstantsReport:
  """Estimates C_*, K_A, K_B and K_S as maxima over random trials.

  Args:
      grid (GridSpec): the spatial grid of the probes.
      params (PhysParams): the coefficients of the system.
      trials (int, optional): number of random trials, at least one. Defaults
      to 64.
      seed (int, optional): seed of the trials; trial i uses the seed
      sequence (seed, i), so results don't depend on the worker count.
      Defaults to 0.
      window_t (float, optional): probe window, at most 1. Defaults to
      min(1, t_end).
      steps (int, optional): number of time steps over the probe window.
      Defaults to 64.

  Raises:
      DomainError: if trials or steps is less than one, or window_t isn't in
      (0, 1].

  Returns:
      ConstantsReport: the measured constants and the derived thresholds.
  """
  if trials < 1:
    raise DomainError(f'trials must be at least 1, but was {trials}')
  if steps < 1:
    raise DomainError(f'steps must be at least 1, but was {steps}')
  window_t = min(1.0, grid.t_end) if window_t is None else window_t
  if not 0 < window_t <= 1:
    raise DomainError(f'window_t must be in (0, 1], but was {window_t}')
  with ThreadPoolExecutor(max_workers=worker_count()) as pool:
    results: List = list(pool.map(
        lambda i: _trial(grid, params, window_t, steps, seed, i),
        range(trials)))
  c_values = [max(r[0]) for r in results]
  maximizer = int(np.argmax(c_values))
  k = tuple(max(r[1][i] for r in results) for i in range(3))
  report = derive_report(c_values[maximizer], k, params, window_t=window_t,
                         trials=trials, maximizer=maximizer)
  logger.info('estimated constants from %d trials: C_*=%.4g, K=(%.4g, %.4g, '
              '%.4g), C_star=%.4g', trials, report.c_star, *k,
              report.c_star_big)
  return report
