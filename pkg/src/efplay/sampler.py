"""Inner iteration: Langevin sampling of the best response to a frozen cloud.

Given the outer measure m (a frozen cloud), the best response is the Gibbs
measure with density proportional to

    exp(-(2 / sigma^2) dF/dm(m, x) - U(x)),

the stationary law of dX = -(DF(m, X) + sigma^2/2 grad U(X)) ds + sigma dW.
The inner chain is the Euler discretisation of that SDE (ULA).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import DivergenceError, ParticleCloud, as_positions, floor_ratio


@dataclass(frozen=True)
class InnerState:
    """Inner Langevin particles carried from one epoch to the next (warm start)."""

    particles: ParticleCloud
    epoch_of_last_run: int = -1

    @property
    def M(self) -> int:
        return len(self.particles)


def _drift_from_field(field, objective, x, sigma):
    return -(field.gradient(x) + 0.5 * sigma**2 * objective.reference_gradient(x))


def drift(objective, dataset, frozen_cloud, x, sigma: float) -> np.ndarray:
    """-(DF(m, x) + sigma^2/2 grad U(x)) with m = ``frozen_cloud``."""
    return _drift_from_field(objective.bind(frozen_cloud, dataset), objective, x, sigma)


def ula_step(x, drift_value, sigma: float, ds: float, noise) -> np.ndarray:
    """One Euler-Maruyama step ``x + drift ds + sigma sqrt(ds) noise``.

    Raises :class:`DivergenceError` naming the first particle (row) that
    became non-finite.
    """
    if not ds > 0:
        raise ValueError(f"ds must be > 0, got {ds}")
    x = np.asarray(x, dtype=float)
    out = x + np.asarray(drift_value) * ds + sigma * np.sqrt(ds) * np.asarray(noise)
    _check_finite(out, step=0)
    return out


def _check_finite(x, step, epoch=None, phase="inner"):
    if not np.all(np.isfinite(x)):
        bad = np.flatnonzero(~np.all(np.isfinite(np.atleast_2d(x)), axis=1))[0]
        raise DivergenceError(bad, step, epoch=epoch, phase=phase)


def run_inner(objective, dataset, frozen_cloud, state: InnerState, S: float, ds: float,
              sigma: float, rng, epoch: int | None = None) -> InnerState:
    """Advance every inner particle by floor(S/ds) ULA steps.

    ``frozen_cloud`` stays fixed for the whole run, so the inner particles
    never interact. ``rng`` only needs a ``standard_normal(shape)`` method;
    one ``(M, n)`` block is drawn per step, in order, so two chained calls of
    S/2 consume the same numbers as one call of S.
    """
    if not ds > 0:
        raise ValueError(f"ds must be > 0, got {ds}")
    steps = floor_ratio(S, ds) if S > 0 else 0
    x = np.array(as_positions(state.particles), copy=True)
    if steps == 0:
        return state
    field = objective.bind(frozen_cloud, dataset)
    half_s2 = 0.5 * sigma**2
    noise_scale = sigma * np.sqrt(ds)
    for step in range(steps):
        b = -(field.gradient(x) + half_s2 * objective.reference_gradient(x))
        x += b * ds
        x += noise_scale * rng.standard_normal(x.shape)
        _check_finite(x, step, epoch)
    return InnerState(ParticleCloud(x), state.epoch_of_last_run if epoch is None else epoch)


def gibbs_log_density_unnormalized(objective, dataset, frozen_cloud, x, sigma: float):
    """log of the best-response density up to a constant: -(2/sigma^2) dF/dm - U."""
    lin = objective.linear_derivative(frozen_cloud, dataset, x)
    return -(2.0 / sigma**2) * lin - objective.reference_potential(x)


def gibbs_density_on_grid(objective, dataset, frozen_cloud, sigma: float,
                          L: float = 6.0, nodes: int = 2001):
    """Trapezoid-normalised best-response density on ``[-L, L]`` (1-D only)."""
    if objective.dim != 1:
        raise ValueError("grid densities are only available for 1-D problems")
    grid = np.linspace(-L, L, nodes)
    logp = gibbs_log_density_unnormalized(objective, dataset, frozen_cloud, grid[:, None], sigma)
    p = np.exp(logp - logp.max())
    p /= np.trapezoid(p, grid)
    return grid, p


class ExactGibbsSampler1D:
    """I.i.d. draws from the 1-D best response by inverse cdf on a grid.

    Stands in for the inner Langevin run when the outer dynamics are tested
    in isolation from discretisation bias.
    """

    def __init__(self, objective, dataset, sigma: float, L: float = 6.0, nodes: int = 2001):
        self.objective = objective
        self.dataset = dataset
        self.sigma = sigma
        self.L = L
        self.nodes = nodes

    def cdf_table(self, frozen_cloud):
        grid, p = gibbs_density_on_grid(self.objective, self.dataset, frozen_cloud,
                                        self.sigma, self.L, self.nodes)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (p[1:] + p[:-1]) * np.diff(grid))])
        return grid, cdf / cdf[-1]

    def sample(self, frozen_cloud, M: int, rng, epoch: int = -1) -> InnerState:
        grid, cdf = self.cdf_table(frozen_cloud)
        u = rng.random(M)
        return InnerState(ParticleCloud(np.interp(u, cdf, grid)[:, None]), epoch)
