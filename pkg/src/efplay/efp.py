"""Outer iteration: birth-death entropic fictitious play and the MFL baseline.

Each epoch runs the inner sampler against the frozen outer cloud, then kills
``floor(alpha dt N)`` uniformly chosen outer particles and replaces each with
the inner particle of the same index. The inner particles are carried to the
next epoch unchanged (warm start).
"""

from __future__ import annotations

import logging
import math
import time

import numpy as np

from . import rng as streams
from .diagnostics import snapshot
from .sampler import ExactGibbsSampler1D, InnerState, run_inner
from .types import (ConfigError, DivergenceError, EfpConfig, EpochRecord, ParticleCloud,
                    RunTrace, as_positions, floor_ratio, gaussian_cloud)

log = logging.getLogger(__name__)

FIT_CHECKPOINTS = (10, 20, 50, 100, 200, 600)


def replacement_count(alpha: float, dt: float, N: int) -> int:
    return floor_ratio(alpha * dt * N, 1.0)


def outer_step(cloud, inner_final: InnerState, alpha: float, dt: float, rng):
    """Birth-death update; returns ``(new_cloud, replaced_indices)``.

    The replaced indices are a uniform K-subset of ``range(N)``, sorted. When
    the inner system has fewer particles than the outer one, the newborn
    particles are a uniform K-subset of the inner particles instead of the
    index-matched ones.
    """
    if not (0 < alpha * dt <= 1 + 1e-9):
        raise ConfigError(f"alpha*dt must lie in (0, 1], got {alpha * dt:g}")
    pos = as_positions(cloud)
    inner = as_positions(inner_final.particles)
    N, M = pos.shape[0], inner.shape[0]
    K = replacement_count(alpha, dt, N)
    if K < 1:
        raise ConfigError(f"floor(alpha*dt*N) = 0 for alpha={alpha}, dt={dt}, N={N}")
    if K > M:
        raise ValueError(f"cannot replace {K} particles from {M} inner particles")
    if inner.shape[1] != pos.shape[1]:
        raise ValueError("inner and outer particles differ in dimension")
    idx = np.sort(rng.choice(N, size=K, replace=False))
    src = idx if M >= N else rng.choice(M, size=K, replace=False)
    out = pos.copy()
    out[idx] = inner[src]
    return ParticleCloud(out), idx


def _initial_clouds(objective, config: EfpConfig):
    n_draw = max(config.N, config.inner_count)
    start = gaussian_cloud(objective.dim, n_draw, config.init_mean, config.init_std,
                           streams.rng_stream(config.seed, streams.INIT))
    pos = as_positions(start)
    return ParticleCloud(pos[: config.N]), InnerState(ParticleCloud(pos[: config.inner_count]))


def _record(trace, objective, dataset, cloud, config, epoch, wall, reference, fixed_point_check):
    snap = snapshot(objective, dataset, cloud, config.sigma2_half, reference=reference,
                    fixed_point_check=fixed_point_check)
    trace.append(EpochRecord(
        epoch=epoch, t=epoch * config.dt, objective_value=snap.objective_value,
        validation_error=snap.validation_error, free_energy=snap.free_energy,
        entropy_rel_g=snap.entropy_rel_g, aux=snap.aux, wall_s=wall,
        entropy_flagged=snap.entropy_flagged,
    ))


def run_efp(objective, dataset, config: EfpConfig, *, exact_inner: bool = False,
            reference=None, fixed_point_check: bool = False,
            checkpoints=FIT_CHECKPOINTS, callback=None) -> RunTrace:
    """Run entropic fictitious play for ``ceil(T/dt)`` epochs.

    With ``exact_inner`` the Langevin inner loop is replaced by i.i.d. draws
    from the best response (1-D objectives only). ``reference`` and
    ``fixed_point_check`` are forwarded to :func:`diagnostics.snapshot`.
    ``callback(epoch, cloud, record)`` is called after every epoch.
    Epochs are numbered from 1; record ``e`` describes the cloud at ``t = e dt``.
    """
    cloud, inner = _initial_clouds(objective, config)
    exact = ExactGibbsSampler1D(objective, dataset, config.sigma) if exact_inner else None
    trace = RunTrace(config, label="efp")
    keep = set(checkpoints)
    start = time.perf_counter()
    for e in range(config.n_epochs):
        if exact is not None:
            inner = exact.sample(cloud, config.inner_count,
                                 streams.rng_stream(config.seed, streams.EXACT, e), e)
        else:
            try:
                inner = run_inner(objective, dataset, cloud, inner, config.inner_horizon(e),
                                  config.ds, config.sigma,
                                  streams.rng_stream(config.seed, streams.INNER, e), epoch=e)
            except DivergenceError as err:
                raise err.with_epoch(e) from None
        cloud, _ = outer_step(cloud, inner, config.alpha, config.dt,
                              streams.rng_stream(config.seed, streams.REPLACE, e))
        _record(trace, objective, dataset, cloud, config, e + 1,
                time.perf_counter() - start, reference, fixed_point_check)
        if e + 1 in keep:
            trace.checkpoints[e + 1] = cloud
        if callback is not None:
            callback(e + 1, cloud, trace.records[-1])
        log.debug("efp epoch %d F=%.6g V=%.6g", e + 1, trace.records[-1].objective_value,
                  trace.records[-1].free_energy)
    trace.final_cloud = cloud
    return trace


def run_mfld_baseline(objective, dataset, config: EfpConfig, *, reference=None,
                      fixed_point_check: bool = False, checkpoints=FIT_CHECKPOINTS,
                      callback=None) -> RunTrace:
    """Mean-field Langevin baseline on the outer cloud itself.

    Each particle follows the ULA step of the EFP inner loop, except the
    measure in the drift is the current cloud (self-interaction, no inner
    loop). Per epoch the cloud advances by the same Langevin time as the EFP
    inner loop (S_first, then S_other), so both runs cost the same number of
    gradient evaluations and their traces line up epoch by epoch.
    """
    cloud, _ = _initial_clouds(objective, config)
    x = np.array(as_positions(cloud), copy=True)
    half_s2 = config.sigma2_half
    noise_scale = config.sigma * math.sqrt(config.ds)
    trace = RunTrace(config, label="mfld")
    keep = set(checkpoints)
    start = time.perf_counter()
    for e in range(config.n_epochs):
        rng = streams.rng_stream(config.seed, streams.MFLD, e)
        for step in range(floor_ratio(config.inner_horizon(e), config.ds)):
            field = objective.bind(x, dataset)
            x += -(field.gradient(x) + half_s2 * objective.reference_gradient(x)) * config.ds
            x += noise_scale * rng.standard_normal(x.shape)
            if not np.all(np.isfinite(x)):
                bad = np.flatnonzero(~np.all(np.isfinite(x), axis=1))[0]
                raise DivergenceError(bad, step, epoch=e, phase="mfld")
        cloud = ParticleCloud(x)
        _record(trace, objective, dataset, cloud, config, e + 1,
                time.perf_counter() - start, reference, fixed_point_check)
        if e + 1 in keep:
            trace.checkpoints[e + 1] = cloud
        if callback is not None:
            callback(e + 1, cloud, trace.records[-1])
    trace.final_cloud = cloud
    return trace
