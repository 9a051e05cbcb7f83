"""Mean-field objectives F(m) with their linear and intrinsic derivatives.

Two concrete objectives are provided:

* :class:`NnObjective` -- quadratic loss of a two-layer network whose
  neurons are the particles ``x = (beta, alpha_1..alpha_d, gamma)``; the
  network output is ``E^m[h(beta) phi(alpha . z + gamma)]`` with
  ``phi(t) = clip(t, 0, 5)`` and ``h(b) = clip(b, -5, 5)``.
* :class:`ToyLinearObjective` -- ``F(m) = E^m[v]`` for a fixed potential
  ``v``. Its linear derivative does not depend on ``m``, so the best
  response is one fixed Gibbs measure known in closed form.

Both use the standard Gaussian reference ``U(x) = |x|^2/2 + (n/2) log 2pi``.

Points ``x`` may be a single vector ``(n,)`` or a batch ``(M, n)``; batched
calls return one value (or one gradient row) per point.
"""

from __future__ import annotations

import math

import numpy as np

from .types import as_positions

ACT_CAP = 5.0
TRUNC_CAP = 5.0


def reference_potential(x) -> np.ndarray | float:
    """U(x) = |x|^2 / 2 + (n/2) log(2 pi), so that exp(-U) integrates to 1."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1] if x.ndim else 1
    return 0.5 * np.sum(x * x, axis=-1) + 0.5 * n * math.log(2 * math.pi)


def reference_gradient(x) -> np.ndarray:
    return np.array(x, dtype=float, copy=True)


def activation(t):
    return np.clip(t, 0.0, ACT_CAP)


def activation_grad(t):
    # a.e. derivative; exact kinks get 0
    return ((t > 0.0) & (t < ACT_CAP)).astype(float)


def truncation(b):
    return np.clip(b, -TRUNC_CAP, TRUNC_CAP)


def truncation_grad(b):
    return ((b > -TRUNC_CAP) & (b < TRUNC_CAP)).astype(float)


def _as_batch(x):
    x = np.asarray(x, dtype=float)
    return np.atleast_2d(x), x.ndim == 1


class _Objective:
    """Shared reference-measure plumbing."""

    dim: int

    def reference_potential(self, x):
        return reference_potential(x)

    def reference_gradient(self, x):
        return reference_gradient(x)

    def _check_dim(self, x):
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got {x.shape[-1]}")

    def linear_derivative(self, cloud, dataset, x):
        return self.bind(cloud, dataset).linear(x)

    def intrinsic_derivative(self, cloud, dataset, x):
        return self.bind(cloud, dataset).gradient(x)


class NnField:
    """delta F / delta m and its gradient with the measure argument frozen.

    The residuals ``r_k = E^m[phihat(., z_k)] - y_k`` are computed once, so
    repeated evaluation over an inner Langevin run costs O(M K d).
    """

    def __init__(self, objective: "NnObjective", residuals: np.ndarray, features: np.ndarray):
        self.objective = objective
        self.residuals = residuals
        self.features = features
        self.K = residuals.shape[0]

    def linear(self, x):
        xb, single = _as_batch(x)
        self.objective._check_dim(xb)
        out = self.objective.neuron_features(xb, self.features) @ self.residuals / self.K
        return out[0] if single else out

    def gradient(self, x):
        xb, single = _as_batch(x)
        self.objective._check_dim(xb)
        z = self.features
        beta, alpha, gamma = xb[:, 0], xb[:, 1:-1], xb[:, -1]
        pre = alpha @ z.T + gamma[:, None]
        r = self.residuals / self.K
        d_act = activation_grad(pre) * r  # (M, K)
        hb = truncation(beta)
        grad = np.empty_like(xb)
        grad[:, 0] = truncation_grad(beta) * (activation(pre) @ r)
        grad[:, 1:-1] = hb[:, None] * (d_act @ z)
        grad[:, -1] = hb * d_act.sum(axis=1)
        return grad[0] if single else grad


class NnObjective(_Objective):
    """Quadratic loss ``F(m) = 1/(2K) sum_k (y_k - E^m[phihat(X, z_k)])^2``."""

    def __init__(self, d: int = 1):
        if d < 1:
            raise ValueError(f"feature dimension must be >= 1, got {d}")
        self.d = int(d)
        self.dim = self.d + 2

    def __repr__(self):
        return f"NnObjective(d={self.d})"

    def neuron_features(self, x, z) -> np.ndarray:
        """phihat(x_i, z_k) = h(beta_i) phi(alpha_i . z_k + gamma_i) as an (M, K) array."""
        x = as_positions(x)
        z = np.atleast_2d(np.asarray(z, dtype=float))
        pre = x[:, 1:-1] @ z.T + x[:, -1:]
        return truncation(x[:, 0])[:, None] * activation(pre)

    def network_output(self, cloud, z):
        """Mean-field network output at one feature vector or a batch ``(K, d)``."""
        pos = as_positions(cloud)
        self._check_dim(pos)
        z = np.asarray(z, dtype=float)
        single = z.ndim <= 1 and z.size == self.d
        out = self.neuron_features(pos, z.reshape(-1, self.d)).mean(axis=0)
        return float(out[0]) if single else out

    def residuals(self, cloud, dataset) -> np.ndarray:
        return self.network_output(cloud, dataset.features) - dataset.labels

    def value(self, cloud, dataset) -> float:
        r = self.residuals(cloud, dataset)
        return float(0.5 * np.mean(r * r))

    def bind(self, cloud, dataset) -> NnField:
        return NnField(self, self.residuals(cloud, dataset), dataset.features)


class QuadraticPotential:
    """v(x) = (curvature/2) |x|^2."""

    def __init__(self, curvature: float = 1.0):
        self.curvature = float(curvature)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * self.curvature * np.sum(x * x, axis=-1)

    def grad(self, x):
        return self.curvature * np.asarray(x, dtype=float)

    def __repr__(self):
        return f"QuadraticPotential({self.curvature:g})"


class ToyField:
    def __init__(self, objective: "ToyLinearObjective"):
        self.objective = objective

    def linear(self, x):
        x = np.asarray(x, dtype=float)
        self.objective._check_dim(np.atleast_2d(x))
        return self.objective.potential(x)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        self.objective._check_dim(np.atleast_2d(x))
        return self.objective.potential.grad(x)


class ToyLinearObjective(_Objective):
    """``F(m) = E^m[v(X)]``; the dataset argument of every method is ignored.

    ``potential`` is ``"quadratic"`` (v = x^2/2), ``"zero"`` (v = 0), or any
    object that is callable on ``(..., n)`` arrays and has a ``grad`` method.
    """

    def __init__(self, potential="quadratic", dim: int = 1):
        if potential == "quadratic":
            potential = QuadraticPotential(1.0)
        elif potential == "zero":
            potential = QuadraticPotential(0.0)
        elif isinstance(potential, str):
            raise ValueError(f"unknown toy potential {potential!r}")
        self.potential = potential
        self.dim = int(dim)

    def __repr__(self):
        return f"ToyLinearObjective({self.potential!r}, dim={self.dim})"

    def value(self, cloud, dataset=None) -> float:
        pos = as_positions(cloud)
        self._check_dim(pos)
        return float(np.mean(self.potential(pos)))

    def bind(self, cloud=None, dataset=None) -> ToyField:
        return ToyField(self)

    def fixed_point_variance(self, sigma: float) -> float:
        """Per-coordinate variance of the Gibbs fixed point for a quadratic v.

        The density is proportional to exp(-(2/sigma^2) v - U), a centred
        Gaussian with precision 2 c / sigma^2 + 1 for v = c |x|^2 / 2.
        """
        if not isinstance(self.potential, QuadraticPotential):
            raise TypeError("closed-form fixed point only for quadratic potentials")
        return 1.0 / (2.0 * self.potential.curvature / sigma**2 + 1.0)


def toy_linear_objective(v="quadratic", dim: int = 1) -> ToyLinearObjective:
    return ToyLinearObjective(v, dim)
