"""Independent reference values for the test-suite and the ``oracle`` command.

Nothing here calls the samplers, objectives or diagnostics of this package:
each value is obtained by direct summation, numerical quadrature, exact
enumeration or a closed form, so it can check those code paths.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate, stats


def sine_zero_predictor_loss(K: int = 101) -> float:
    """Half mean square of sin(2 pi (k-1)/K) over k = 1..K (the loss of a zero network)."""
    return math.fsum(math.sin(2 * math.pi * k / K) ** 2 for k in range(K)) / (2 * K)


def gaussian_normaliser_integral(L: float = 10.0) -> float:
    """Integral of exp(-x^2/2 - log(2 pi)/2) over [-L, L]."""
    c = 0.5 * math.log(2 * math.pi)
    return integrate.quad(lambda x: math.exp(-0.5 * x * x - c), -L, L, epsabs=1e-13)[0]


def toy_gibbs_moments(curvature: float, sigma2: float, L: float = 12.0):
    """Mass-normalised variance and log-partition of exp(-(2/sigma^2) c x^2/2 - U) by quadrature.

    Returns ``(variance, log_Z)``, with U the standard Gaussian potential.
    """
    c = 0.5 * math.log(2 * math.pi)

    def w(x):
        return math.exp(-(2.0 / sigma2) * 0.5 * curvature * x * x - 0.5 * x * x - c)

    Z = integrate.quad(w, -L, L, epsabs=1e-14)[0]
    m2 = integrate.quad(lambda x: x * x * w(x), -L, L, epsabs=1e-14)[0]
    return m2 / Z, math.log(Z)


def toy_fixed_point_free_energy(curvature: float, sigma2: float) -> float:
    """V(m*) = F(m*) + sigma^2/2 H(m*|g) = -(sigma^2/2) log Z for a linear F."""
    return -0.5 * sigma2 * toy_gibbs_moments(curvature, sigma2)[1]


def ula_ou_second_moment(a: float, sigma: float, ds: float, steps: int, m0: float) -> float:
    """Second moment after ``steps`` of x <- (1 - a ds) x + sigma sqrt(ds) N from E x^2 = m0."""
    m = m0
    for _ in range(steps):
        m = (1 - a * ds) ** 2 * m + sigma**2 * ds
    return m


def survival_law(N: int, K: int, epochs: int) -> np.ndarray:
    """Exact distribution of never-replaced particles after ``epochs`` birth-death steps.

    Each step removes a uniform K-subset of N indices; the number of
    survivors it hits is hypergeometric. Returns ``p[s]`` for s = 0..N.
    """
    p = np.zeros(N + 1)
    p[N] = 1.0
    for _ in range(epochs):
        nxt = np.zeros(N + 1)
        for s in np.flatnonzero(p > 0):
            hits = np.arange(max(0, K - (N - s)), min(K, s) + 1)
            nxt[s - hits] += p[s] * stats.hypergeom.pmf(hits, N, s, K)
        p = nxt
    return p


def survival_moments(N: int, K: int, epochs: int):
    p = survival_law(N, K, epochs)
    s = np.arange(N + 1)
    mean = float(np.sum(s * p))
    return mean, float(math.sqrt(np.sum((s - mean) ** 2 * p)))


def survival_moments_closed_form(N: int, K: int, epochs: int):
    """Mean and std of the survivor count from single and pair survival probabilities.

    A fixed index survives one step with probability (N-K)/N and a fixed pair
    with probability (N-K)(N-K-1)/(N(N-1)); steps are independent.
    """
    p = ((N - K) / N) ** epochs
    q = ((N - K) * (N - K - 1) / (N * (N - 1))) ** epochs if N > 1 else p
    var = N * p * (1 - p) + N * (N - 1) * (q - p * p)
    return N * p, math.sqrt(max(var, 0.0))


def gaussian_kl(var_p: float, var_q: float = 1.0) -> float:
    """KL(N(0, var_p) || N(0, var_q))."""
    r = var_p / var_q
    return 0.5 * (r - 1.0 - math.log(r))


def w1_brute_force(a, b) -> float:
    """Empirical W1 between equal-size samples by enumerating all matchings."""
    a, b = list(a), list(b)
    n = len(a)
    return min(sum(abs(a[i] - b[j]) for i, j in zip(range(n), perm)) / n
               for perm in itertools.permutations(range(n)))


def reference_values() -> dict:
    """Every frozen reference number used by the test-suite, recomputed."""
    var_toy, _ = toy_gibbs_moments(1.0, 2.0)
    surv_mean, surv_std = survival_moments(1000, 200, 5)
    return {
        "sine zero-network loss (K=101)": sine_zero_predictor_loss(101),
        "sine zero-network validation loss (K=1000)": sine_zero_predictor_loss(1000),
        "sin(2 pi / 101)": math.sin(2 * math.pi / 101),
        "U(0) in 1-D": 0.5 * math.log(2 * math.pi),
        "integral of exp(-U) on [-10, 10]": gaussian_normaliser_integral(),
        "toy fixed-point variance (v=x^2/2, sigma^2=2)": var_toy,
        "toy fixed-point free energy (v=x^2/2, sigma^2=2)": toy_fixed_point_free_energy(1.0, 2.0),
        "toy fixed-point free energy (v=0)": toy_fixed_point_free_energy(0.0, 2.0),
        "ULA OU second moment (a=1/2, sigma=1, ds=0.01, 5000 steps, from 0)":
            ula_ou_second_moment(0.5, 1.0, 0.01, 5000, 0.0),
        "ULA toy stationary variance (a=2, sigma^2=2, ds=0.01)": 1.0 / (2.0 * (1 - 0.01)),
        "survivors after 5 epochs, N=1000 K=200 (mean)": surv_mean,
        "survivors after 5 epochs, N=1000 K=200 (std)": surv_std,
        "KL(N(0,1/4) || N(0,1))": gaussian_kl(0.25),
        "W1({0,1}, {0,2})": w1_brute_force([0, 1], [0, 2]),
    }
