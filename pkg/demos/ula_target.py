"""The inner Langevin chain samples the Gibbs best response.

For the toy objective the target is N(0, 1/(2c/sigma^2 + 1)). We run ULA
from a wide start and compare the histogram with the quadrature-normalised
density, for a few step sizes, to see the O(ds) bias.

    python demos/ula_target.py
"""
import math

import numpy as np

from efplay import InnerState, ToyLinearObjective, fixed_point_residual_1d, gaussian_cloud, rng_stream, run_inner

toy = ToyLinearObjective("quadratic")
sigma = math.sqrt(2.0)
start = gaussian_cloud(1, 10_000, 0.0, 15.0, rng_stream(0, 0))

for ds in (0.1, 0.03, 0.01):
    out = run_inner(toy, None, None, InnerState(start), 50.0, ds, sigma, rng_stream(0, 1))
    x = np.asarray(out.particles)[:, 0]
    # the discretised OU chain has stationary variance 1/(2 (1 - ds))
    print(f"ds={ds:<5} var {x.var():.4f}  (ULA limit {1 / (2 * (1 - ds)):.4f}, exact 0.5)  "
          f"TV residual {fixed_point_residual_1d(out.particles, toy, None, sigma):.4f}")
