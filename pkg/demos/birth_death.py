"""The outer step as a birth-death move.

Each epoch K = floor(alpha dt N) distinct indices are redrawn from the inner
cloud. We mark the original particles and count how many are never replaced,
against the exact hypergeometric chain.

    python demos/birth_death.py
"""
import numpy as np

from efplay import InnerState, ParticleCloud, outer_step, rng_stream
from efplay.oracles import survival_law

N, K = 1000, 200
inner = InnerState(ParticleCloud(-np.ones((N, 1))))

print(" epochs   simulated mean   exact mean   exact std")
for n in (1, 2, 5, 10, 20):
    counts = []
    for seed in range(200):
        cloud = ParticleCloud(np.arange(N, dtype=float)[:, None])
        for e in range(n):
            cloud, idx = outer_step(cloud, inner, 1.0, 0.2, rng_stream(seed, 2, e))
            assert len(idx) == K and len(cloud) == N
        counts.append(int(np.sum(np.asarray(cloud) >= 0)))
    law = survival_law(N, K, n)
    s = np.arange(N + 1)
    mean = s @ law
    print(f"{n:7d} {np.mean(counts):16.2f} {mean:12.2f} {np.sqrt((s - mean)**2 @ law):11.2f}")
