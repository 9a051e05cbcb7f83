"""Toy problem: F(m) = E^m[x^2/2] with sigma^2 = 2.

The best response of any measure is N(0, 1/2), so the outer iteration is a
pure mixture m_e = 0.8^e m_0 + (1 - 0.8^e) m*. With the exact 1-D inner
sampler this is visible directly in the W1 distance and the free energy.

    python demos/toy_fixed_point.py
"""
import math

import numpy as np

from efplay import EfpConfig, ParticleCloud, ToyLinearObjective, rng_stream, run_efp
from efplay.oracles import toy_fixed_point_free_energy

toy = ToyLinearObjective("quadratic")
cfg = EfpConfig(N=10_000, T=12.0, sigma2_half=1.0, init_mean=30.0, init_std=1.0)
print("fixed point variance", toy.fixed_point_variance(cfg.sigma))

# equal-size sample from the known fixed point, for W1
ref = ParticleCloud(math.sqrt(0.5) * rng_stream(1, 5).standard_normal((cfg.N, 1)))
trace = run_efp(toy, None, cfg, exact_inner=True, reference=ref)

v_star = toy_fixed_point_free_energy(1.0, 2.0)
print(f"V(m*) by quadrature = {v_star:.5f}   (closed form: log(2)/2 = {0.5 * math.log(2):.5f})")
print(" epoch      W1   0.8^e W1_0   free energy - V*")
w0 = trace.records[0].aux["w1"] / 0.8
for r in trace.records[::5]:
    print(f"{r.epoch:6d} {r.aux['w1']:8.4f} {0.8**r.epoch * w0:10.4f} {r.free_energy - v_star:14.4e}")

final = np.asarray(trace.final_cloud)[:, 0]
print(f"final mean {final.mean():+.4f}, variance {final.var():.4f}")
