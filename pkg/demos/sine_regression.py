"""Fit z -> sin(2 pi z) with a mean-field two-layer network.

Runs the outer/inner particle iteration and the mean-field Langevin
baseline at a reduced scale, prints the validation error every few epochs
and writes error.svg / fit.svg into ./demo_out. Pass --full for the
1000-particle, T=120 configuration (about a minute per method).

    python demos/sine_regression.py [--full]
"""
import sys
import time
from pathlib import Path

import numpy as np

from efplay import EfpConfig, NnObjective, make_sine_dataset, run_efp, run_mfld_baseline
from efplay.output import write_error_svg, write_fit_svg

full = "--full" in sys.argv
cfg = EfpConfig() if full else EfpConfig(N=400, T=24.0)
nn, data = NnObjective(1), make_sine_dataset()

t0 = time.perf_counter()
efp = run_efp(nn, data, cfg, checkpoints=(10, 20, 50, 100, 200, 600) if full else (5, 10, 20, 50, 120))
t1 = time.perf_counter()
mfld = run_mfld_baseline(nn, data, cfg)
t2 = time.perf_counter()
print(f"EFP {t1 - t0:.1f} s, MFLD {t2 - t1:.1f} s")

print(" epoch   EFP val. error   MFLD val. error")
for a, b in list(zip(efp.records, mfld.records))[:: max(1, len(efp) // 12)]:
    print(f"{a.epoch:6d} {a.validation_error:16.3e} {b.validation_error:17.3e}")
print(f"final  {efp.records[-1].validation_error:16.3e} {mfld.records[-1].validation_error:17.3e}")
tail = efp.column("validation_error")[-len(efp) // 5:]
print(f"EFP median over the last fifth: {np.median(tail):.3e}")

out = Path("demo_out")
out.mkdir(exist_ok=True)
write_error_svg([efp, mfld], out / "error.svg")
write_fit_svg(efp, nn, data, out / "fit.svg")
print("wrote", out / "error.svg", "and", out / "fit.svg")
