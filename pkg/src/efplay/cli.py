"""Command line: ``efplay run | validate | oracle``.

Exit codes: 0 success, 2 configuration error, 3 numerical divergence,
4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import oracles, output
from . import rng as streams
from .config import ExperimentConfig, load_config
from .datasets import make_sine_dataset
from .efp import run_efp, run_mfld_baseline
from .objective import NnObjective, ToyLinearObjective
from .types import ConfigError, DivergenceError, ParticleCloud

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGENCE, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("efplay")


def build_problem(cfg: ExperimentConfig):
    """Objective, dataset and extra diagnostics for a configured problem."""
    if cfg.problem == "sine":
        return NnObjective(1), make_sine_dataset(), {}
    objective = ToyLinearObjective(cfg.toy_potential)
    var = objective.fixed_point_variance(cfg.efp.sigma)
    ref = np.sqrt(var) * streams.rng_stream(cfg.efp.seed, streams.REFERENCE).standard_normal((cfg.efp.N, 1))
    return objective, None, {"reference": ParticleCloud(ref), "fixed_point_check": True}


def run_command(cfg: ExperimentConfig) -> dict:
    """Run the configured experiment and write its files; returns the traces."""
    objective, dataset, extra = build_problem(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    nn = cfg.problem == "sine"
    traces = {"efp": run_efp(objective, dataset, cfg.efp, exact_inner=cfg.inner_sampler == "exact", **extra)}
    if cfg.baseline:
        traces["mfld"] = run_mfld_baseline(objective, dataset, cfg.efp, **extra)
    for name, trace in traces.items():
        suffix = "" if name == "efp" else f"_{name}"
        output.write_trace(trace, out / f"trace{suffix}.csv", cfg.record_wall_clock)
        output.write_cloud(trace.final_cloud, out / f"final_cloud{suffix}.csv", nn=nn)
    if cfg.emit_svg:
        output.write_error_svg(list(traces.values()), out / "error.svg")
        if nn:
            output.write_fit_svg(traces["efp"], objective, dataset, out / "fit.svg")
    return traces


def _parser():
    p = argparse.ArgumentParser(prog="efplay", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.add_argument("--baseline", action="store_true", help="also run the mean-field Langevin baseline")
    val = sub.add_parser("validate", help="check a config file")
    val.add_argument("--config", required=True)
    sub.add_parser("oracle", help="print independently computed reference values")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "oracle":
        for name, value in oracles.reference_values().items():
            print(f"{name}: {value:.12g}")
        return EXIT_OK
    try:
        cfg = load_config(args.config)
        if args.command == "validate":
            print(f"{args.config}: ok ({cfg.efp.n_epochs} epochs, "
                  f"{cfg.efp.replacements} replacements per epoch)")
            return EXIT_OK
        changes = {}
        if args.seed is not None:
            changes["seed"] = args.seed
        if args.out is not None:
            changes["out_dir"] = args.out
        if args.baseline:
            changes["baseline"] = True
        cfg = cfg.replace(**changes)
        traces = run_command(cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as err:
        print(f"divergence: {err}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    for name, trace in traces.items():
        last = trace.records[-1]
        val = "" if np.isnan(last.validation_error) else f", validation error {last.validation_error:.4g}"
        print(f"{name}: {len(trace)} epochs, objective {last.objective_value:.4g}{val}, "
              f"free energy {last.free_energy:.4g}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
