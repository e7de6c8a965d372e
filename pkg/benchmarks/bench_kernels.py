"""Time the compiled and numpy kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat N] [--json out.json]

Reports the best-of-N wall time per kernel and backend, and the largest
difference between the two backends' outputs.
"""
import argparse
import json
import timeit

import numpy as np

from stirap import kernels
from stirap.propagate import IntegratorConfig, LevelKind, LevelModel, hamiltonian_samples
from stirap.pulses import PulseParams
from stirap.splitop import ChannelPotentials, Grid1D


def rk4_case():
    p = PulseParams.from_at(1.0)
    cfg = IntegratorConfig(-15.0, 15.0, 1e-3)
    model = LevelModel.of(LevelKind.THREE_LEVEL, "ci-sech", p)
    H = hamiltonian_samples(model, np.linspace(cfg.t_min, cfg.t_max, 2 * cfg.steps + 1))
    psi0 = model.ground_state()
    return lambda k: k.rk4_propagate(H, psi0, cfg.step)


def unitary_case(n=4096):
    g = Grid1D(-20.0, 20.0, n)
    V = ChannelPotentials.harmonic(g, [1.0, 1.5, 2.0], [1.0, 0.8, 1.2], [0.0, 0.5, -0.5]).values
    return lambda k: k.half_step_unitaries(V, 0.7, 1.3, 5e-4)


def apply_case(n=4096):
    U = kernels.get("python").half_step_unitaries(np.random.default_rng(0).normal(size=(3, n)),
                                                  0.7, 1.3, 5e-4)
    psi = np.random.default_rng(1).normal(size=(3, n)) + 0j

    def run(k):
        work = psi.copy()
        k.apply_channel_unitaries(U, work)
        return work
    return run


CASES = {"rk4_propagate (30001 steps, 3 levels)": rk4_case,
         "half_step_unitaries (4096 points)": unitary_case,
         "apply_channel_unitaries (4096 points)": apply_case}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json")
    args = ap.parse_args()
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    if len(backends) == 1:
        print("compiled kernels not built; timing the numpy backend only")
    rows = []
    for name, make in CASES.items():
        fn = make()
        times, outs = {}, {}
        for b in backends:
            mod = kernels.get(b)
            outs[b] = fn(mod)
            times[b] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        row = {"kernel": name, **{f"{b}_s": times[b] for b in backends}}
        if len(backends) == 2:
            row["speedup"] = times["python"] / times["cython"]
            row["max_abs_diff"] = float(np.max(np.abs(outs["python"] - outs["cython"])))
        rows.append(row)
        print("  ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{v}" for k, v in row.items()))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
