"""Compare the numba and numpy kernel backends on the reconstruction workload.

    python benchmarks/bench_kernels.py [--nodes 512] [--repeat 5]

Compile time for the numba kernels is reported separately from steady-state
runs.  Setting ANSATZ_DISABLE_NUMBA=1 leaves only the numpy backend.
"""

from __future__ import annotations

import argparse
import statistics
import time
from fractions import Fraction

import numpy as np

from calabi_ansatz import _kernels
from calabi_ansatz.geometry import pde_residual, reconstruct
from calabi_ansatz.profile import SOLVABLE_FAMILIES, solvability


def _time(fn, repeat: int) -> tuple[float, float]:
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs), min(runs)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=512)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    reports = [solvability(s, samples=0) for s in SOLVABLE_FAMILIES]
    eps, tol = Fraction(1, 100), Fraction(1, 10**12)
    backends = _kernels.available_backends()

    if "numba" in backends:
        t0 = time.perf_counter()
        reconstruct(reports[0].profile, eps, tol, 5, backend="numba")
        print(f"numba first call (compile + run): {time.perf_counter() - t0:.3f}s")

    tau = np.linspace(0.0, 2.0, 1_000_000)
    arrays = reports[-1].profile.float_arrays()
    print(f"\nphi_eval on 1e6 points ({reports[-1].scenario.label})")
    for b in backends:
        _kernels.phi_eval(tau[:10], *arrays, b)
        med, best = _time(lambda: _kernels.phi_eval(tau, *arrays, b), args.repeat)
        print(f"  {b:<6} median {med * 1e3:8.2f} ms   best {best * 1e3:8.2f} ms")

    edges = np.linspace(0.001, 1.999, 8193)
    print(f"\nintegrate_segments, {len(edges) - 1} panels on [0.001, 1.999], tol 1e-13")
    for rep in reports:
        arrays = rep.profile.float_arrays()
        cells = []
        for b in backends:
            _kernels.integrate_segments(edges[:3], 0, *arrays, 1e-13, b)
            med, _ = _time(lambda: _kernels.integrate_segments(edges, 0, *arrays, 1e-13, b), args.repeat)
            cells.append(f"{b} {med * 1e3:8.2f} ms")
        print(f"  {rep.scenario.label:<32} " + "   ".join(cells))

    print(f"\nreconstruct, {args.nodes} nodes, tol 1e-12")
    print(f"  {'scenario':<32} " + "  ".join(f"{b:>16}" for b in backends) + "   max|ds|")
    for rep in reports:
        cells, results = [], {}
        for b in backends:
            med, _ = _time(lambda: results.__setitem__(b, reconstruct(rep.profile, eps, tol, args.nodes, backend=b)),
                           args.repeat)
            cells.append(f"{med * 1e3:13.2f} ms")
        diff = 0.0
        if len(results) == 2:
            diff = float(np.max(np.abs(results["numba"].s - results["numpy"].s)))
        res = pde_residual(results[backends[0]], rep.Q)
        print(f"  {rep.scenario.label:<32} " + "  ".join(f"{c:>16}" for c in cells) + f"   {diff:.1e}  (residual {res:.1e})")


if __name__ == "__main__":
    main()
