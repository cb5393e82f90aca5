"""Compare the numba and numpy kernel paths on the experiment's real workload.

    python benchmarks/bench_kernels.py [--repeat 20]

The end-to-end timing uses whichever backend GHZSIM_DISABLE_NUMBA selects;
run it once with the variable set and once without to compare.
"""

import argparse
import time

import numpy as np

from ghzsim import _kernels, acquire, engine, ghz, seqlang, spinsys


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def fid_workload(sys_, n_points):
    rho = engine.run(engine.rho_ghz_reference(), sys_, seqlang.measure("x", "y", "y")).rho
    energies, vecs = np.linalg.eigh(spinsys.build_hamiltonian(sys_))
    rho_e = vecs.conj().T @ rho @ vecs
    obs_e = vecs.conj().T @ acquire.transverse_observable(3) @ vecs
    w = rho_e * obs_e.T
    f = energies[:, None] - energies[None, :]
    keep = np.abs(w) > 0
    return w[keep], f[keep], np.arange(n_points) * acquire.DEFAULT_DWELL


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--points", type=int, default=acquire.DEFAULT_POINTS)
    args = parser.parse_args()

    sys_ = spinsys.alanine()
    # dense weights: every transition of a random 4-spin state
    rng = np.random.default_rng(0)
    dense_rho = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    dense_sys = spinsys.SpinSystem((5.0, -12.0, 30.0, 44.0), {(1, 2): 53.4, (2, 3): 35.3, (3, 4): 12.0})
    e, _ = np.linalg.eigh(spinsys.build_hamiltonian(dense_sys))
    dense = ((dense_rho * acquire.transverse_observable(4).T).ravel(),
             (e[:, None] - e[None, :]).ravel(), np.arange(args.points) * 1e-3)
    orders = engine.coherence_orders(4)

    cases = {
        "fid_sum (GHZ readout)": fid_workload(sys_, args.points),
        "fid_sum (dense 4-spin)": dense,
    }
    print(f"numba available: {_kernels.HAS_NUMBA}; active backend: {_kernels.BACKEND}")
    print(f"{'kernel':<28}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, (w, f, t) in cases.items():
        np_t = best_of(lambda: _kernels.fid_sum_numpy(w, f, t), args.repeat)
        row = f"{name:<28}{np_t * 1e3:>12.3f}"
        if _kernels.HAS_NUMBA:
            _kernels.fid_sum_numba(w, f, t)  # compile
            nb_t = best_of(lambda: _kernels.fid_sum_numba(w, f, t), args.repeat)
            row += f"{nb_t * 1e3:>12.3f}{np_t / nb_t:>9.2f}x"
        print(row)

    rho16 = np.ascontiguousarray(dense_rho)
    np_t = best_of(lambda: _kernels.coherence_project_numpy(rho16, orders), args.repeat * 50)
    row = f"{'coherence_project (16x16)':<28}{np_t * 1e3:>12.4f}"
    if _kernels.HAS_NUMBA:
        _kernels.coherence_project_numba(rho16, orders)
        nb_t = best_of(lambda: _kernels.coherence_project_numba(rho16, orders), args.repeat * 50)
        row += f"{nb_t * 1e3:>12.4f}{np_t / nb_t:>9.2f}x"
    print(row)

    ghz.run_experiment(sys_.without_weak_couplings())  # warm-up / JIT
    full = best_of(lambda: ghz.run_experiment(sys_.without_weak_couplings()), max(1, args.repeat // 5))
    print(f"run_experiment, 4 settings, {_kernels.BACKEND} backend: {full * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
