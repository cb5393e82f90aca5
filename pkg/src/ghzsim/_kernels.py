"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Set ``GHZSIM_DISABLE_NUMBA=1`` to force the numpy implementations. The
numba versions are also used automatically only if numba imports.
"""

import os

import numpy as np

_DISABLE = os.environ.get("GHZSIM_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    HAS_NUMBA = False


def fid_sum_numpy(weights, freqs, times):
    """s(t) = sum_p weights[p] * exp(-1j * freqs[p] * t) for each t."""
    phase = np.exp(-1j * np.outer(times, freqs))
    return phase @ weights


def coherence_project_numpy(rho, orders):
    keep = orders[:, None] == orders[None, :]
    return np.where(keep, rho, 0.0)


if HAS_NUMBA:

    @numba.njit(cache=False)
    def fid_sum_numba(weights, freqs, times):
        out = np.zeros(times.shape[0], dtype=np.complex128)
        for m in range(times.shape[0]):
            t = times[m]
            acc = 0.0 + 0.0j
            for p in range(weights.shape[0]):
                acc += weights[p] * np.exp(-1j * freqs[p] * t)
            out[m] = acc
        return out

    @numba.njit(cache=False)
    def coherence_project_numba(rho, orders):
        d = rho.shape[0]
        out = np.zeros_like(rho)
        for a in range(d):
            for b in range(d):
                if orders[a] == orders[b]:
                    out[a, b] = rho[a, b]
        return out

else:  # pragma: no cover
    fid_sum_numba = None
    coherence_project_numba = None


USE_NUMBA = HAS_NUMBA and not _DISABLE
BACKEND = "numba" if USE_NUMBA else "numpy"


def fid_sum(weights, freqs, times):
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    if USE_NUMBA:
        return fid_sum_numba(weights, freqs, times)
    return fid_sum_numpy(weights, freqs, times)


def coherence_project(rho, orders):
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    orders = np.ascontiguousarray(orders, dtype=np.int64)
    if USE_NUMBA:
        return coherence_project_numba(rho, orders)
    return coherence_project_numpy(rho, orders)
