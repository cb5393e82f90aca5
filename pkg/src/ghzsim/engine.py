"""Run pulse programs on deviation density matrices.

Pulses are ideal and instantaneous. Coupling delays evolve under the single
named ``(pi/2) J sz sz`` term, standing in for the refocusing that isolates
it. Gradients act as an ideal crusher: every element of nonzero total
coherence order is removed.

Rotation sense
--------------
A pulse of angle ``theta`` and phase ``phi`` is
``U = exp(-1j * sense * theta/2 * sum_t (cos(phi) sx^t + sin(phi) sy^t))``.
``sense=+1`` is the right-handed rotation (a 90 degree pulse at phase 90
turns sz into sx). The frozen default ``ROTATION_SENSE = -1`` is the
left-handed sense of a positive-gyromagnetic-ratio nucleus such as 13C; it
is the only choice for which the published rotation program lands on the
GHZ deviation matrix with corner entries -1 rather than +1. The preparation
program reaches diag(1, 0, ..., 0, -1) under either sense.
"""

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels, opkit
from .seqlang import CouplingDelay, FixedDelay, Gradient, Pulse, Sequence
from .spinsys import SpinSystem, build_hamiltonian, coupling_hamiltonian

ROTATION_SENSE = -1
STATE_TOL = 1e-10
PATTERN_TOL = 1e-8


class EngineError(RuntimeError):
    pass


@dataclass(frozen=True)
class EngineState:
    rho: np.ndarray
    sys: SpinSystem
    elapsed: float = 0.0

    def check(self, tol=STATE_TOL):
        """Raise unless rho is Hermitian and traceless within ``tol``."""
        herm = opkit.hermiticity_error(self.rho)
        tr = abs(np.trace(self.rho))
        if herm > tol or tr > tol:
            raise EngineError(f"state drifted: |rho - rho^dagger| = {herm:.3g}, |tr rho| = {tr:.3g}")
        return self


def pulse_unitary(p: Pulse, n: int, sense: int = ROTATION_SENSE) -> np.ndarray:
    if sense not in (1, -1):
        raise ValueError("sense must be +1 or -1")
    c, s = math.cos(p.phase), math.sin(p.phase)
    gen = sum(c * opkit.pauli("x", t, n) + s * opkit.pauli("y", t, n) for t in p.targets)
    return opkit.expm_hermitian_generator(gen, sense * p.angle / 2)


def apply_pulse(state: EngineState, p: Pulse, sense: int = ROTATION_SENSE) -> EngineState:
    if max(p.targets) > state.sys.n:
        raise EngineError(f"pulse targets {p.targets} exceed {state.sys.n} spins")
    u = pulse_unitary(p, state.sys.n, sense)
    return replace(state, rho=opkit.conjugate(u, state.rho), elapsed=state.elapsed + p.duration)


def apply_delay(state: EngineState, d) -> EngineState:
    if isinstance(d, CouplingDelay):
        j, k = d.pair
        hz = state.sys.coupling(j, k)
        if hz == 0.0:
            raise EngineError(f"coupling J{j}{k} is zero or absent")
        t = d.fraction / abs(hz)
        h = coupling_hamiltonian(state.sys, j, k)
    elif isinstance(d, FixedDelay):
        t = d.seconds
        h = build_hamiltonian(state.sys)
    else:
        raise TypeError(f"not a delay: {d!r}")
    u = opkit.expm_hermitian_generator(h, t)
    return replace(state, rho=opkit.conjugate(u, state.rho), elapsed=state.elapsed + t)


def coherence_orders(n: int) -> np.ndarray:
    """Total z quantum number sum_j m_j of each basis state."""
    return opkit.z_eigenvalues(n).sum(axis=1)


def crush(rho) -> np.ndarray:
    """Keep only elements <a|rho|b> of zero total coherence order."""
    n = opkit.n_spins(rho)
    return _kernels.coherence_project(rho, coherence_orders(n))


def apply_gradient(state: EngineState, g: Gradient, crusher_time: float = 0.0) -> EngineState:
    return replace(state, rho=crush(state.rho), elapsed=state.elapsed + crusher_time)


def step(state: EngineState, el, sense: int = ROTATION_SENSE, crusher_time: float = 0.0) -> EngineState:
    if isinstance(el, Pulse):
        return apply_pulse(state, el, sense)
    if isinstance(el, (CouplingDelay, FixedDelay)):
        return apply_delay(state, el)
    if isinstance(el, Gradient):
        return apply_gradient(state, el, crusher_time)
    raise TypeError(f"not a sequence element: {el!r}")


def run(rho0, sys: SpinSystem, seq: Sequence, sense: int = ROTATION_SENSE,
        crusher_time: float = 0.0, elapsed: float = 0.0) -> EngineState:
    rho0 = opkit.require_hermitian(rho0, tol=STATE_TOL, what="initial density matrix")
    if opkit.n_spins(rho0) != sys.n:
        raise EngineError(f"rho is {rho0.shape[0]}-dimensional but the system has {sys.n} spins")
    state = EngineState(rho0, sys, elapsed)
    for el in seq.elements:
        state = step(state, el, sense, crusher_time)
    return state.check()


# -- reference matrices ------------------------------------------------------


def rho_pp_exact(n: int = 3) -> np.ndarray:
    """diag(1, 0, ..., 0, -1): |+..+><+..+| - |-..-><-..-|."""
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1.0
    rho[-1, -1] = -1.0
    return rho


def rho_ghz_reference(n: int = 3) -> np.ndarray:
    """Deviation matrix with -1 in the two anti-diagonal corners, zero elsewhere."""
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, -1] = rho[-1, 0] = -1.0
    return rho


def normalize_to_pattern(rho, pattern, tol: float = PATTERN_TOL):
    """Scale ``rho`` by a positive constant so its largest entry matches ``pattern``.

    Returns ``(rho / c, c, max_deviation)``. Raises :class:`EngineError`
    when no positive scale brings ``rho`` within ``tol`` of ``pattern``.
    """
    rho = np.asarray(rho, dtype=complex)
    idx = np.unravel_index(np.argmax(np.abs(pattern)), pattern.shape)
    ref = pattern[idx]
    if abs(rho[idx]) == 0:
        raise EngineError("matrix vanishes where the pattern is largest")
    c = (rho[idx] / ref).real
    if c <= 0 or abs((rho[idx] / ref).imag) > tol * abs(c):
        raise EngineError(f"no positive scale maps the matrix onto the pattern (ratio {rho[idx] / ref})")
    scaled = rho / c
    dev = float(np.max(np.abs(scaled - pattern)))
    if dev > tol:
        raise EngineError(f"matrix differs from the pattern by {dev:.3g} after scaling by {c:.6g}")
    return scaled, float(c), dev


def normalize_pseudo_pure(rho, tol: float = PATTERN_TOL):
    return normalize_to_pattern(rho, rho_pp_exact(opkit.n_spins(rho)), tol)


# -- matrix dump -------------------------------------------------------------


def matrix_to_dict(rho, scale: float = 1.0, **extra) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {
        "schema_version": "1",
        "dim": int(rho.shape[0]),
        "scale": float(scale),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho],
        **extra,
    }


def matrix_from_dict(data: dict) -> tuple:
    m = np.array(data["matrix"], dtype=float)
    return m[..., 0] + 1j * m[..., 1], float(data.get("scale", 1.0))


def dump_matrix(rho, scale: float = 1.0, **extra) -> str:
    return json.dumps(matrix_to_dict(rho, scale, **extra), indent=1)
