"""Dense operator algebra for a handful of spin-1/2 particles.

Operators are plain ``numpy`` complex arrays of shape ``(2**n, 2**n)``.
Spin indices are 1-based, matching the usual ``sigma_a^j`` notation, and
spin 1 is the most significant tensor factor, so basis state 0 is
``|+++>`` and basis state ``2**n - 1`` is ``|--->``.
"""

from functools import reduce
from typing import Literal

import numpy as np

Axis = Literal["x", "y", "z"]
AXES = ("x", "y", "z")
MAX_SPINS = 4
HERMITIAN_TOL = 1e-12

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class OperatorError(ValueError):
    """Raised for malformed operators, bad indices or dimension mismatches."""


def n_spins(op) -> int:
    """Number of spins an operator acts on, checking its shape."""
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise OperatorError(f"operator must be square, got shape {op.shape}")
    dim = op.shape[0]
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise OperatorError(f"dimension {dim} is not a power of two")
    return n


def identity(n: int) -> np.ndarray:
    return np.eye(2**n, dtype=complex)


def pauli(axis: Axis, spin: int, n: int) -> np.ndarray:
    """Embed ``sigma_axis`` on ``spin`` (1-based) into an ``n``-spin space."""
    if axis not in _PAULI:
        raise OperatorError(f"unknown axis {axis!r}")
    if not 1 <= n <= MAX_SPINS:
        raise OperatorError(f"spin count {n} outside 1..{MAX_SPINS}")
    if not 1 <= spin <= n:
        raise OperatorError(f"spin index {spin} outside 1..{n}")
    factors = [_PAULI[axis] if j == spin else np.eye(2) for j in range(1, n + 1)]
    return reduce(np.kron, factors)


def pauli_product(axes: str, n: int | None = None) -> np.ndarray:
    """Product ``sigma_{a1}^1 sigma_{a2}^2 ...`` for a string such as ``"xyy"``.

    The character ``"i"`` (or ``"1"``) leaves that spin untouched.
    """
    n = len(axes) if n is None else n
    out = identity(n)
    for spin, a in enumerate(axes, start=1):
        if a in ("i", "1"):
            continue
        out = out @ pauli(a, spin, n)
    return out


def _check_same(a, b):
    if np.shape(a) != np.shape(b):
        raise OperatorError(f"dimension mismatch: {np.shape(a)} vs {np.shape(b)}")


def mul(a, b) -> np.ndarray:
    _check_same(a, b)
    return np.asarray(a) @ np.asarray(b)


def add(a, b) -> np.ndarray:
    _check_same(a, b)
    return np.asarray(a) + np.asarray(b)


def scale(c: complex, a) -> np.ndarray:
    return c * np.asarray(a)


def dagger(a) -> np.ndarray:
    return np.asarray(a).conj().T


def trace(a) -> complex:
    n_spins(a)
    return complex(np.trace(a))


def commutator(a, b) -> np.ndarray:
    _check_same(a, b)
    a = np.asarray(a)
    b = np.asarray(b)
    return a @ b - b @ a


def hermiticity_error(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T)))


def require_hermitian(a, tol: float = HERMITIAN_TOL, what: str = "operator") -> np.ndarray:
    """Return ``a`` as a complex array after checking it is Hermitian."""
    a = np.asarray(a, dtype=complex)
    n_spins(a)
    err = hermiticity_error(a)
    if err > tol:
        raise OperatorError(f"{what} is not Hermitian (max |A - A^dagger| = {err:.3g})")
    return a


def expm_hermitian_generator(h, t: float) -> np.ndarray:
    """Return ``exp(-1j * h * t)`` for Hermitian ``h``.

    Uses the eigendecomposition ``h = V diag(w) V^dagger`` so the result is
    unitary to round-off.
    """
    h = require_hermitian(h, what="generator")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def conjugate(u, rho) -> np.ndarray:
    """``u rho u^dagger``."""
    return u @ rho @ u.conj().T


def basis_state(bits: str) -> np.ndarray:
    """State vector for a z-basis label like ``"+++"`` or ``"+-"``."""
    index = 0
    for ch in bits:
        if ch not in "+-":
            raise OperatorError(f"bad basis label {bits!r}")
        index = 2 * index + (ch == "-")
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[index] = 1.0
    return v


def z_eigenvalues(n: int) -> np.ndarray:
    """``m[a, j-1]`` is spin j's sigma_z eigenvalue (+1/-1) in basis state a."""
    idx = np.arange(2**n)
    shifts = np.arange(n - 1, -1, -1)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return 1 - 2 * bits
