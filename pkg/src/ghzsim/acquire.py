"""Simulated acquisition, spectra, and sign decoding of the spin-2 multiplet."""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, opkit
from .spinsys import SpinSystem, build_hamiltonian

DEFAULT_DWELL = 1e-3
# 20 s acquisition -> 0.05 Hz bins, which puts every line of a system with
# 0.1 Hz-resolved couplings and offsets exactly on the grid.
DEFAULT_POINTS = 20000
DEFAULT_WINDOW_HZ = 2.0
DETECTION_THRESHOLD = 1e-6
PHASE_FOR_AXIS_DEG = {"x": 0.0, "y": -90.0}
# With s(t) = tr[rho(t) sum_j sigma_+^j] and rho(t) = U rho U^dagger,
# U = exp(-iHt), transverse magnetization at offset nu appears at +nu.
PRECESSION_SIGN = +1


class DecodeError(RuntimeError):
    pass


@dataclass(frozen=True)
class Fid:
    dwell: float
    samples: np.ndarray

    def __post_init__(self):
        if not self.dwell > 0:
            raise ValueError("dwell must be positive")
        if len(self.samples) < 2:
            raise ValueError("need at least two FID points")

    @property
    def n_points(self) -> int:
        return len(self.samples)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_points) * self.dwell


@dataclass(frozen=True)
class Spectrum:
    freqs: np.ndarray
    amps: np.ndarray

    @property
    def resolution(self) -> float:
        return float(self.freqs[1] - self.freqs[0])


@dataclass(frozen=True)
class Line:
    freq_hz: float
    amp: float
    s1: int
    s3: int

    @property
    def sign(self) -> int:
        return 1 if self.amp > 0 else -1


@dataclass(frozen=True)
class Multiplet:
    center_spin: int
    axis: str
    lines: tuple

    @property
    def correlations(self) -> tuple:
        """``sign(line) * s1 * s3`` for each line, ascending in frequency."""
        return tuple(line.sign * line.s1 * line.s3 for line in self.lines)

    @property
    def product(self) -> int:
        """The common value of :attr:`correlations`; 0 if the lines disagree."""
        vals = set(self.correlations)
        return vals.pop() if len(vals) == 1 else 0

    def to_dict(self, setting: str = "") -> dict:
        out = {"schema_version": "1"}
        if setting:
            out["setting"] = setting
        out["lines"] = [
            {"freq_hz": line.freq_hz, "amp": line.amp, "s1": line.s1, "s3": line.s3} for line in self.lines
        ]
        out["product"] = self.product
        return out


def transverse_observable(n: int) -> np.ndarray:
    """sum_j (sx^j + i sy^j)."""
    return sum(opkit.pauli("x", j, n) + 1j * opkit.pauli("y", j, n) for j in range(1, n + 1))


def acquire_fid(rho, sys: SpinSystem, dwell: float = DEFAULT_DWELL,
                n_points: int = DEFAULT_POINTS) -> Fid:
    """Sample s(t_m) = tr[U_m rho U_m^dagger sum_j (sx^j + i sy^j)], U_m = exp(-i H m dwell)."""
    if n_points < 2:
        raise ValueError("need at least two FID points")
    rho = np.asarray(rho, dtype=complex)
    if opkit.n_spins(rho) != sys.n:
        raise ValueError("density matrix and spin system disagree on spin count")
    h = opkit.require_hermitian(build_hamiltonian(sys))
    energies, vecs = np.linalg.eigh(h)
    rho_e = vecs.conj().T @ rho @ vecs
    obs_e = vecs.conj().T @ transverse_observable(sys.n) @ vecs
    # tr[rho(t) O] = sum_ab rho_ab O_ba exp(-i (E_a - E_b) t)
    weights = rho_e * obs_e.T
    freqs = energies[:, None] - energies[None, :]
    keep = np.abs(weights) > 0
    times = np.arange(n_points) * dwell
    samples = _kernels.fid_sum(weights[keep], freqs[keep], times)
    return Fid(float(dwell), samples)


def spectrum(fid: Fid) -> Spectrum:
    """DFT with 1/N normalization, bins folded into (-1/(2 dwell), +1/(2 dwell)]."""
    n = fid.n_points
    amps = np.fft.fft(fid.samples) / n
    k = np.arange(n)
    k = np.where(k > n // 2, k - n, k)
    order = np.argsort(k, kind="stable")
    freqs = k[order] / (n * fid.dwell)
    return Spectrum(freqs, amps[order])


def line_positions(sys: SpinSystem, center_spin: int = 2, left: int = 1, right: int = 3) -> dict:
    """Map ``(s1, s3)`` to the frequency nu_c + s1 J_c1 / 2 + s3 J_c3 / 2."""
    nu = sys.offsets[center_spin - 1]
    ja = sys.coupling(left, center_spin)
    jb = sys.coupling(center_spin, right)
    return {(s1, s3): nu + PRECESSION_SIGN * (s1 * ja + s3 * jb) / 2
            for s3 in (-1, 1) for s1 in (-1, 1)}


def phase_and_decode(spec: Spectrum, sys: SpinSystem, k: str,
                     window_hz: float = DEFAULT_WINDOW_HZ,
                     threshold: float = DETECTION_THRESHOLD) -> Multiplet:
    """Phase the spectrum along ``k`` and read the signed spin-2 multiplet.

    Each line's amplitude is the real part of the phased sum of bins within
    ``window_hz`` of its expected position.
    """
    if k not in PHASE_FOR_AXIS_DEG:
        raise DecodeError(f"phasing axis {k!r} not in x/y")
    if sys.n < 3:
        raise DecodeError("decoding needs spins 1, 2 and 3")
    j12, j23 = abs(sys.coupling(1, 2)), abs(sys.coupling(2, 3))
    needed = min(j23, abs(j12 - j23), j12) / 4
    if not spec.resolution < needed:
        raise DecodeError(f"unresolved lines: resolution {spec.resolution:.4g} Hz, need < {needed:.4g} Hz")
    positions = line_positions(sys)
    spacing = min(abs(a - b) for a in positions.values() for b in positions.values() if a != b)
    if window_hz >= spacing / 2:
        raise DecodeError(f"integration window {window_hz} Hz overlaps neighbouring lines")
    rot = np.exp(1j * math.radians(PHASE_FOR_AXIS_DEG[k]))
    peak = float(np.max(np.abs(spec.amps)))
    lines = []
    for (s1, s3), f0 in sorted(positions.items(), key=lambda kv: kv[1]):
        sel = np.abs(spec.freqs - f0) <= window_hz
        if not sel.any():
            raise DecodeError(f"line at {f0:.3f} Hz falls outside the spectral window")
        integral = complex(np.sum(spec.amps[sel]) * rot)
        if peak == 0 or abs(integral.real) < threshold * peak:
            raise DecodeError(f"line ({s1:+d}, {s3:+d}) at {f0:.3f} Hz is below threshold")
        bins = np.flatnonzero(sel)
        top = bins[np.argmax(np.abs(spec.amps[bins]))]
        lines.append(Line(float(spec.freqs[top]), integral.real, s1, s3))
    return Multiplet(2, k, tuple(lines))


def line_amplitude_oracle(rho, s1: int, s3: int, k: str) -> float:
    """tr[rho P_s1^1 sk^2 P_s3^3] with P_s^j = (1 + s sz^j) / 2."""
    rho = np.asarray(rho, dtype=complex)
    n = opkit.n_spins(rho)
    one = opkit.identity(n)
    p1 = (one + s1 * opkit.pauli("z", 1, n)) / 2
    p3 = (one + s3 * opkit.pauli("z", 3, n)) / 2
    return float(np.trace(rho @ p1 @ opkit.pauli(k, 2, n) @ p3).real)


def spectrum_to_csv(spec: Spectrum) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["freq_hz", "re", "im"])
    for f, a in zip(spec.freqs, spec.amps):
        writer.writerow([f"{f:.12g}", f"{a.real:.12g}", f"{a.imag:.12g}"])
    return buf.getvalue()
