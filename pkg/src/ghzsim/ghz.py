"""GHZ correlations: oracles, the full four-setting experiment, LHV enumeration, timing."""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import acquire, engine, opkit, seqlang
from .spinsys import SpinSystem, equilibrium_deviation

SETTINGS = ("xyy", "yxy", "yyx", "xxx")
QUANTUM_PRODUCTS = (1, 1, 1, -1)
HARDWARE_GAP_MS = 0.043


def setting_name(s) -> str:
    name = "".join(s)
    if len(name) != 3 or any(a not in "xy" for a in name):
        raise ValueError(f"measurement setting {s!r} must be three of x/y")
    return name


def ghz_state() -> np.ndarray:
    """(|+++> - |--->) / sqrt(2)."""
    return (opkit.basis_state("+++") - opkit.basis_state("---")) / math.sqrt(2)


def ghz_rotation_unitary() -> np.ndarray:
    """exp(+i pi/4 sx^1 sx^2 sy^3), which takes |+++> to the GHZ state."""
    return opkit.expm_hermitian_generator(opkit.pauli_product("xxy"), -math.pi / 4)


def pure_expectation(setting, psi=None) -> float:
    psi = ghz_state() if psi is None else psi
    return float(np.vdot(psi, opkit.pauli_product(setting_name(setting)) @ psi).real)


def deviation_expectation(rho, setting) -> float:
    """tr[rho sj^1 sk^2 sl^3] / 2, normalized so the GHZ deviation gives +-1."""
    rho = opkit.require_hermitian(rho, tol=1e-10, what="density matrix")
    return float(np.trace(rho @ opkit.pauli_product(setting_name(setting))).real) / 2


# -- experiment --------------------------------------------------------------


@dataclass
class SettingResult:
    axes: str
    multiplet: acquire.Multiplet
    oracle: float
    line_oracles: tuple
    rho_ghz: np.ndarray = field(repr=False)
    rho_readout: np.ndarray = field(repr=False)
    spectrum: acquire.Spectrum = field(repr=False)
    fid: acquire.Fid = field(repr=False)

    @property
    def product(self) -> int:
        return self.multiplet.product

    @property
    def passed(self) -> bool:
        expected = 1 if self.oracle > 0 else -1
        lines_ok = all(
            line.sign == (1 if o > 0 else -1) and line.sign * line.s1 * line.s3 == expected
            for line, o in zip(self.multiplet.lines, self.line_oracles)
        )
        return self.product == expected and lines_ok

    def to_dict(self) -> dict:
        return {
            "axes": self.axes,
            "product": self.product,
            "oracle": round(self.oracle, 12),
            "pass": self.passed,
            "lines": [
                {"freq_hz": round(line.freq_hz, 9), "amp": round(line.amp, 12), "s1": line.s1,
                 "s3": line.s3, "oracle": round(o, 12)}
                for line, o in zip(self.multiplet.lines, self.line_oracles)
            ],
        }


@dataclass(frozen=True)
class Timing:
    measure_ms: float
    half_j12_ms: float
    half_j23_ms: float
    prepare_ms: float
    rotate_ms: float
    total_ms: float

    @property
    def measure_faster_than_coupling(self) -> bool:
        return self.measure_ms < self.half_j12_ms

    def to_dict(self) -> dict:
        return {
            "measure_ms": round(self.measure_ms, 9),
            "half_j12_ms": round(self.half_j12_ms, 9),
            "half_j23_ms": round(self.half_j23_ms, 9),
            "prepare_ms": round(self.prepare_ms, 9),
            "rotate_ms": round(self.rotate_ms, 9),
            "total_ms": round(self.total_ms, 9),
            "measure_faster_than_coupling": self.measure_faster_than_coupling,
        }


@dataclass(frozen=True)
class LhvResult:
    assignments: tuple
    products: tuple
    achievable: frozenset
    max_satisfied: int
    parity_ok: bool

    @property
    def quantum_achievable(self) -> bool:
        return QUANTUM_PRODUCTS in self.achievable

    def to_dict(self) -> dict:
        return {"max_satisfied": self.max_satisfied, "quantum_achievable": self.quantum_achievable,
                "parity_all_plus_one": self.parity_ok,
                "achievable": sorted(list(p) for p in self.achievable)}


@dataclass
class ExperimentReport:
    settings: list
    pp_scale: float
    pp_deviation: float
    timing: Timing
    lhv: LhvResult

    @property
    def products(self) -> tuple:
        return tuple(r.product for r in self.settings)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.settings) and not self.lhv.quantum_achievable

    def to_dict(self) -> dict:
        return {
            "schema_version": "1",
            "settings": [r.to_dict() for r in self.settings],
            "preparation": {"scale": round(self.pp_scale, 12), "max_deviation": float(f"{self.pp_deviation:.3g}")},
            "lhv": {"max_satisfied": self.lhv.max_satisfied, "quantum_achievable": self.lhv.quantum_achievable},
            "timing": self.timing.to_dict(),
            "pass": self.passed,
        }


def prepare(sys: SpinSystem):
    """Thermal state through the preparation program, rescaled to diag(1, 0, ..., -1).

    Returns ``(state, scale, deviation)`` where ``state.rho`` is normalized.
    """
    state = engine.run(equilibrium_deviation(sys.n), sys, seqlang.prepare_pp())
    rho, scale, dev = engine.normalize_pseudo_pure(state.rho)
    return engine.EngineState(rho, sys, state.elapsed), scale, dev


def prepare_ghz(sys: SpinSystem):
    prepared, scale, dev = prepare(sys)
    state = engine.run(prepared.rho, sys, seqlang.rotate_ghz(), elapsed=prepared.elapsed)
    return state, scale, dev


def run_setting(sys: SpinSystem, setting, dwell=acquire.DEFAULT_DWELL, n_points=acquire.DEFAULT_POINTS,
                gap_ms: float = 0.0) -> SettingResult:
    """Fresh thermal state -> prepare -> rotate -> read out ``setting`` -> spectrum -> decode."""
    axes = setting_name(setting)
    ghz_state_, _, _ = prepare_ghz(sys)
    readout = engine.run(ghz_state_.rho, sys, seqlang.measure(*axes, gap_ms=gap_ms))
    fid = acquire.acquire_fid(readout.rho, sys, dwell, n_points)
    spec = acquire.spectrum(fid)
    try:
        multiplet = acquire.phase_and_decode(spec, sys, axes[1])
    except acquire.DecodeError as exc:
        raise acquire.DecodeError(f"setting {axes}: {exc}") from exc
    line_oracles = tuple(acquire.line_amplitude_oracle(readout.rho, ln.s1, ln.s3, axes[1])
                         for ln in multiplet.lines)
    return SettingResult(axes, multiplet, deviation_expectation(ghz_state_.rho, axes), line_oracles,
                         ghz_state_.rho, readout.rho, spec, fid)


def run_experiment(sys: SpinSystem, settings=SETTINGS, dwell=acquire.DEFAULT_DWELL,
                   n_points=acquire.DEFAULT_POINTS, gap_ms: float = 0.0) -> ExperimentReport:
    results = [run_setting(sys, s, dwell, n_points, gap_ms) for s in settings]
    _, scale, dev = prepare(sys)
    return ExperimentReport(results, scale, dev, timing_report(sys, gap_ms), lhv_enumerate())


# -- local hidden variables -----------------------------------------------


def lhv_enumerate() -> LhvResult:
    """Try all 64 deterministic +-1 assignments m[particle][axis] against the four settings."""
    assignments, products = [], []
    for values in itertools.product((1, -1), repeat=6):
        m = {(p, a): values[2 * (p - 1) + (a == "y")] for p in (1, 2, 3) for a in "xy"}
        prods = tuple(m[1, s[0]] * m[2, s[1]] * m[3, s[2]] for s in SETTINGS)
        assignments.append(values)
        products.append(prods)
    parity_ok = all(math.prod(p) == 1 for p in products)
    max_sat = max(sum(a == b for a, b in zip(p, QUANTUM_PRODUCTS)) for p in products)
    return LhvResult(tuple(assignments), tuple(products), frozenset(products), max_sat, parity_ok)


# -- timing -----------------------------------------------------------------


def timing_report(sys: SpinSystem, gap_ms: float = 0.0) -> Timing:
    j12, j23 = sys.coupling(1, 2), sys.coupling(2, 3)
    if j12 == 0:
        raise ValueError("J12 must be nonzero")
    measure_s = seqlang.duration(seqlang.measure("x", "x", "x", gap_ms=gap_ms))
    prepare_s = seqlang.duration(seqlang.prepare_pp(), sys)
    rotate_s = seqlang.duration(seqlang.rotate_ghz(), sys)
    half_j23 = 1e3 / (2 * abs(j23)) if j23 else math.inf
    return Timing(measure_s * 1e3, 1e3 / (2 * abs(j12)), half_j23, prepare_s * 1e3, rotate_s * 1e3,
                  (prepare_s + rotate_s + measure_s) * 1e3)
