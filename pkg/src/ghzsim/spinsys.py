"""Weakly coupled spin systems, their Hamiltonian and thermal deviation."""

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import constants

from . import opkit


class SpinSystemError(ValueError):
    pass


def _pair(i, j):
    i, j = int(i), int(j)
    if i == j:
        raise SpinSystemError(f"self-coupling on spin {i}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class SpinSystem:
    """n spin-1/2 nuclei with Larmor offsets and scalar couplings, all in Hz.

    ``couplings`` maps an ordered pair ``(j, k)`` with ``j < k`` to J_jk.
    Pairs listed in ``weak`` are carried but may be dropped with
    :meth:`without_weak_couplings`.
    """

    offsets: tuple
    couplings: dict = field(default_factory=dict)
    labels: tuple = ()
    weak: frozenset = frozenset()
    name: str = ""

    def __post_init__(self):
        offsets = tuple(float(v) for v in self.offsets)
        if not offsets:
            raise SpinSystemError("a spin system needs at least one spin")
        if len(offsets) > opkit.MAX_SPINS:
            raise SpinSystemError(f"at most {opkit.MAX_SPINS} spins are supported")
        couplings = {}
        for (i, j), hz in dict(self.couplings).items():
            key = _pair(i, j)
            if key[0] < 1 or key[1] > len(offsets):
                raise SpinSystemError(f"coupling {key} references a missing spin")
            if key in couplings:
                raise SpinSystemError(f"coupling {key} given twice")
            couplings[key] = float(hz)
        labels = tuple(self.labels) or tuple(f"S{j}" for j in range(1, len(offsets) + 1))
        if len(labels) != len(offsets):
            raise SpinSystemError("one label per spin required")
        if not all(math.isfinite(v) for v in (*offsets, *couplings.values())):
            raise SpinSystemError("frequencies must be finite")
        weak = frozenset(_pair(*p) for p in self.weak)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weak", weak)

    @property
    def n(self) -> int:
        return len(self.offsets)

    def coupling(self, j: int, k: int) -> float:
        """J_jk in Hz, zero when the pair is not listed."""
        return self.couplings.get(_pair(j, k), 0.0)

    def without_weak_couplings(self) -> "SpinSystem":
        kept = {p: hz for p, hz in self.couplings.items() if p not in self.weak}
        return SpinSystem(self.offsets, kept, self.labels, frozenset(), self.name)

    def active(self, include_weak_couplings: bool = False) -> "SpinSystem":
        return self if include_weak_couplings else self.without_weak_couplings()

    def permuted(self, order) -> "SpinSystem":
        """Relabel spins: new spin ``a+1`` is old spin ``order[a]``."""
        order = [int(o) for o in order]
        new_of_old = {old: new for new, old in enumerate(order, start=1)}
        couplings = {_pair(new_of_old[i], new_of_old[j]): hz for (i, j), hz in self.couplings.items()}
        weak = frozenset(_pair(new_of_old[i], new_of_old[j]) for i, j in self.weak)
        return SpinSystem(
            tuple(self.offsets[o - 1] for o in order),
            couplings,
            tuple(self.labels[o - 1] for o in order),
            weak,
            self.name,
        )

    # -- config file -------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "SpinSystem":
        try:
            spins = data["spins"]
            offsets = [float(s.get("offset_hz", 0.0)) for s in spins]
            labels = [str(s.get("label", f"S{k}")) for k, s in enumerate(spins, start=1)]
            couplings, weak = {}, set()
            for c in data.get("couplings", []):
                key = _pair(c["i"], c["j"])
                if key[0] < 1 or key[1] > len(offsets):
                    raise SpinSystemError(f"coupling {key} references a missing spin")
                couplings[key] = float(c["hz"])
                if c.get("weak", False):
                    weak.add(key)
        except (KeyError, TypeError, AttributeError) as exc:
            raise SpinSystemError(f"malformed spin-system config: {exc}") from exc
        return cls(tuple(offsets), couplings, tuple(labels), frozenset(weak), data.get("name", ""))

    def to_dict(self) -> dict:
        out = {}
        if self.name:
            out["name"] = self.name
        out["spins"] = [{"label": lab, "offset_hz": off} for lab, off in zip(self.labels, self.offsets)]
        out["couplings"] = []
        for (i, j), hz in sorted(self.couplings.items()):
            entry = {"i": i, "j": j, "hz": hz}
            if (i, j) in self.weak:
                entry["weak"] = True
            out["couplings"].append(entry)
        return out

    @classmethod
    def load(cls, path) -> "SpinSystem":
        with open(path) as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as exc:
                raise SpinSystemError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(data)


def alanine_config_path() -> Path:
    return Path(str(resources.files("ghzsim") / "data" / "alanine.json"))


def alanine() -> SpinSystem:
    """Triply 13C-labelled alanine: J12 = 53.4 Hz, J23 = 35.3 Hz, weak J13 = 1.4 Hz."""
    return SpinSystem.load(alanine_config_path())


def build_hamiltonian(sys: SpinSystem) -> np.ndarray:
    """Weak-coupling Hamiltonian in rad/s.

    H = sum_j (w_j / 2) sz^j + sum_{j<k} (pi / 2) J_jk sz^j sz^k, w_j = 2 pi offset_j.
    Every term is diagonal, so H is built directly from z eigenvalues.
    """
    m = opkit.z_eigenvalues(sys.n).astype(float)
    diag = np.zeros(2**sys.n)
    for j, nu in enumerate(sys.offsets):
        diag += math.pi * nu * m[:, j]
    for (j, k), hz in sys.couplings.items():
        diag += 0.5 * math.pi * hz * m[:, j - 1] * m[:, k - 1]
    return np.diag(diag).astype(complex)


def coupling_hamiltonian(sys: SpinSystem, j: int, k: int) -> np.ndarray:
    """The single term (pi / 2) J_jk sz^j sz^k."""
    hz = sys.coupling(j, k)
    return 0.5 * math.pi * hz * (opkit.pauli("z", j, sys.n) @ opkit.pauli("z", k, sys.n))


def equilibrium_deviation(n: int) -> np.ndarray:
    """Rescaled thermal deviation sum_j sz^j (no Boltzmann prefactor)."""
    if not 1 <= n <= opkit.MAX_SPINS:
        raise SpinSystemError(f"spin count {n} outside 1..{opkit.MAX_SPINS}")
    return sum(opkit.pauli("z", j, n) for j in range(1, n + 1))


@dataclass(frozen=True)
class ThermalParams:
    temperature: float
    larmor_frequency: float

    def __post_init__(self):
        if not (self.temperature > 0 and self.larmor_frequency > 0):
            raise SpinSystemError("temperature and Larmor frequency must be positive")


def boltzmann_factor(p: ThermalParams) -> float:
    """h nu / (k_B T) with nu in Hz."""
    return constants.h * p.larmor_frequency / (constants.k * p.temperature)
