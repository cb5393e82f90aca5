"""Pulse-program IR, a small line-oriented text format, and the built-in programs.

Text format, one or more ``;``-separated statements per line::

    # name: prepare_pp
    pulse angle=90 phase=90 spins=2
    grad axis=z
    delay J=2,3 frac=0.25 ; delay t=0.001

Keys: ``angle`` and ``phase`` in degrees, ``spins`` a comma list, ``J`` a
spin pair, ``frac`` a fraction of ``1/J``, ``t`` seconds, ``axis`` one of
x/y/z, ``len`` pulse length in ms (default 2.0). A ``# name: ...`` comment
sets the sequence name; other comments are ignored.
"""

import math
import re
from dataclasses import dataclass

DEFAULT_PULSE_MS = 2.0
AXIS_PHASE_DEG = {"x": 0.0, "y": 90.0}


class SequenceError(ValueError):
    """Invalid sequence content (bad spin, missing coupling, bad value)."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, column {col}: {message}"
        super().__init__(message)


class SequenceSyntaxError(SequenceError):
    pass


def _normalize_phase(deg):
    deg = float(deg)
    if not -360.0 <= deg <= 360.0:
        raise SequenceError(f"phase {deg} outside [-360, 360]")
    r = deg % 360.0
    return 0.0 if r == 360.0 else r


@dataclass(frozen=True)
class Pulse:
    """Selective rf pulse: rotation by ``angle_deg`` about the axis at ``phase_deg``."""

    angle_deg: float
    phase_deg: float
    targets: tuple
    length_ms: float = DEFAULT_PULSE_MS

    def __post_init__(self):
        angle = float(self.angle_deg)
        if not (0.0 < angle <= 360.0):
            raise SequenceError(f"pulse angle {angle} outside (0, 360]")
        targets = tuple(sorted({int(t) for t in self.targets}))
        if not targets or targets[0] < 1:
            raise SequenceError(f"bad pulse targets {self.targets!r}")
        length = float(self.length_ms)
        if not (length >= 0.0 and math.isfinite(length)):
            raise SequenceError(f"pulse length {length} must be >= 0")
        object.__setattr__(self, "angle_deg", angle)
        object.__setattr__(self, "phase_deg", _normalize_phase(self.phase_deg))
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "length_ms", length)

    @property
    def angle(self) -> float:
        return math.radians(self.angle_deg)

    @property
    def phase(self) -> float:
        return math.radians(self.phase_deg)

    @property
    def duration(self) -> float:
        return self.length_ms * 1e-3


@dataclass(frozen=True)
class CouplingDelay:
    """Free evolution for ``fraction / J_jk`` seconds under the named coupling only."""

    pair: tuple
    fraction: float

    def __post_init__(self):
        j, k = (int(v) for v in self.pair)
        if j == k or min(j, k) < 1:
            raise SequenceError(f"bad coupling pair {self.pair!r}")
        frac = float(self.fraction)
        if not (frac > 0.0 and math.isfinite(frac)):
            raise SequenceError(f"delay fraction {frac} must be positive")
        object.__setattr__(self, "pair", (j, k))
        object.__setattr__(self, "fraction", frac)


@dataclass(frozen=True)
class FixedDelay:
    """Free evolution under the full Hamiltonian for ``seconds``."""

    seconds: float

    def __post_init__(self):
        t = float(self.seconds)
        if not (t >= 0.0 and math.isfinite(t)):
            raise SequenceError(f"delay time {t} must be >= 0")
        object.__setattr__(self, "seconds", t)


@dataclass(frozen=True)
class Gradient:
    """Field-gradient crusher; the axis is a label only."""

    axis: str

    def __post_init__(self):
        if self.axis not in ("x", "y", "z"):
            raise SequenceError(f"gradient axis {self.axis!r} not in x/y/z")


Delay = CouplingDelay | FixedDelay
SeqElement = Pulse | CouplingDelay | FixedDelay | Gradient


@dataclass(frozen=True)
class Sequence:
    elements: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __add__(self, other: "Sequence") -> "Sequence":
        name = "+".join(n for n in (self.name, other.name) if n)
        return Sequence(self.elements + other.elements, name)


# -- parsing ---------------------------------------------------------------

_KEYS = {
    "pulse": {"angle", "phase", "spins", "len"},
    "delay": {"J", "frac", "t"},
    "grad": {"axis"},
}
_TOKEN = re.compile(r"[^\s;]+")
_NAME = re.compile(r"#\s*name:\s*(.*?)\s*$")


def _as_float(text, key, line, col):
    try:
        value = float(text)
    except ValueError:
        raise SequenceSyntaxError(f"{key}: {text!r} is not a number", line, col) from None
    if not math.isfinite(value):
        raise SequenceSyntaxError(f"{key}: {text!r} is not finite", line, col)
    return value


def _as_ints(text, key, line, col):
    parts = text.split(",")
    if not all(re.fullmatch(r"[0-9]+", p) for p in parts):
        raise SequenceSyntaxError(f"{key}: expected comma-separated integers, got {text!r}", line, col)
    return tuple(int(p) for p in parts)


def _statement(keyword, kvs, line, col):
    """Build one element from its keyword and ``{key: (value, col)}``."""
    def need(key):
        if key not in kvs:
            raise SequenceSyntaxError(f"{keyword}: missing key {key!r}", line, col)
        return kvs[key]

    try:
        if keyword == "pulse":
            a_text, a_col = need("angle")
            p_text, p_col = need("phase")
            s_text, s_col = need("spins")
            angle = _as_float(a_text, "angle", line, a_col)
            phase = _as_float(p_text, "phase", line, p_col)
            spins = _as_ints(s_text, "spins", line, s_col)
            length = DEFAULT_PULSE_MS
            if "len" in kvs:
                length = _as_float(kvs["len"][0], "len", line, kvs["len"][1])
            return Pulse(angle, phase, spins, length)
        if keyword == "delay":
            if "t" in kvs:
                if "J" in kvs or "frac" in kvs:
                    raise SequenceSyntaxError("delay: use either t= or J= with frac=, not both", line, col)
                return FixedDelay(_as_float(kvs["t"][0], "t", line, kvs["t"][1]))
            j_text, j_col = need("J")
            f_text, f_col = need("frac")
            pair = _as_ints(j_text, "J", line, j_col)
            if len(pair) != 2:
                raise SequenceSyntaxError(f"J: expected a spin pair, got {j_text!r}", line, j_col)
            return CouplingDelay(pair, _as_float(f_text, "frac", line, f_col))
        a_text, _ = need("axis")
        return Gradient(a_text)
    except SequenceSyntaxError:
        raise
    except SequenceError as exc:
        raise SequenceError(str(exc), line, col) from None


def parse(text: str, system=None) -> Sequence:
    """Parse program text into a :class:`Sequence`.

    With ``system`` given, spin indices and coupling pairs are checked
    against it as well.
    """
    elements = []
    positions = []
    name = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            m = _NAME.match(stripped)
            if m and not elements:
                name = m.group(1)
            continue
        pos = 0
        while True:
            # one statement: keyword kv+ up to ';' or end of line
            tokens = []
            while True:
                m = _TOKEN.search(raw, pos)
                semi = raw.find(";", pos)
                if m is None or (semi != -1 and semi < m.start()):
                    break
                tokens.append((m.group(), m.start() + 1))
                pos = m.end()
            if not tokens:
                col = (semi if semi != -1 else len(raw)) + 1
                raise SequenceSyntaxError("empty statement", lineno, col)
            keyword, kcol = tokens[0]
            if keyword not in _KEYS:
                raise SequenceSyntaxError(f"unknown statement {keyword!r}", lineno, kcol)
            if len(tokens) == 1:
                raise SequenceSyntaxError(f"{keyword}: expected key=value", lineno, kcol + len(keyword))
            kvs = {}
            for tok, tcol in tokens[1:]:
                if tok.startswith("#"):
                    raise SequenceSyntaxError("comments must occupy a whole line", lineno, tcol)
                key, eq, value = tok.partition("=")
                if not eq or not key or not value:
                    raise SequenceSyntaxError(f"expected key=value, got {tok!r}", lineno, tcol)
                if key not in _KEYS[keyword]:
                    raise SequenceSyntaxError(f"{keyword}: unknown key {key!r}", lineno, tcol)
                if key in kvs:
                    raise SequenceSyntaxError(f"{keyword}: duplicate key {key!r}", lineno, tcol)
                kvs[key] = (value, tcol + len(key) + 1)
            elements.append(_statement(keyword, kvs, lineno, kcol))
            positions.append((lineno, kcol))
            semi = raw.find(";", pos)
            if semi == -1:
                break
            pos = semi + 1
    seq = Sequence(tuple(elements), name)
    if system is not None:
        validate(seq, system, positions)
    return seq


def validate(seq: Sequence, system, positions=None) -> None:
    """Check every spin index and coupling reference against ``system``."""
    for idx, el in enumerate(seq.elements):
        line, col = positions[idx] if positions else (None, None)
        if isinstance(el, Pulse):
            bad = [t for t in el.targets if t > system.n]
            if bad:
                raise SequenceError(f"unknown spin index {bad[0]} (system has {system.n})", line, col)
        elif isinstance(el, CouplingDelay):
            j, k = el.pair
            if max(j, k) > system.n:
                raise SequenceError(f"unknown spin index {max(j, k)} (system has {system.n})", line, col)
            if system.coupling(j, k) == 0.0:
                raise SequenceError(f"unknown coupling pair J{j}{k}", line, col)


# -- formatting ------------------------------------------------------------


def _num(x: float) -> str:
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_element(el) -> str:
    if isinstance(el, Pulse):
        text = f"pulse angle={_num(el.angle_deg)} phase={_num(el.phase_deg)} spins={','.join(map(str, el.targets))}"
        if el.length_ms != DEFAULT_PULSE_MS:
            text += f" len={_num(el.length_ms)}"
        return text
    if isinstance(el, CouplingDelay):
        return f"delay J={el.pair[0]},{el.pair[1]} frac={_num(el.fraction)}"
    if isinstance(el, FixedDelay):
        return f"delay t={_num(el.seconds)}"
    if isinstance(el, Gradient):
        return f"grad axis={el.axis}"
    raise TypeError(f"not a sequence element: {el!r}")


def format(seq: Sequence) -> str:  # noqa: A001 - mirrors parse()
    lines = []
    if seq.name:
        lines.append(f"# name: {seq.name}")
    lines.extend(format_element(el) for el in seq.elements)
    return "\n".join(lines) + "\n"


# -- built-in programs -----------------------------------------------------


def prepare_pp() -> Sequence:
    """Thermal state to the two-pseudopure-state mixture diag(1, 0, ..., 0, -1)."""
    return Sequence(
        (
            Pulse(90, 90, (2,)),
            Gradient("z"),
            Pulse(90, -90, (3,)),
            CouplingDelay((2, 3), 0.25),
            Pulse(90, 135, (3,)),
            Gradient("y"),
            Pulse(90, -90, (1,)),
            CouplingDelay((1, 2), 0.25),
            Pulse(90, 135, (1,)),
            Gradient("x"),
            Pulse(90, 0, (2,)),
            CouplingDelay((1, 2), 0.5),
            Pulse(90, -90, (2,)),
        ),
        "prepare_pp",
    )


def rotate_ghz() -> Sequence:
    """Realizes exp(i pi/4 sx^1 sx^2 sy^3) with couplings J12 and J23."""
    return Sequence(
        (
            Pulse(90, -90, (1,)),
            CouplingDelay((1, 2), 0.5),
            Pulse(90, 0, (2, 3)),
            CouplingDelay((2, 3), 0.5),
            Pulse(90, 180, (2, 3)),
            CouplingDelay((1, 2), 0.5),
            Pulse(90, -90, (1,)),
        ),
        "rotate_ghz",
    )


def measure(j: str, k: str, l: str, gap_ms: float = 0.0) -> Sequence:  # noqa: E741
    """Readout pulses turning spin 1 along ``j`` and spin 3 along ``l`` into z.

    ``k`` only names the phasing axis of the spin-2 spectrum. A positive
    ``gap_ms`` inserts free evolution between the two pulses.
    """
    for axis in (j, k, l):
        if axis not in AXIS_PHASE_DEG:
            raise SequenceError(f"measurement axis {axis!r} not in x/y")
    elements = [Pulse(90, AXIS_PHASE_DEG[j] - 90.0, (1,))]
    if gap_ms > 0:
        elements.append(FixedDelay(gap_ms * 1e-3))
    elements.append(Pulse(90, AXIS_PHASE_DEG[l] - 90.0, (3,)))
    return Sequence(tuple(elements), f"measure_{j}{k}{l}")


_MEASURE_NAME = re.compile(r"measure[_:(]?\s*([xy])\s*,?\s*([xy])\s*,?\s*([xy])\s*\)?")


def builtin(name: str, gap_ms: float = 0.0) -> Sequence:
    """Look up ``prepare_pp``, ``rotate_ghz`` or ``measure(j,k,l)`` / ``measure_jkl``."""
    if name == "prepare_pp":
        return prepare_pp()
    if name == "rotate_ghz":
        return rotate_ghz()
    m = _MEASURE_NAME.fullmatch(name.strip())
    if m:
        return measure(*m.groups(), gap_ms=gap_ms)
    raise SequenceError(f"unknown built-in sequence {name!r}")


def duration(seq: Sequence, system=None) -> float:
    """Total nominal time in seconds; coupling delays need ``system``."""
    total = 0.0
    for el in seq.elements:
        if isinstance(el, Pulse):
            total += el.duration
        elif isinstance(el, FixedDelay):
            total += el.seconds
        elif isinstance(el, CouplingDelay):
            if system is None:
                raise SequenceError("coupling delays need a spin system to time")
            total += el.fraction / abs(system.coupling(*el.pair))
    return total
