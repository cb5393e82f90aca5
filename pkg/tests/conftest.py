import numpy as np
import pytest

from ghzsim import spinsys


@pytest.fixture(scope="session")
def alanine():
    """Alanine with the weak J13 dropped, as in the default experiment."""
    return spinsys.alanine().without_weak_couplings()


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def random_hermitian(rng, dim, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (a + a.conj().T) / 2


def taylor_expm(a, terms=40):
    """exp(a) by scaling and squaring around a truncated Taylor series."""
    norm = np.linalg.norm(a, 1)
    s = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0 else 0
    b = a / 2**s
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ b / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def random_sequence(rng, max_len=12):
    """A random valid Sequence with awkward floats, for round-trip fuzzing."""
    from ghzsim import seqlang

    def real(lo, hi):
        # mix integers, short decimals and full-precision floats
        kind = rng.integers(3)
        x = rng.uniform(lo, hi)
        if kind == 0:
            return float(round(x))
        if kind == 1:
            return round(x, 3)
        return x

    elements = []
    for _ in range(rng.integers(1, max_len + 1)):
        kind = rng.integers(4)
        if kind == 0:
            angle = real(1e-3, 360)
            angle = min(max(angle, 1e-3), 360.0)
            targets = tuple(rng.choice(np.arange(1, 5), size=rng.integers(1, 4), replace=False))
            length = real(0, 10) if rng.random() < 0.5 else 2.0
            elements.append(seqlang.Pulse(angle, real(-360, 360), targets, abs(length)))
        elif kind == 1:
            j, k = rng.choice(np.arange(1, 5), size=2, replace=False)
            elements.append(seqlang.CouplingDelay((j, k), max(abs(real(0, 3)), 1e-6)))
        elif kind == 2:
            elements.append(seqlang.FixedDelay(abs(real(0, 0.1))))
        else:
            elements.append(seqlang.Gradient("xyz"[rng.integers(3)]))
    name = "" if rng.random() < 0.3 else f"seq_{rng.integers(10**6)}"
    return seqlang.Sequence(tuple(elements), name)


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, label, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}. {label}: {detail}")
