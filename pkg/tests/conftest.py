from functools import reduce

import numpy as np
import pytest

SX = np.array([[0, 0.5], [0.5, 0]])
SY = np.array([[0, -0.5j], [0.5j, 0]])
SZ = np.array([[0.5, 0], [0, -0.5]])


def site_op(op, j, L):
    # bit j of the configuration integer is site j; kron puts site L-1 leftmost
    mats = [np.eye(2)] * L
    mats[L - 1 - j] = op
    return reduce(np.kron, mats)


def kron_xxz(L, lam, bc="periodic"):
    """Full 2^L XXZ matrix from explicit spin matrices (independent of the bit tables)."""
    bonds = [(j, j + 1) for j in range(L - 1)]
    if bc == "periodic":
        bonds.append((L - 1, 0))
    H = np.zeros((2 ** L, 2 ** L), dtype=complex)
    # basis |1> = up is index 0 of SZ's eigenbasis; remap so bit value 1 means up
    flip = np.array([[0, 1], [1, 0]])
    sx, sy, sz = (flip @ s @ flip for s in (SX, SY, SZ))
    for i, j in bonds:
        H += site_op(sx, i, L) @ site_op(sx, j, L)
        H += site_op(sy, i, L) @ site_op(sy, j, L)
        H += lam * site_op(sz, i, L) @ site_op(sz, j, L)
    assert np.allclose(H.imag, 0)
    return H.real


def kron_sector(L, lam, n_up, bc="periodic"):
    H = kron_xxz(L, lam, bc)
    idx = [s for s in range(2 ** L) if bin(s).count("1") == n_up]
    return H[np.ix_(idx, idx)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record one PASS/FAIL line per acceptance criterion."""
    def record(number: int, title: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
