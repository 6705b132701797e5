import numpy as np
import pytest

from liegates.matrix_core import haar_unitary, dagger
from liegates.su_structure import build_su_structure

SQ2 = np.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.diag([1, -1]).astype(complex)

# special-unitarized H, S, T
H_SU = -1j * np.array([[1, 1], [1, -1]], dtype=complex) / SQ2
S_SU = np.exp(-1j * np.pi / 4) * np.diag([1, 1j])
T_SU = np.exp(-1j * np.pi / 8) * np.diag([1, np.exp(1j * np.pi / 4)])


def embed(u, d):
    """Put u in the top-left block of I_d."""
    m = np.eye(d, dtype=complex)
    k = len(u)
    m[:k, :k] = u
    return m


def su2_block_coords(d=3):
    """Coordinates of i*sigma_x, i*sigma_y, i*sigma_z (normalized) in the top-left block."""
    s = build_su_structure(d)
    mats = [embed(1j * p / SQ2, d) - np.eye(d) for p in (PAULI_X, PAULI_Y, PAULI_Z)]
    # embed() puts 1s on the rest of the diagonal, strip them back off
    mats = [m + np.diag(np.r_[np.zeros(2), np.ones(d - 2)]) for m in mats]
    return s.to_coords(np.array(mats))


def random_hamiltonian_set(rng, d, size=None):
    """Random Hamiltonians drawn from a randomly chosen subalgebra family, then conjugated.

    Families: generic su(d), diagonal torus, so(d) (real antisymmetric),
    su(k) block, su(k) block plus its commuting u(1), single element.
    """
    s = build_su_structure(d)
    size = size or int(rng.integers(1, 5))
    family = rng.choice(["generic", "torus", "real", "block", "block_u1", "single"])
    mats = []
    for _ in range(size):
        if family == "generic":
            a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            m = (a - dagger(a)) / 2
        elif family == "torus":
            m = np.diag(1j * rng.normal(size=d))
        elif family == "real":
            a = rng.normal(size=(d, d))
            m = (a - a.T).astype(complex)
        elif family in ("block", "block_u1"):
            k = int(rng.integers(2, d)) if d > 2 else 2
            a = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
            m = np.zeros((d, d), dtype=complex)
            m[:k, :k] = (a - dagger(a)) / 2
            m[:k, :k] -= np.trace(m[:k, :k]) * np.eye(k) / k
            if family == "block_u1" and k < d:
                u1 = np.r_[np.full(k, (d - k) / k), -np.ones(d - k)]
                m += 1j * rng.normal() * np.diag(u1)
        else:
            a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            m = (a - dagger(a)) / 2
            mats = [m]
            break
        mats.append(m - np.trace(m) * np.eye(d) / d)
    u = haar_unitary(d, rng)
    mats = [u @ m @ dagger(u) for m in mats]
    return s.to_coords(np.array(mats)), str(family)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_criteria = []


@pytest.fixture(scope="session")
def criterion_log():
    return _criteria


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, text in sorted(_criteria, key=lambda c: c[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {text}")
