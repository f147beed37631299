"""Independent oracle helpers for the test suite.

Everything here is built from hand-written matrices so oracle computations
never route through the code paths they are meant to check.
"""

import numpy as np

I2 = np.eye(2, dtype=complex)
SIGMA = {
    0: np.eye(2, dtype=complex),
    1: np.array([[1, 0], [0, -1]], dtype=complex),   # z
    2: np.array([[0, 1], [1, 0]], dtype=complex),    # x
    3: np.array([[0, -1j], [1j, 0]], dtype=complex), # y
}

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_R = np.array([1, 1j], dtype=complex) / np.sqrt(2)
KET_L = np.array([1, -1j], dtype=complex) / np.sqrt(2)


def proj(ket):
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def eig_projector(outcome, axis):
    """Eigenspace projector of a Pauli axis via eigendecomposition (oracle)."""
    values, vectors = np.linalg.eigh(SIGMA[axis])
    idx = int(np.argmin(np.abs(values - outcome)))
    return proj(vectors[:, idx])


def haar_ket(rng, dim):
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


def haar_density(rng, dim):
    return proj(haar_ket(rng, dim))


def real_ket(rng):
    vec = rng.standard_normal(2)
    return (vec / np.linalg.norm(vec)).astype(complex)


def ginibre_density(rng, dim):
    """Random full-rank mixed state."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def angles_ket(omega, theta):
    return np.array([np.cos(omega), np.exp(1j * theta) * np.sin(omega)])
